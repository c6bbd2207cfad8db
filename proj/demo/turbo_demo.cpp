// Turbo car: minimum-effort transfer to q_end with a hysteresis-switched booster.
// Usage: turbo_demo [N] [seed]

#include <cstdio>
#include <cstdlib>

#include "smil/bench.hpp"
#include "smil/solver.hpp"

int main(int argc, char** argv) {
  smil::TurboParams p;
  p.N = argc > 1 ? std::atoi(argv[1]) : 25;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  const smil::Instance inst = smil::build_turbo(p);
  const smil::SolveResult r = smil::solve(inst.X, inst.objective, smil::turbo_initial_guess(p, seed));

  std::printf("status %s, f = %.6f after %d iterations and %d MILPs (%.2f s + %.2f s projection)\n",
              smil::to_string(r.status), r.f, r.iterations, r.milp_solves, r.solve_seconds, r.projection_seconds);
  if (r.x.empty()) return 1;

  const smil::TurboTrajectory tr = smil::decode_turbo(p, r.x);
  std::printf("%6s %9s %8s %2s %7s %7s\n", "t", "q", "v", "w", "a", "b");
  for (std::size_t k = 0; k < tr.t.size(); ++k)
    std::printf("%6.2f %9.3f %8.3f %2.0f %7.3f %7.3f\n", tr.t[k], tr.q[k], tr.v[k], tr.w[k], tr.a[k], tr.b[k]);
  std::printf("hysteresis violations: %d\n", smil::hysteresis_violations(p, r.x));
  return r.status == smil::SolveStatus::Critical ? 0 : 1;
}

// Projected gradient steps can go uphill on a polyhedron where the trust-region
// step cannot. Feasible set: the segment x2 = x1 / 2 in [-100, 100]^2,
// objective x1 - 1.5 x2, which equals x1 / 4 there and so decreases towards -x1.

#include <cmath>
#include <cstdio>

#include "smil/solver.hpp"

int main() {
  smil::MixedIntegerPolyhedron X;
  X.add_variable(-100, 100);
  X.add_variable(-100, 100);
  X.add_row({{1, 1.0}, {0, -0.5}}, smil::Sense::Equal, 0.0);
  const smil::SmoothObjective f = smil::SmoothObjective::from_expression(X, smil::parse("x1 - 1.5*x2"));
  const std::vector<double> x0{0.0, 0.0};

  // steepest descent points to (-1, 1.5); its nearest point on the segment
  // in the max-norm lies on the wrong side of the origin
  bool always_up = true;
  std::printf("%10s %12s %12s %12s\n", "gamma", "x1", "x2", "f");
  for (int e = -10; e <= 3; ++e) {
    const double gamma = std::ldexp(1.0, e);
    const smil::ProjectionResult p = smil::projected_gradient_step(X, f, x0, gamma, smil::NormKind::LInf);
    const double fp = f.value(p.x);
    always_up = always_up && fp > f.value(x0);
    std::printf("%10.6g %12.6g %12.6g %12.6g\n", gamma, p.x[0], p.x[1], fp);
  }
  std::printf("projected gradient increased f for every step size: %s\n", always_up ? "yes" : "no");

  smil::SolverConfig cfg;
  cfg.max_outer_iterations = 20;
  const smil::SolveResult r = smil::solve(X, f, x0, cfg);
  std::printf("trust-region run: status %s, f %.6g -> %.6g in %d iterations\n", smil::to_string(r.status), r.f0, r.f,
              r.iterations);
  return always_up ? 0 : 1;
}

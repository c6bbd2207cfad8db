#pragma once

// JSON problem files:
// {
//   "variables":   [{"name": "u", "lb": 0, "ub": 1, "integer": false}, ...],
//   "constraints": [{"terms": {"u": 1, "z": -2}, "sense": "<=", "rhs": 0}, ...],
//   "objective":   {"f1": "x1^2 + 3*x2", "f2": {"z": 0.5}},
//   "initial_point": [0, 0, 1]            (optional)
// }
// f1 refers to variables positionally (x1 is the first entry of "variables");
// f2 is keyed by variable name. Missing lb/ub mean -inf/+inf.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "smil/expr.hpp"
#include "smil/model.hpp"

namespace smil {

class ProblemFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Problem {
  MixedIntegerPolyhedron X;
  SmoothObjective objective;
  std::optional<std::vector<double>> initial_point;
};

namespace detail {

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

inline double bound_value(const nlohmann::json& v, double missing, const std::string& path) {
  if (v.is_null()) return missing;
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ProblemFileError(path + ": expected a number or \"inf\"/\"-inf\"");
}

inline nlohmann::json bound_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

}  // namespace detail

/// Parses problem text; `source` prefixes diagnostics.
inline Problem parse_problem(const std::string& text, const std::string& source = "<input>") {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw ProblemFileError(source + ":" + detail::line_column(text, byte) + ": JSON syntax error: " + e.what());
  }
  const auto fail = [&](const std::string& path, const std::string& msg) -> ProblemFileError {
    return ProblemFileError(source + ": " + path + ": " + msg);
  };
  const auto number = [&](const json& v, const std::string& path) {
    if (!v.is_number()) throw fail(path, "expected a number");
    return v.get<double>();
  };
  if (!doc.is_object()) throw fail("/", "top level must be an object");

  Problem p;
  std::map<std::string, int> index;
  const json& vars = doc.contains("variables") ? doc["variables"] : json();
  if (!vars.is_array() || vars.empty()) throw fail("/variables", "expected a non-empty array");
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const std::string path = "/variables/" + std::to_string(j);
    const json& v = vars[j];
    if (!v.is_object()) throw fail(path, "expected an object");
    std::string name = v.value("name", std::string("x") + std::to_string(j + 1));
    if (index.count(name) != 0) throw fail(path + "/name", "duplicate variable name '" + name + "'");
    const bool integer = v.value("integer", false);
    double lb = 0.0, ub = 0.0;
    try {
      lb = detail::bound_value(v.value("lb", json()), -kInf, path + "/lb");
      ub = detail::bound_value(v.value("ub", json()), kInf, path + "/ub");
    } catch (const ProblemFileError& e) {
      throw ProblemFileError(source + ": " + e.what());
    }
    if (lb > ub) throw fail(path, "lower bound exceeds upper bound");
    if (integer && (!std::isfinite(lb) || !std::isfinite(ub))) throw fail(path, "integer variables need finite bounds");
    index[name] = p.X.add_variable(lb, ub, integer, name);
  }

  const auto lookup = [&](const std::string& name, const std::string& path) {
    const auto it = index.find(name);
    if (it == index.end()) throw fail(path, "unknown variable '" + name + "'");
    return it->second;
  };

  if (doc.contains("constraints")) {
    const json& rows = doc["constraints"];
    if (!rows.is_array()) throw fail("/constraints", "expected an array");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string path = "/constraints/" + std::to_string(i);
      const json& r = rows[i];
      if (!r.is_object() || !r.contains("terms") || !r["terms"].is_object()) throw fail(path, "expected an object with a \"terms\" object");
      Terms terms;
      for (const auto& [name, coeff] : r["terms"].items()) terms.emplace_back(lookup(name, path + "/terms/" + name), number(coeff, path + "/terms/" + name));
      const std::string sense = r.value("sense", std::string());
      Sense s;
      if (sense == "<=") s = Sense::LessEqual;
      else if (sense == ">=") s = Sense::GreaterEqual;
      else if (sense == "=" || sense == "==") s = Sense::Equal;
      else throw fail(path + "/sense", "expected \"<=\", \">=\" or \"=\"");
      if (!r.contains("rhs")) throw fail(path, "missing \"rhs\"");
      p.X.add_row(terms, s, number(r["rhs"], path + "/rhs"));
    }
  }

  if (!doc.contains("objective") || !doc["objective"].is_object()) throw fail("/objective", "expected an object");
  const json& obj = doc["objective"];
  const std::string f1_text = obj.contains("f1") ? (obj["f1"].is_string() ? obj["f1"].get<std::string>() : throw fail("/objective/f1", "expected a string")) : "0";
  Expression f1;
  try {
    f1 = parse(f1_text);
  } catch (const ParseError& e) {
    throw fail("/objective/f1", e.what());
  }
  std::vector<double> f2(p.X.integers().size(), 0.0);
  if (obj.contains("f2")) {
    if (!obj["f2"].is_object()) throw fail("/objective/f2", "expected an object");
    for (const auto& [name, coeff] : obj["f2"].items()) {
      const std::string path = "/objective/f2/" + name;
      const int j = lookup(name, path);
      if (!p.X.is_integer(j)) throw fail(path, "f2 entries must refer to integer variables");
      const auto& ints = p.X.integers();
      const auto k = static_cast<std::size_t>(std::find(ints.begin(), ints.end(), j) - ints.begin());
      f2[k] = number(coeff, path);
    }
  }
  try {
    p.objective = SmoothObjective::from_expression(p.X, std::move(f1), std::move(f2));
  } catch (const std::invalid_argument& e) {
    throw fail("/objective/f1", e.what());
  }

  if (doc.contains("initial_point")) {
    const json& x0 = doc["initial_point"];
    if (!x0.is_array() || x0.size() != vars.size()) throw fail("/initial_point", "expected an array with one entry per variable");
    std::vector<double> x;
    for (std::size_t j = 0; j < x0.size(); ++j) x.push_back(number(x0[j], "/initial_point/" + std::to_string(j)));
    p.initial_point = std::move(x);
  }
  return p;
}

inline Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemFileError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), path);
}

/// Serializes a problem whose f1 was built from an expression.
inline std::string export_problem(const MixedIntegerPolyhedron& X, const SmoothObjective& objective,
                                  const std::vector<double>* initial_point = nullptr) {
  using nlohmann::json;
  if (!objective.expression()) throw std::invalid_argument("export_problem: objective has no expression form");
  json doc;
  json vars = json::array();
  for (int j = 0; j < X.num_vars(); ++j) {
    const auto uj = static_cast<std::size_t>(j);
    vars.push_back({{"name", X.names()[uj]},
                    {"lb", detail::bound_json(X.lower()[uj])},
                    {"ub", detail::bound_json(X.upper()[uj])},
                    {"integer", X.is_integer(j)}});
  }
  doc["variables"] = std::move(vars);
  std::vector<json> rows(static_cast<std::size_t>(X.num_rows()), json::object());
  for (auto& r : rows) r["terms"] = json::object();
  for (const auto& t : X.entries()) {
    json& terms = rows[static_cast<std::size_t>(t.row)]["terms"];
    const std::string& name = X.names()[static_cast<std::size_t>(t.col)];
    terms[name] = terms.value(name, 0.0) + t.value;
  }
  for (int i = 0; i < X.num_rows(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Sense s = X.senses()[ui];
    rows[ui]["sense"] = s == Sense::LessEqual ? "<=" : s == Sense::GreaterEqual ? ">=" : "=";
    rows[ui]["rhs"] = X.rhs()[ui];
  }
  doc["constraints"] = rows;
  json f2 = json::object();
  for (std::size_t k = 0; k < X.integers().size(); ++k)
    if (objective.f2()[k] != 0.0) f2[X.names()[static_cast<std::size_t>(X.integers()[k])]] = objective.f2()[k];
  doc["objective"] = {{"f1", to_string(*objective.expression())}, {"f2", f2}};
  if (initial_point != nullptr) doc["initial_point"] = *initial_point;
  return doc.dump(2) + "\n";
}

}  // namespace smil

#pragma once

// JSON problem files. Requires nlohmann/json (vendor/json.hpp).

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "../errors.hpp"
#include "../expr.hpp"
#include "../problem.hpp"
#include "../solver.hpp"

namespace fraclyap::io {

/// Contents of a problem file:
///
///   {
///     "a": 0, "b": 1, "alpha": 1.5,
///     "q": "t", "f": "exp(y)",
///     "declares": ["f_nondecreasing", "f_concave", "q_nonnegative"],
///     "solver": {"n": 512, "tol": 1e-8, "max_iter": 500, "damping": 1},
///     "radii": {"r1": "1/27", "r2": 1}
///   }
///
/// Numbers may also be given as constant expressions in strings ("1/27").
/// Unknown keys are errors.
struct ProblemSpec {
  Problem problem;
  SolverOptions solver;
  std::optional<std::pair<double, double>> radii;
};

/// Value of a constant expression such as "1/27" or "2*pi".
inline double parse_constant(std::string_view text) {
  const Expression e = parse(text, "_");
  auto uses_var = [](const auto& self, const Node& n) -> bool {
    return n.kind == NodeKind::Variable || (n.lhs && self(self, *n.lhs)) ||
           (n.rhs && self(self, *n.rhs));
  };
  if (uses_var(uses_var, e.root())) {
    throw SpecError("'" + std::string(text) + "' is not a constant expression");
  }
  return e.evaluate(0.0);
}

namespace detail {

using nlohmann::json;

inline void check_keys(const json& obj, std::string_view where,
                       std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw SpecError(std::string(where) + ": expected an object");
  }
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) {
      ok = ok || key == a;
    }
    if (!ok) {
      throw SpecError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

inline double number_field(const json& obj, const char* key, std::string_view where) {
  if (!obj.contains(key)) {
    throw SpecError(std::string(where) + ": missing required key '" + key + "'");
  }
  const json& v = obj.at(key);
  if (v.is_number()) {
    return v.get<double>();
  }
  if (v.is_string()) {
    try {
      return parse_constant(v.get<std::string>());
    } catch (const std::exception& err) {
      throw SpecError(std::string(where) + "." + key + ": " + err.what());
    }
  }
  throw SpecError(std::string(where) + "." + key + ": expected a number");
}

inline std::string string_field(const json& obj, const char* key, std::string_view where) {
  if (!obj.contains(key) || !obj.at(key).is_string()) {
    throw SpecError(std::string(where) + ": missing or non-string key '" + key + "'");
  }
  return obj.at(key).get<std::string>();
}

inline std::size_t count_field(const json& obj, const char* key, std::string_view where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw SpecError(std::string(where) + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

} // namespace detail

inline ProblemSpec parse_problem_spec(const nlohmann::json& doc) {
  using detail::check_keys;
  using detail::number_field;
  check_keys(doc, "spec", {"a", "b", "alpha", "q", "f", "declares", "solver", "radii"});

  Declarations dec;
  if (doc.contains("declares")) {
    const auto& list = doc.at("declares");
    if (!list.is_array()) {
      throw SpecError("spec.declares: expected an array of strings");
    }
    for (const auto& item : list) {
      const std::string name = item.is_string() ? item.get<std::string>() : "";
      if (name == "f_nondecreasing") {
        dec.f_nondecreasing = true;
      } else if (name == "f_concave") {
        dec.f_concave = true;
      } else if (name == "q_nonnegative") {
        dec.q_nonnegative = true;
      } else {
        throw SpecError("spec.declares: unknown declaration " + item.dump());
      }
    }
  }

  ProblemSpec spec;
  spec.problem = make_problem(number_field(doc, "a", "spec"), number_field(doc, "b", "spec"),
                              number_field(doc, "alpha", "spec"),
                              detail::string_field(doc, "q", "spec"),
                              detail::string_field(doc, "f", "spec"), dec);
  spec.solver.require_nonnegative_q = dec.q_nonnegative;

  if (doc.contains("solver")) {
    const auto& s = doc.at("solver");
    check_keys(s, "spec.solver", {"n", "tol", "max_iter", "damping"});
    if (s.contains("n")) {
      spec.solver.n = detail::count_field(s, "n", "spec.solver");
    }
    if (s.contains("tol")) {
      spec.solver.tol = number_field(s, "tol", "spec.solver");
    }
    if (s.contains("max_iter")) {
      spec.solver.max_iter = detail::count_field(s, "max_iter", "spec.solver");
    }
    if (s.contains("damping")) {
      spec.solver.damping = number_field(s, "damping", "spec.solver");
    }
    if (spec.solver.n < 16) {
      throw SpecError("spec.solver.n: must be at least 16");
    }
    if (!(spec.solver.tol > 0.0)) {
      throw SpecError("spec.solver.tol: must be positive");
    }
    if (!(spec.solver.damping > 0.0 && spec.solver.damping <= 1.0)) {
      throw SpecError("spec.solver.damping: must lie in (0, 1]");
    }
  }

  if (doc.contains("radii")) {
    const auto& r = doc.at("radii");
    check_keys(r, "spec.radii", {"r1", "r2"});
    const double r1 = number_field(r, "r1", "spec.radii");
    const double r2 = number_field(r, "r2", "spec.radii");
    if (!(r1 > 0.0 && r2 > r1)) {
      throw SpecError("spec.radii: must satisfy 0 < r1 < r2");
    }
    spec.radii = std::pair{r1, r2};
  }
  return spec;
}

inline ProblemSpec parse_problem_spec_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw SpecError(std::string("spec is not valid JSON: ") + err.what());
  }
  return parse_problem_spec(doc);
}

inline ProblemSpec load_problem_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw SpecError("cannot open spec file '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_problem_spec_text(text.str());
}

} // namespace fraclyap::io

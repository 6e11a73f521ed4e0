#pragma once

// Machine-readable command reports (JSON) and their plain-text rendering.

#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "../existence.hpp"
#include "../green_kernel.hpp"
#include "../lyapunov.hpp"
#include "../problem.hpp"
#include "../solver.hpp"

namespace fraclyap::io {

using nlohmann::json;

inline constexpr std::string_view kReportSchema = "fraclyap.report";
inline constexpr int kReportSchemaVersion = 1;

inline json problem_json(const Problem& p) {
  json declares = json::array();
  if (p.declares.f_nondecreasing) {
    declares.push_back("f_nondecreasing");
  }
  if (p.declares.f_concave) {
    declares.push_back("f_concave");
  }
  if (p.declares.q_nonnegative) {
    declares.push_back("q_nonnegative");
  }
  return {{"a", p.a},          {"b", p.b},          {"alpha", p.alpha},
          {"q", p.q.print()},  {"f", p.f.print()},  {"declares", declares}};
}

inline json report_header(std::string_view command, const Problem* problem) {
  json r;
  r["schema"] = kReportSchema;
  r["schema_version"] = kReportSchemaVersion;
  r["command"] = command;
  if (problem) {
    r["problem"] = problem_json(*problem);
  }
  return r;
}

inline json quadrature_settings(const QuadratureOptions& q) {
  return {{"abs_tol", q.abs_tol},
          {"max_subdivisions", q.max_subdivisions},
          {"rule", q.rule == QuadratureRule::GK21 ? "G10K21" : "G7K15"}};
}

inline json solver_settings(const SolverOptions& s) {
  return {{"n", s.n},
          {"tol", s.tol},
          {"max_iter", s.max_iter},
          {"damping", s.damping},
          {"quad_tol", s.quad_tol},
          {"auto_damping", s.auto_damping},
          {"gl_left_layer_fraction", kGlLeftLayerFraction}};
}

inline json constants_json(const ExistenceConstants& c, const KernelGeometry& geom,
                           const DiagonalMaximum& diag) {
  return {{"gamma", c.gamma},
          {"gamma_star", c.gamma_star},
          {"lambda", geom.lambda()},
          {"lambda_residual", geom.lambda_residual()},
          {"third_left", geom.third_left()},
          {"third_right", geom.third_right()},
          {"green_diag_max", {{"s_star", diag.s_star}, {"value", diag.value},
                              {"numeric_s", diag.numeric_s},
                              {"numeric_value", diag.numeric_value}}},
          {"integral", c.integral},
          {"integral_error", c.integral_error},
          {"integral_star", c.integral_star},
          {"integral_star_error", c.integral_star_error}};
}

inline json verdict_json(const HypothesisVerdict& v) {
  return {{"holds", v.holds},
          {"witness_y", v.witness_y},
          {"witness_f", v.witness_f},
          {"threshold", v.threshold},
          {"margin", v.margin}};
}

inline json certificate_json(const ExistenceCertificate& c) {
  return {{"gamma", c.gamma},
          {"gamma_star", c.gamma_star},
          {"r1", c.r1},
          {"r2", c.r2},
          {"h1", verdict_json(c.h1)},
          {"h2", verdict_json(c.h2)},
          {"extremum_mode", to_string(c.mode)},
          {"samples", c.samples},
          {"conclusion", to_string(c.conclusion)},
          {"norm_bracket", {c.norm_bracket.first, c.norm_bracket.second}},
          {"warnings", c.warnings}};
}

inline json lyapunov_json(const LyapunovReport& r) {
  json j = {{"variant", to_string(r.variant)},
            {"bound", r.bound},
            {"q_l1_norm", r.q_l1_norm},
            {"q_l1_error", r.q_l1_error},
            {"eta", r.eta},
            {"verdict", to_string(r.verdict)},
            {"inequality_holds", r.inequality_holds},
            {"riemann_fractional_reference", r.riemann_fractional_reference},
            {"classical_reference", r.classical_reference},
            {"warnings", r.warnings}};
  if (r.shape) {
    j["f_shape"] = {{"concave", r.shape->concave},
                    {"nondecreasing", r.shape->nondecreasing},
                    {"samples", r.shape->samples},
                    {"mode", "sampled, not proven"}};
  }
  return j;
}

inline json solution_json(const SolutionGrid& s, const GlResidual& gl) {
  return {{"status", to_string(s.status)},
          {"eta", s.eta},
          {"iterations", s.iterations},
          {"last_delta", s.last_delta},
          {"damping", s.damping},
          {"nodes", s.nodes.size()},
          {"gl_residual", gl.value},
          {"gl_residual_at", gl.at},
          {"gl_roundoff_floor", gl.roundoff_floor},
          {"gl_left_layer", gl.left_layer},
          {"gl_right_layer", gl.right_layer},
          {"warnings", s.warnings}};
}

namespace detail {

struct FieldRule {
  const char* path; // dotted
  json::value_t type;
};

inline const json* lookup(const json& doc, std::string_view dotted) {
  const json* cur = &doc;
  while (!dotted.empty()) {
    const auto dot = dotted.find('.');
    const std::string key(dotted.substr(0, dot));
    if (!cur->is_object() || !cur->contains(key)) {
      return nullptr;
    }
    cur = &cur->at(key);
    dotted = dot == std::string_view::npos ? std::string_view{} : dotted.substr(dot + 1);
  }
  return cur;
}

inline bool type_matches(const json& v, json::value_t want) {
  if (want == json::value_t::number_float) {
    return v.is_number();
  }
  if (want == json::value_t::number_unsigned) {
    return v.is_number_integer() && v.get<long long>() >= 0;
  }
  return v.type() == want;
}

} // namespace detail

/// Validating reader: returns the list of schema violations (empty if valid).
inline std::vector<std::string> validate_report(const json& doc) {
  using V = json::value_t;
  std::vector<std::string> errors;
  auto require = [&](std::initializer_list<detail::FieldRule> rules) {
    for (const auto& rule : rules) {
      const json* v = detail::lookup(doc, rule.path);
      if (!v) {
        errors.push_back(std::string("missing field ") + rule.path);
      } else if (!detail::type_matches(*v, rule.type)) {
        errors.push_back(std::string("wrong type for ") + rule.path);
      }
    }
  };
  if (!doc.is_object()) {
    return {"report is not a JSON object"};
  }
  require({{"schema", V::string}, {"schema_version", V::number_unsigned}, {"command", V::string}});
  if (!errors.empty()) {
    return errors;
  }
  if (doc.at("schema") != kReportSchema) {
    errors.push_back("unknown schema");
  }
  if (doc.at("schema_version") != kReportSchemaVersion) {
    errors.push_back("unsupported schema_version");
  }
  const auto command = doc.at("command").get<std::string>();
  const std::initializer_list<detail::FieldRule> problem_fields = {
      {"problem.a", V::number_float},  {"problem.b", V::number_float},
      {"problem.alpha", V::number_float}, {"problem.q", V::string},
      {"problem.f", V::string},        {"problem.declares", V::array}};
  if (command == "constants") {
    require(problem_fields);
    require({{"constants.gamma", V::number_float},
             {"constants.gamma_star", V::number_float},
             {"constants.lambda", V::number_float},
             {"constants.third_left", V::number_float},
             {"constants.third_right", V::number_float},
             {"constants.green_diag_max.value", V::number_float},
             {"settings.quadrature.abs_tol", V::number_float}});
  } else if (command == "existence") {
    require(problem_fields);
    require({{"certificate.gamma", V::number_float},
             {"certificate.gamma_star", V::number_float},
             {"certificate.r1", V::number_float},
             {"certificate.r2", V::number_float},
             {"certificate.h1.holds", V::boolean},
             {"certificate.h2.holds", V::boolean},
             {"certificate.conclusion", V::string},
             {"settings.quadrature.abs_tol", V::number_float},
             {"settings.f_samples", V::number_unsigned}});
  } else if (command == "lyapunov") {
    require(problem_fields);
    require({{"lyapunov.variant", V::string},
             {"lyapunov.bound", V::number_float},
             {"lyapunov.q_l1_norm", V::number_float},
             {"lyapunov.eta", V::number_float},
             {"lyapunov.inequality_holds", V::boolean},
             {"lyapunov.verdict", V::string},
             {"settings.quadrature.abs_tol", V::number_float}});
  } else if (command == "solve") {
    require(problem_fields);
    require({{"solution.status", V::string},
             {"solution.eta", V::number_float},
             {"solution.iterations", V::number_unsigned},
             {"settings.solver.n", V::number_unsigned},
             {"settings.solver.tol", V::number_float}});
    // null when the grid is too coarse for the residual
    const json* gl = detail::lookup(doc, "solution.gl_residual");
    if (!gl) {
      errors.push_back("missing field solution.gl_residual");
    } else if (!gl->is_number() && !gl->is_null()) {
      errors.push_back("wrong type for solution.gl_residual");
    }
  } else if (command == "selftest") {
    require({{"criteria", V::array}, {"passed", V::boolean}});
  } else {
    errors.push_back("unknown command '" + command + "'");
  }
  return errors;
}

namespace detail {

inline void render(const json& v, const std::string& prefix, std::ostringstream& out) {
  if (v.is_object()) {
    for (const auto& [key, child] : v.items()) {
      render(child, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array())) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      render(v[i], prefix + "[" + std::to_string(i) + "]", out);
    }
  } else if (v.is_string()) {
    out << prefix << ": " << v.get<std::string>() << '\n';
  } else {
    out << prefix << ": " << v.dump() << '\n';
  }
}

} // namespace detail

/// "dotted.key: value" lines, one per leaf.
inline std::string render_text(const json& report) {
  std::ostringstream out;
  out.precision(17);
  detail::render(report, "", out);
  return out.str();
}

} // namespace fraclyap::io

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include <fraclyap/errors.hpp>
#include <fraclyap/io/problem_spec.hpp>
#include <fraclyap/io/report.hpp>

using namespace fraclyap;
using fraclyap::io::json;

namespace {

const char* kExpSpec = R"js({
  "a": 0, "b": 1, "alpha": 1.5, "q": "t", "f": "exp(y)",
  "declares": ["f_nondecreasing", "q_nonnegative"],
  "solver": {"n": 256, "tol": "1e-9"},
  "radii": {"r1": "1/27", "r2": 1}
})js";

} // namespace

TEST(ProblemSpec, ParsesFullSpec) {
  const auto spec = io::parse_problem_spec_text(kExpSpec);
  EXPECT_EQ(spec.problem.alpha, 1.5);
  EXPECT_EQ(spec.problem.q.print(), "t");
  EXPECT_TRUE(spec.problem.declares.f_nondecreasing);
  EXPECT_FALSE(spec.problem.declares.f_concave);
  EXPECT_EQ(spec.solver.n, 256u);
  EXPECT_EQ(spec.solver.tol, 1e-9);
  EXPECT_TRUE(spec.solver.require_nonnegative_q);
  ASSERT_TRUE(spec.radii.has_value());
  EXPECT_EQ(spec.radii->first, 1.0 / 27.0);
}

TEST(ProblemSpec, ConstantExpressions) {
  EXPECT_EQ(io::parse_constant("1/27"), 1.0 / 27.0);
  EXPECT_NEAR(io::parse_constant("2*pi"), 2.0 * std::acos(-1.0), 1e-15);
  EXPECT_THROW(io::parse_constant("t"), SpecError);
  EXPECT_THROW(io::parse_constant("_+1"), SpecError);
}

TEST(ProblemSpec, StrictKeys) {
  EXPECT_THROW(io::parse_problem_spec_text(R"js({"a":0,"b":1,"aplha":1.5,"q":"t","f":"y"})js"),
               SpecError);
  EXPECT_THROW(io::parse_problem_spec_text(
                   R"js({"a":0,"b":1,"alpha":1.5,"q":"t","f":"y","solver":{"nn":3}})js"),
               SpecError);
  EXPECT_THROW(io::parse_problem_spec_text(
                   R"js({"a":0,"b":1,"alpha":1.5,"q":"t","f":"y","declares":["f_convex"]})js"),
               SpecError);
}

TEST(ProblemSpec, InvalidData) {
  EXPECT_THROW(io::parse_problem_spec_text(R"js({"a":0,"b":1,"alpha":2.5,"q":"t","f":"y"})js"),
               SpecError);
  EXPECT_THROW(io::parse_problem_spec_text(R"js({"a":1,"b":1,"alpha":1.5,"q":"t","f":"y"})js"),
               SpecError);
  EXPECT_THROW(io::parse_problem_spec_text(R"js({"a":0,"b":1,"alpha":1.5,"q":"t","f":"exp(t)"})js"),
               ParseError);
  EXPECT_THROW(io::parse_problem_spec_text(
                   R"js({"a":0,"b":1,"alpha":1.5,"q":"t","f":"y","solver":{"n":8}})js"),
               SpecError);
  EXPECT_THROW(io::parse_problem_spec_text(
                   R"js({"a":0,"b":1,"alpha":1.5,"q":"t","f":"y","radii":{"r1":2,"r2":1}})js"),
               SpecError);
  EXPECT_THROW(io::parse_problem_spec_text("{not json"), SpecError);
  EXPECT_THROW(io::load_problem_spec("/nonexistent/spec.json"), SpecError);
}

TEST(Report, ValidatesAndRoundTrips) {
  const auto spec = io::parse_problem_spec_text(kExpSpec);
  const ExistenceOptions opts;
  const auto geom = solve_lambda(spec.problem);
  const auto c = existence_constants(spec.problem, opts);
  json report = io::report_header("constants", &spec.problem);
  report["constants"] = io::constants_json(c, geom, green_diag_max(geom));
  report["settings"]["quadrature"] = io::quadrature_settings(opts.quadrature);
  EXPECT_TRUE(io::validate_report(report).empty());
  const json back = json::parse(report.dump());
  EXPECT_TRUE(io::validate_report(back).empty());
  EXPECT_EQ(back.at("constants").at("gamma").get<double>(), c.gamma);

  json broken = back;
  broken["constants"].erase("gamma");
  ASSERT_EQ(io::validate_report(broken).size(), 1u);
  EXPECT_EQ(io::validate_report(broken).front(), "missing field constants.gamma");
  broken = back;
  broken["schema_version"] = 99;
  EXPECT_FALSE(io::validate_report(broken).empty());
  EXPECT_FALSE(io::validate_report(json::array()).empty());
}

TEST(Report, TextRendering) {
  json r = io::report_header("selftest", nullptr);
  r["passed"] = true;
  r["criteria"] = json::array({{{"id", 1}, {"passed", true}}});
  const std::string text = io::render_text(r);
  EXPECT_NE(text.find("command: selftest\n"), std::string::npos);
  EXPECT_NE(text.find("criteria[0].id: 1\n"), std::string::npos);
  EXPECT_NE(text.find("passed: true\n"), std::string::npos);
}

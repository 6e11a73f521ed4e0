#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <fraclyap/errors.hpp>
#include <fraclyap/lyapunov.hpp>
#include <fraclyap/special_functions.hpp>

using namespace fraclyap;

TEST(Lyapunov, CorollaryExamples) {
  const auto p = make_problem(0, 1, 1.5, "t", "ln(2+y)", {true, true, true});
  EXPECT_NEAR(corollary_bound(p, 1.0 / 40.0, 1.0), 4.0334e-2, 1e-5);
  const double ref = (1.0 / 27.0) * 2.0 * (std::sqrt(std::numbers::pi) / 2.0) / std::log(3.0);
  EXPECT_NEAR(corollary_bound(p, 1.0 / 27.0, 1.0), ref, 1e-14);
  EXPECT_NEAR(corollary_bound(p, 1.0 / 27.0, 1.0), 5.9754e-2, 1e-5);
  EXPECT_THROW(corollary_bound(p, 1.0, 0.5), ArgumentError);
}

TEST(Lyapunov, CorollaryLinearInR1) {
  const auto p = make_problem(0, 1, 1.7, "1", "y");
  const double r2 = 2.0;
  for (double eps : {1e-3, 0.1, 0.5}) {
    const double r1 = eps * r2 / 4.0;
    EXPECT_NEAR(corollary_bound(p, 2.0 * r1, r2) / corollary_bound(p, r1, r2), 2.0, 1e-12);
  }
}

TEST(Lyapunov, ReductionToClassicalForms) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ua(-3.0, 3.0), ul(0.1, 5.0), ualpha(1.0, 2.0),
      ueta(1e-3, 100.0);
  for (int i = 0; i < 50; ++i) {
    const double a = ua(rng);
    const double b = a + ul(rng);
    const double alpha = std::max(ualpha(rng), 1.0 + 1e-6);
    const auto p = make_problem(a, b, alpha, "1", "y");
    const double expected = std::tgamma(alpha) * std::pow(4.0 / (b - a), alpha - 1.0);
    ASSERT_NEAR(generalized_bound(p, ueta(rng)), expected, 1e-12 * std::max(1.0, expected));
    ASSERT_NEAR(riemann_fractional_bound(a, b, alpha), expected, 1e-12 * std::max(1.0, expected));
    const auto p2 = make_problem(a, b, 2.0, "1", "y");
    ASSERT_NEAR(generalized_bound(p2, ueta(rng)), 4.0 / (b - a), 1e-12 * std::max(1.0, 4.0 / (b - a)));
    ASSERT_NEAR(classical_bound(a, b), 4.0 / (b - a), 1e-15);
  }
  EXPECT_NEAR(generalized_bound(make_problem(0, 1, 2.0, "1", "y"), 0.3), 4.0, 1e-12);
}

TEST(Lyapunov, EtaCancelsForIdentity) {
  const auto p = make_problem(0, 2, 1.4, "t", "y");
  double lo = INFINITY, hi = -INFINITY;
  for (double eta : {1e-6, 1e-3, 0.5, 1.0, 7.0, 1e3, 1e6}) {
    const double v = generalized_bound(p, eta);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_LE(hi - lo, 1e-12);
}

TEST(Lyapunov, VerdictExamples) {
  const auto zero_q = verify_inequality(make_problem(0, 1, 1.5, "0", "exp(y)"), 0.2);
  EXPECT_EQ(zero_q.q_l1_norm, 0.0);
  EXPECT_FALSE(zero_q.inequality_holds);
  EXPECT_EQ(zero_q.verdict, InequalityVerdict::Fails);

  const auto c3 = verify_inequality(make_problem(0, 1, 2.0, "3", "y"), 0.5);
  EXPECT_FALSE(c3.inequality_holds);
  const auto c5 = verify_inequality(make_problem(0, 1, 2.0, "5", "y"), 0.5);
  EXPECT_TRUE(c5.inequality_holds);
  const auto c4 = verify_inequality(make_problem(0, 1, 2.0, "4", "y"), 0.5);
  EXPECT_EQ(c4.verdict, InequalityVerdict::Indeterminate);
  EXPECT_FALSE(c4.inequality_holds);
  EXPECT_EQ(c4.classical_reference, 4.0);

  const auto cor = verify_corollary(make_problem(0, 1, 1.5, "t", "ln(2+y)"), 1.0 / 40.0, 1.0);
  EXPECT_EQ(cor.variant, BoundVariant::Corollary);
  EXPECT_TRUE(cor.inequality_holds); // 1/2 > 0.0403
  ASSERT_TRUE(cor.shape.has_value());
  EXPECT_TRUE(cor.shape->concave);
  EXPECT_TRUE(cor.warnings.empty());
}

TEST(Lyapunov, ShapeCheck) {
  const auto ln = check_f_shape(parse("ln(2+y)", "y"), 1.0);
  EXPECT_TRUE(ln.concave);
  EXPECT_TRUE(ln.nondecreasing);
  const auto ex = check_f_shape(parse("exp(y)", "y"), 1.0);
  EXPECT_FALSE(ex.concave);
  EXPECT_TRUE(ex.nondecreasing);
  const auto neg = check_f_shape(parse("1-y", "y"), 1.0);
  EXPECT_TRUE(neg.concave);
  EXPECT_FALSE(neg.nondecreasing);
  const auto w = verify_inequality(make_problem(0, 1, 1.5, "t", "exp(y)"), 0.2);
  EXPECT_FALSE(w.warnings.empty());
}

TEST(Lyapunov, JensenSpotCheck) {
  // f(sum w_i y_i) >= sum w_i f(y_i) for concave f and probability weights w
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0), uy(0.0, 5.0), uc(0.5, 3.0);
  const char* families[] = {"ln(c+y)", "sqrt(c+y)", "c*y - y^2/10", "1 - exp(-c*y)"};
  for (int inst = 0; inst < 1000; ++inst) {
    std::string text = families[inst % 4];
    const std::string c = std::to_string(uc(rng));
    for (std::size_t pos; (pos = text.find('c')) != std::string::npos;) {
      text.replace(pos, 1, c);
    }
    const Expression f = parse(text, "y");
    std::vector<double> w(8), y(8);
    double total = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      w[k] = u(rng);
      y[k] = uy(rng);
      total += w[k];
    }
    double mean = 0.0, mean_f = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      mean += w[k] / total * y[k];
      mean_f += w[k] / total * f(y[k]);
    }
    ASSERT_GE(f(mean), mean_f - 1e-12) << text;
  }
}

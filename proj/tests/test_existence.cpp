#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <fraclyap/errors.hpp>
#include <fraclyap/acceptance.hpp>
#include <fraclyap/existence.hpp>

using namespace fraclyap;

namespace {

Problem exp_problem(double a = 0.0, double b = 1.0, std::string_view q = "t") {
  return make_problem(a, b, 1.5, q, "exp(y)", {true, false, true});
}

} // namespace

TEST(Existence, GammaClosedForms) {
  EXPECT_NEAR(gamma_constant(exp_problem()), 4.514, 0.002);
  EXPECT_NEAR(gamma_constant(exp_problem()), 8.0 / std::sqrt(std::numbers::pi), 1e-9);
  EXPECT_NEAR(gamma_constant(make_problem(0, 1, 1.5, "1", "exp(y)")),
              4.0 / std::sqrt(std::numbers::pi), 1e-9);
  EXPECT_NEAR(gamma_constant(make_problem(0, 1, 2.0, "1", "exp(y)")), 6.0, 1e-9);
}

TEST(Existence, GammaStar) {
  EXPECT_NEAR(gamma_star_constant(exp_problem()), 26.459, 0.05);
  const auto p = make_problem(0, 1, 2.0, "1", "exp(y)");
  ExistenceOptions o15, o21;
  o21.quadrature.rule = QuadratureRule::GK21;
  o21.quadrature.abs_tol = 1e-12;
  const double g15 = gamma_star_constant(p, o15);
  const double g21 = gamma_star_constant(p, o21);
  EXPECT_NEAR(g15 / g21, 1.0, 1e-8);
}

TEST(Existence, GammaStarExceedsGamma) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ualpha(1.05, 2.0), ul(0.2, 5.0);
  for (int i = 0; i < 20; ++i) {
    const double b = ul(rng);
    const auto p = make_problem(0.0, b, ualpha(rng), "1 + t", "exp(y)");
    const auto c = existence_constants(p);
    ASSERT_GT(c.gamma_star, c.gamma);
  }
}

TEST(Existence, CertificateExamples) {
  const auto c1 = check_hypotheses(exp_problem(), 1.0 / 27.0, 1.0);
  EXPECT_EQ(c1.conclusion, Conclusion::Exists);
  EXPECT_NEAR(c1.h1.margin, 1.0 - 26.459 / 27.0, 1e-3);
  EXPECT_NEAR(c1.h2.margin, 4.514 - std::exp(1.0), 1e-3);
  EXPECT_EQ(c1.norm_bracket.first, 1.0 / 27.0);
  EXPECT_EQ(c1.norm_bracket.second, 1.0);
  EXPECT_EQ(c1.mode, ExtremumMode::MonotoneEndpoints);
  // e^(1/2) <= gamma / 2, so (H2) holds at r2 = 1/2 as well
  const auto c2 = check_hypotheses(exp_problem(), 1.0 / 27.0, 0.5);
  EXPECT_EQ(c2.conclusion, Conclusion::Exists);
  EXPECT_NEAR(c2.h2.witness_f, std::exp(0.5), 1e-12);
  const auto c3 = check_hypotheses(make_problem(0, 1, 1.5, "t", "0"), 1.0 / 27.0, 1.0);
  EXPECT_EQ(c3.conclusion, Conclusion::NotCertified);
  EXPECT_FALSE(c3.h1.holds);
  // undeclared monotonicity falls back to sampling and reaches the same verdict
  const auto c4 = check_hypotheses(make_problem(0, 1, 1.5, "t", "exp(y)"), 1.0 / 27.0, 1.0);
  EXPECT_EQ(c4.mode, ExtremumMode::Sampled);
  EXPECT_EQ(c4.conclusion, Conclusion::Exists);
  EXPECT_THROW(check_hypotheses(exp_problem(), 1.0, 0.5), ArgumentError);
}

TEST(Existence, SearchRadii) {
  const auto found = search_radii(exp_problem(), 1e-3, 10.0);
  ASSERT_TRUE(found.has_value());
  const auto cert = check_hypotheses(exp_problem(), found->first, found->second);
  EXPECT_EQ(cert.conclusion, Conclusion::Exists);
  EXPECT_LT(found->first, found->second);
  EXPECT_FALSE(search_radii(make_problem(0, 1, 1.5, "t", "0"), 1e-3, 10.0).has_value());
  EXPECT_FALSE(search_radii(make_problem(0, 1, 1.5, "t", "y"), 1e-3, 10.0).has_value());
}

TEST(Existence, SoundnessOfCertificates) {
  // whenever the verdict is exists, (H1) and (H2) are re-verified directly
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ur(1e-3, 2.0);
  const auto p = make_problem(0, 1, 1.5, "t", "ln(2+y)", {true, true, true});
  const auto constants = existence_constants(p);
  int exists = 0;
  for (int i = 0; i < 200; ++i) {
    double r1 = ur(rng), r2 = ur(rng);
    if (r1 > r2) {
      std::swap(r1, r2);
    }
    if (r1 == r2) {
      continue;
    }
    const auto c = check_hypotheses(p, constants, r1, r2);
    if (c.conclusion == Conclusion::Exists) {
      ++exists;
      ASSERT_GE(std::log(2.0), constants.gamma_star * r1);
      ASSERT_LE(std::log(2.0 + r2), constants.gamma * r2);
    }
  }
  EXPECT_GT(exists, 0);
}

TEST(Existence, QScalingLaw) {
  const auto base = existence_constants(exp_problem());
  const auto scaled = existence_constants(exp_problem(0.0, 1.0, "3.7*t"));
  EXPECT_NEAR(scaled.gamma * 3.7 / base.gamma, 1.0, 1e-9);
  EXPECT_NEAR(scaled.gamma_star * 3.7 / base.gamma_star, 1.0, 1e-9);
}

TEST(Existence, TranslationInvariance) {
  const auto base = existence_constants(exp_problem());
  const auto shifted = existence_constants(exp_problem(1.0, 2.0, "t-1"));
  EXPECT_NEAR(shifted.gamma / base.gamma, 1.0, 1e-8);
  EXPECT_NEAR(shifted.gamma_star / base.gamma_star, 1.0, 1e-8);
  EXPECT_NEAR(shifted.lambda - 1.0, base.lambda, 1e-8);
}

TEST(Existence, Cache) {
  ConstantsCache cache;
  const auto first = cache.get(exp_problem());
  const auto second = cache.get(exp_problem());
  EXPECT_EQ(first.gamma, second.gamma);
  EXPECT_EQ(cache.size(), 1u);
  cache.get(exp_problem(0.0, 2.0));
  EXPECT_EQ(cache.size(), 2u);
}

TEST(Existence, RejectsBadData) {
  EXPECT_THROW(existence_constants(make_problem(0, 1, 1.5, "t-0.5", "exp(y)")), HypothesisError);
  EXPECT_THROW(existence_constants(make_problem(0, 1, 1.5, "0", "exp(y)")), HypothesisError);
  EXPECT_THROW(check_hypotheses(make_problem(0, 1, 1.5, "t", "y-1"), 0.5, 2.0), HypothesisError);
}

TEST(Existence, TamperedGammaCoefficientsFailGolden) {
  // gamma carries a factor Gamma(alpha) through G(s, s)
  const double gamma = gamma_constant(exp_problem());
  EXPECT_TRUE(acceptance::gamma_golden_ok(gamma));
  LanczosTable tampered = kLanczosG7;
  tampered.c[1] *= 1.01;
  const double ratio = gamma_fn(1.5, tampered) / gamma_fn(1.5);
  ASSERT_GT(std::fabs(ratio - 1.0), 1e-3);
  EXPECT_FALSE(acceptance::gamma_golden_ok(gamma * ratio));
}

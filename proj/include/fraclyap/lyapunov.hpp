#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "problem.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"

namespace fraclyap {

enum class BoundVariant { Generalized, Corollary, RiemannFractional, Classical };

inline const char* to_string(BoundVariant v) {
  switch (v) {
  case BoundVariant::Generalized:
    return "generalized";
  case BoundVariant::Corollary:
    return "corollary";
  case BoundVariant::RiemannFractional:
    return "riemann_fractional";
  case BoundVariant::Classical:
    return "classical";
  }
  return "unknown";
}

/// Outcome of comparing int |q| against a bound. Near-equality (within
/// quadrature resolution) is never reported as Holds.
enum class InequalityVerdict { Holds, Fails, Indeterminate };

inline const char* to_string(InequalityVerdict v) {
  switch (v) {
  case InequalityVerdict::Holds:
    return "holds";
  case InequalityVerdict::Fails:
    return "fails";
  case InequalityVerdict::Indeterminate:
    return "indeterminate";
  }
  return "unknown";
}

namespace detail {

// 4^(alpha-1) Gamma(alpha) / (b-a)^(alpha-1)
inline double lyapunov_scale(double a, double b, double alpha) {
  return std::pow(4.0 / (b - a), alpha - 1.0) * gamma_fn(alpha);
}

} // namespace detail

/// Gamma(alpha) (4/(b-a))^(alpha-1): the bound for f(y) = y.
inline double riemann_fractional_bound(double a, double b, double alpha) {
  validate_interval(a, b, alpha);
  return detail::lyapunov_scale(a, b, alpha);
}

/// 4/(b-a): the second-order bound.
inline double classical_bound(double a, double b) {
  validate_interval(a, b, 2.0);
  return 4.0 / (b - a);
}

/// 4^(alpha-1) Gamma(alpha) eta / ((b-a)^(alpha-1) f(eta)).
inline double generalized_bound(const Problem& problem, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ArgumentError("generalized_bound: eta must be positive");
  }
  const double f_eta = problem.f(eta);
  if (!(f_eta > 0.0)) {
    std::ostringstream msg;
    msg << "generalized_bound: f(eta) must be positive (f(" << eta << ") = " << f_eta << ")";
    throw HypothesisError(msg.str());
  }
  return detail::lyapunov_scale(problem.a, problem.b, problem.alpha) * eta / f_eta;
}

/// 4^(alpha-1) Gamma(alpha) r1 / ((b-a)^(alpha-1) f(r2)).
inline double corollary_bound(const Problem& problem, double r1, double r2) {
  if (!(r1 > 0.0 && r2 > r1) || !std::isfinite(r2)) {
    std::ostringstream msg;
    msg << "corollary_bound: radii must satisfy 0 < r1 < r2 (got r1=" << r1
        << ", r2=" << r2 << ")";
    throw ArgumentError(msg.str());
  }
  const double f_r2 = problem.f(r2);
  if (!(f_r2 > 0.0)) {
    std::ostringstream msg;
    msg << "corollary_bound: f(r2) must be positive (f(" << r2 << ") = " << f_r2 << ")";
    throw HypothesisError(msg.str());
  }
  return detail::lyapunov_scale(problem.a, problem.b, problem.alpha) * r1 / f_r2;
}

/// Sampled shape check of f on [0, hi]: midpoint concavity on a grid and
/// monotonicity between consecutive grid points.
struct ShapeCheck {
  bool concave = true;
  bool nondecreasing = true;
  double concavity_witness = 0.0;    // midpoint where f(mid) < (f(x)+f(y))/2
  double monotonicity_witness = 0.0; // y_i with f(y_{i+1}) < f(y_i)
  std::size_t samples = 0;
};

inline ShapeCheck check_f_shape(const Expression& f, double hi, std::size_t samples = 1000) {
  if (!(hi > 0.0) || samples < 3) {
    throw ArgumentError("check_f_shape: requires hi > 0 and at least 3 samples");
  }
  ShapeCheck out;
  out.samples = samples;
  std::vector<double> ys(samples);
  std::vector<double> fs(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    ys[i] = hi * static_cast<double>(i) / static_cast<double>(samples - 1);
    fs[i] = f(ys[i]);
  }
  for (std::size_t i = 0; i + 1 < samples; ++i) {
    const double slack = 1e-12 * std::max(1.0, std::fabs(fs[i]));
    if (out.nondecreasing && fs[i + 1] < fs[i] - slack) {
      out.nondecreasing = false;
      out.monotonicity_witness = ys[i];
    }
  }
  // f(y_i) >= (f(y_{i-k}) + f(y_{i+k})) / 2 for spreads k = 1, 2, 4, ...
  for (std::size_t k = 1; 2 * k < samples && out.concave; k *= 2) {
    for (std::size_t i = k; i + k < samples; ++i) {
      const double chord = 0.5 * (fs[i - k] + fs[i + k]);
      if (fs[i] < chord - 1e-12 * std::max(1.0, std::fabs(chord))) {
        out.concave = false;
        out.concavity_witness = ys[i];
        break;
      }
    }
  }
  return out;
}

struct LyapunovReport {
  BoundVariant variant = BoundVariant::Generalized;
  double bound = 0.0;
  double q_l1_norm = 0.0;
  double q_l1_error = 0.0;
  double eta = 0.0;          // eta (generalized) or r1 (corollary)
  InequalityVerdict verdict = InequalityVerdict::Indeterminate;
  bool inequality_holds = false; // verdict == Holds
  double riemann_fractional_reference = 0.0;
  double classical_reference = 0.0; // 4/(b-a); the alpha = 2 reference
  std::optional<ShapeCheck> shape;
  std::vector<std::string> warnings;
};

struct LyapunovOptions {
  QuadratureOptions quadrature{};
  double indeterminate_rel = 1e-9; // |norm - bound| below this (relative) is a tie
  std::size_t shape_samples = 1000;
};

/// int_a^b |q(t)| dt.
inline QuadratureResult q_l1_norm(const Problem& problem, const QuadratureOptions& quad = {}) {
  return integrate([&](double t) { return std::fabs(problem.q(t)); }, problem.a, problem.b,
                   std::span<const double>{}, quad);
}

namespace detail {

inline LyapunovReport compare_with_norm(const Problem& problem, double bound, double eta,
                                        BoundVariant variant, const LyapunovOptions& opts) {
  LyapunovReport r;
  r.variant = variant;
  r.bound = bound;
  r.eta = eta;
  const auto norm = q_l1_norm(problem, opts.quadrature);
  r.q_l1_norm = norm.value;
  r.q_l1_error = norm.error_estimate;
  const double tie = std::max(norm.error_estimate, opts.indeterminate_rel * std::max(1.0, bound));
  if (std::fabs(r.q_l1_norm - bound) <= tie) {
    r.verdict = InequalityVerdict::Indeterminate;
  } else {
    r.verdict = r.q_l1_norm > bound ? InequalityVerdict::Holds : InequalityVerdict::Fails;
  }
  r.inequality_holds = r.verdict == InequalityVerdict::Holds;
  r.riemann_fractional_reference = riemann_fractional_bound(problem.a, problem.b, problem.alpha);
  r.classical_reference = 4.0 / (problem.b - problem.a);
  return r;
}

inline void attach_shape(LyapunovReport& r, const Problem& problem, double hi,
                         const LyapunovOptions& opts) {
  r.shape = check_f_shape(problem.f, hi, opts.shape_samples);
  if (!r.shape->concave) {
    std::ostringstream msg;
    msg << "f fails sampled midpoint concavity near y=" << r.shape->concavity_witness;
    r.warnings.push_back(msg.str());
  }
  if (!r.shape->nondecreasing) {
    std::ostringstream msg;
    msg << "f fails sampled monotonicity near y=" << r.shape->monotonicity_witness;
    r.warnings.push_back(msg.str());
  }
}

} // namespace detail

/// Compares int |q| strictly against generalized_bound(problem, eta). For a
/// genuine nontrivial solution with max y = eta the inequality must hold.
inline LyapunovReport verify_inequality(const Problem& problem, double eta,
                                        const LyapunovOptions& opts = {}) {
  LyapunovReport r = detail::compare_with_norm(problem, generalized_bound(problem, eta), eta,
                                               BoundVariant::Generalized, opts);
  detail::attach_shape(r, problem, eta, opts);
  return r;
}

/// As verify_inequality, with the radii-based bound.
inline LyapunovReport verify_corollary(const Problem& problem, double r1, double r2,
                                       const LyapunovOptions& opts = {}) {
  LyapunovReport r = detail::compare_with_norm(problem, corollary_bound(problem, r1, r2), r1,
                                               BoundVariant::Corollary, opts);
  detail::attach_shape(r, problem, r2, opts);
  return r;
}

} // namespace fraclyap

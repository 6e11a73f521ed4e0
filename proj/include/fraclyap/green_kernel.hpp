#pragma once

#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "problem.hpp"
#include "roots.hpp"
#include "special_functions.hpp"

namespace fraclyap {

/// Geometry of the Green kernel for one (a, b, alpha): the middle third
/// [third_left, third_right] and the crossover root lambda where
/// g1(third_right, s) = g2(third_left, s).
///
/// Immutable after construction; obtain one through solve_lambda().
class KernelGeometry {
public:
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double alpha() const noexcept { return alpha_; }
  double gamma_alpha() const noexcept { return gamma_alpha_; }
  double length() const noexcept { return b_ - a_; }
  double third_left() const noexcept { return third_left_; }
  double third_right() const noexcept { return third_right_; }
  double lambda() const noexcept { return lambda_; }
  /// |g1(third_right, lambda) - g2(third_left, lambda)|
  double lambda_residual() const noexcept { return lambda_residual_; }
  /// Final width of the bisection bracket around lambda.
  double lambda_bracket() const noexcept { return lambda_bracket_; }

  /// Distance from a and b inside which phi is not evaluated.
  double endpoint_guard() const noexcept { return 1e-9 * (b_ - a_); }

  friend KernelGeometry solve_lambda(double a, double b, double alpha);

private:
  KernelGeometry(double a, double b, double alpha)
      : a_(a), b_(b), alpha_(alpha), gamma_alpha_(gamma_fn(alpha)),
        third_left_((2.0 * a + b) / 3.0), third_right_((a + 2.0 * b) / 3.0) {}

  double a_;
  double b_;
  double alpha_;
  double gamma_alpha_;
  double third_left_;
  double third_right_;
  double lambda_ = 0.0;
  double lambda_residual_ = 0.0;
  double lambda_bracket_ = 0.0;
};

namespace detail {

[[noreturn]] inline void kernel_domain(const char* fn, double t, double s) {
  std::ostringstream msg;
  msg.precision(17);
  msg << fn << ": arguments out of domain (t=" << t << ", s=" << s << ")";
  throw ArgumentError(msg.str());
}

// (t-a)^(alpha-1) (b-s)^(alpha-1) / (b-a)^(alpha-1), unscaled by Gamma(alpha)
inline double separable_part(const KernelGeometry& g, double t, double s) {
  return std::pow((t - g.a()) * (g.b() - s) / g.length(), g.alpha() - 1.0);
}

} // namespace detail

/// Branch of G for s <= t.
inline double g1(const KernelGeometry& geom, double t, double s) {
  if (!(geom.a() <= s && s <= t && t <= geom.b())) {
    detail::kernel_domain("g1", t, s);
  }
  const double v =
      detail::separable_part(geom, t, s) - std::pow(t - s, geom.alpha() - 1.0);
  return v / geom.gamma_alpha();
}

/// Branch of G for t <= s.
inline double g2(const KernelGeometry& geom, double t, double s) {
  if (!(geom.a() <= t && t <= s && s <= geom.b())) {
    detail::kernel_domain("g2", t, s);
  }
  return detail::separable_part(geom, t, s) / geom.gamma_alpha();
}

/// Green's function G(t, s) on [a, b]^2.
inline double green(const KernelGeometry& geom, double t, double s) {
  if (!(geom.a() <= t && t <= geom.b() && geom.a() <= s && s <= geom.b())) {
    detail::kernel_domain("green", t, s);
  }
  return s <= t ? g1(geom, t, s) : g2(geom, t, s);
}

/// G(s, s) = ((s-a)(b-s)/(b-a))^(alpha-1) / Gamma(alpha).
inline double green_diag(const KernelGeometry& geom, double s) {
  return green(geom, s, s);
}

struct DiagonalMaximum {
  double s_star;        // (a+b)/2
  double value;         // (b-a)^(alpha-1) / (4^(alpha-1) Gamma(alpha))
  double numeric_s;     // golden-section argmax of G(s,s)
  double numeric_value; // G(numeric_s, numeric_s)
};

/// Maximum of G(s, s): closed form, cross-checked by golden-section search.
inline DiagonalMaximum green_diag_max(const KernelGeometry& geom) {
  DiagonalMaximum m;
  m.s_star = 0.5 * (geom.a() + geom.b());
  m.value = std::pow(geom.length() / 4.0, geom.alpha() - 1.0) / geom.gamma_alpha();
  const auto found = golden_section_maximize(
      [&](double s) { return green_diag(geom, s); }, geom.a(), geom.b(),
      1e-9 * geom.length());
  m.numeric_s = found.x;
  m.numeric_value = found.value;
  return m;
}

/// Builds the geometry for (a, b, alpha) and finds lambda by bisection of
/// h(s) = g1(third_right, s) - g2(third_left, s) on the middle third.
inline KernelGeometry solve_lambda(double a, double b, double alpha) {
  validate_interval(a, b, alpha);
  KernelGeometry geom(a, b, alpha);
  // h is continuous on the closed middle third with h(lo) < 0 < h(hi). For
  // alpha near 1 the root crowds third_right, so the ends are not trimmed.
  const double lo = geom.third_left();
  const double hi = geom.third_right();
  auto h = [&](double s) {
    return g1(geom, geom.third_right(), s) - g2(geom, geom.third_left(), s);
  };
  // at least the 1e-12 target, but never below the local ulp spacing
  const double xtol =
      std::max(1e-12, 8.0 * std::numeric_limits<double>::epsilon() * std::fabs(hi));
  BisectionResult root;
  try {
    root = bisect(h, lo, hi, xtol);
  } catch (const BracketError& err) {
    std::ostringstream msg;
    msg << "kernel geometry: crossover equation has no sign change on the middle third"
        << " (h(lo)=" << err.f_lo() << ", h(hi)=" << err.f_hi() << ")";
    throw BracketError(msg.str(), err.f_lo(), err.f_hi());
  }
  geom.lambda_ = root.root;
  geom.lambda_residual_ = std::fabs(root.f_root);
  geom.lambda_bracket_ = root.width;
  return geom;
}

inline KernelGeometry solve_lambda(const Problem& problem) {
  return solve_lambda(problem.a, problem.b, problem.alpha);
}

/// Minorant phi(s) with min_{t in middle third} G(t, s) >= phi(s) G(s, s).
///
/// For s <= lambda:
///   [ (2(b-a)(b-s)/3)^(alpha-1) - (b-a)^(alpha-1) (third_right - s)^(alpha-1) ]
///     / ((s-a)(b-s))^(alpha-1)
/// for s >= lambda:
///   ((b-a) / (3(s-a)))^(alpha-1).
inline double phi(const KernelGeometry& geom, double s) {
  const double a = geom.a();
  const double b = geom.b();
  if (!(s > a + geom.endpoint_guard() && s < b - geom.endpoint_guard())) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "phi: s must lie strictly inside (a, b) (s=" << s << ")";
    throw ArgumentError(msg.str());
  }
  const double e = geom.alpha() - 1.0;
  const double len = geom.length();
  if (s <= geom.lambda()) {
    const double num = std::pow(2.0 * len * (b - s) / 3.0, e) -
                       std::pow(len, e) * std::pow(geom.third_right() - s, e);
    return num / std::pow((s - a) * (b - s), e);
  }
  return std::pow(len / (3.0 * (s - a)), e);
}

} // namespace fraclyap

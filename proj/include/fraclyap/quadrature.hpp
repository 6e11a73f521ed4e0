#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "errors.hpp"

namespace fraclyap {

// Gauss-Kronrod pairs, abscissae on [-1, 1] listed as the non-negative half
// (descending, the centre last). `gauss` is zero at Kronrod-only nodes.
// Constants from QUADPACK (qk15, qk21).

struct GaussKronrod15 {
  static constexpr std::size_t kHalf = 8;
  static constexpr std::array<double, kHalf> kNodes = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.0};
  static constexpr std::array<double, kHalf> kKronrod = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, kHalf> kGauss = {
      0.0, 0.129484966168869693270611432679082,
      0.0, 0.279705391489276667901467771423780,
      0.0, 0.381830050505118944950369775488975,
      0.0, 0.417959183673469387755102040816327};
};

struct GaussKronrod21 {
  static constexpr std::size_t kHalf = 11;
  static constexpr std::array<double, kHalf> kNodes = {
      0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
      0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
      0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
      0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
      0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
      0.0};
  static constexpr std::array<double, kHalf> kKronrod = {
      0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
      0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
      0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
      0.123491976262065851077208292238880, 0.134709217311473325928054001771707,
      0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
      0.149445554002916905664936468389821};
  static constexpr std::array<double, kHalf> kGauss = {
      0.0, 0.066671344308688137593568809893332,
      0.0, 0.149451349150580593145776339657697,
      0.0, 0.219086362515982043995534934228163,
      0.0, 0.269266719309996355091226921569469,
      0.0, 0.295524224714752870173892994651338,
      0.0};
};

enum class QuadratureRule { GK15, GK21 };

/// One point of a rule mapped onto [0, 1].
struct UnitRulePoint {
  double u;
  double kronrod_weight;
  double gauss_weight;
};

/// The full (2*kHalf - 1)-point rule on [0, 1], weights summing to 1.
template <class Rule>
std::vector<UnitRulePoint> unit_rule_points() {
  std::vector<UnitRulePoint> pts;
  for (std::size_t i = 0; i + 1 < Rule::kHalf; ++i) {
    pts.push_back({0.5 * (1.0 - Rule::kNodes[i]), 0.5 * Rule::kKronrod[i],
                   0.5 * Rule::kGauss[i]});
  }
  pts.push_back({0.5, 0.5 * Rule::kKronrod[Rule::kHalf - 1],
                 0.5 * Rule::kGauss[Rule::kHalf - 1]});
  for (std::size_t i = Rule::kHalf - 1; i-- > 0;) {
    pts.push_back({0.5 * (1.0 + Rule::kNodes[i]), 0.5 * Rule::kKronrod[i],
                   0.5 * Rule::kGauss[i]});
  }
  return pts;
}

struct QuadratureOptions {
  double abs_tol = 1e-10;
  std::size_t max_subdivisions = 5000;
  QuadratureRule rule = QuadratureRule::GK15;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t subdivisions = 0;
};

namespace detail {

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  double abs_value; // integral of |fn|, for the roundoff floor

  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class Rule, class Fn>
Panel eval_panel(const Fn& fn, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double kron = 0.0;
  double gauss = 0.0;
  double absk = 0.0;
  auto take = [&](double x, std::size_t i) {
    const double v = fn(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "integrand is not finite at " << x;
      throw QuadratureError(msg.str(), std::numeric_limits<double>::quiet_NaN(), 0);
    }
    kron += Rule::kKronrod[i] * v;
    gauss += Rule::kGauss[i] * v;
    absk += Rule::kKronrod[i] * std::fabs(v);
  };
  for (std::size_t i = 0; i + 1 < Rule::kHalf; ++i) {
    const double dx = half * Rule::kNodes[i];
    take(centre - dx, i);
    take(centre + dx, i);
  }
  take(centre, Rule::kHalf - 1);
  return {lo, hi, kron * half, std::fabs((kron - gauss) * half), absk * std::fabs(half)};
}

template <class Rule, class Fn>
QuadratureResult integrate_impl(const Fn& fn, double lo, double hi,
                                std::span<const double> breakpoints,
                                const QuadratureOptions& opts) {
  std::vector<double> cuts{lo};
  for (double bp : breakpoints) {
    if (bp > lo && bp < hi) {
      cuts.push_back(bp);
    }
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> heap;
  double value = 0.0;
  double error = 0.0;
  double abs_value = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = eval_panel<Rule>(fn, cuts[i], cuts[i + 1]);
    value += p.value;
    error += p.error;
    abs_value += p.abs_value;
    heap.push(p);
  }
  std::size_t subdivisions = heap.size();

  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto done = [&] { return error <= std::max(opts.abs_tol, 50.0 * eps * abs_value); };

  while (!done()) {
    if (subdivisions >= opts.max_subdivisions) {
      std::ostringstream msg;
      msg << "quadrature: tolerance " << opts.abs_tol << " not reached within "
          << opts.max_subdivisions << " panels (estimate " << value << ", error "
          << error << ")";
      throw QuadratureError(msg.str(), value, subdivisions);
    }
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      std::ostringstream msg;
      msg << "quadrature: panel [" << worst.lo << ", " << worst.hi
          << "] cannot be split further (estimate " << value << ", error " << error << ")";
      throw QuadratureError(msg.str(), value, subdivisions);
    }
    heap.pop();
    Panel left = eval_panel<Rule>(fn, worst.lo, mid);
    Panel right = eval_panel<Rule>(fn, mid, worst.hi);
    value += left.value + right.value - worst.value;
    abs_value += left.abs_value + right.abs_value - worst.abs_value;
    // running sum; clamped against rounding drift
    error = std::max(0.0, error + left.error + right.error - worst.error);
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  return {value, error, subdivisions};
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of fn over [lo, hi]. Initial panels are
/// split at the interior `breakpoints`; the panel with the largest |K - G|
/// error estimate is bisected until the summed estimate is <= abs_tol (or
/// down to the roundoff floor of the rule).
template <class Fn>
QuadratureResult integrate(const Fn& fn, double lo, double hi,
                           std::span<const double> breakpoints,
                           const QuadratureOptions& opts = {}) {
  if (!(lo < hi)) {
    throw ArgumentError("integrate: requires lo < hi");
  }
  if (!(opts.abs_tol > 0.0)) {
    throw ArgumentError("integrate: abs_tol must be positive");
  }
  switch (opts.rule) {
  case QuadratureRule::GK21:
    return detail::integrate_impl<GaussKronrod21>(fn, lo, hi, breakpoints, opts);
  case QuadratureRule::GK15:
  default:
    return detail::integrate_impl<GaussKronrod15>(fn, lo, hi, breakpoints, opts);
  }
}

template <class Fn>
QuadratureResult integrate(const Fn& fn, double lo, double hi,
                           std::span<const double> breakpoints, double abs_tol) {
  QuadratureOptions opts;
  opts.abs_tol = abs_tol;
  return integrate(fn, lo, hi, breakpoints, opts);
}

template <class Fn>
QuadratureResult integrate(const Fn& fn, double lo, double hi, double abs_tol = 1e-10) {
  return integrate(fn, lo, hi, std::span<const double>{}, abs_tol);
}

} // namespace fraclyap

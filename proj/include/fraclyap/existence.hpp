#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "green_kernel.hpp"
#include "problem.hpp"
#include "quadrature.hpp"

namespace fraclyap {

struct ExistenceOptions {
  QuadratureOptions quadrature{};        // abs_tol 1e-10 for constants
  std::size_t q_samples = 1001;          // sampled q >= 0 check
  std::size_t f_samples = 10000;         // extrema of f on [0, r]
  std::size_t radii_per_decade = 200;    // search_radii grid density
};

/// gamma = 1 / int_a^b G(s,s) q(s) ds,
/// gamma_star = 1 / int_{middle third} G(s,s) phi(s) q(s) ds.
struct ExistenceConstants {
  double gamma = 0.0;
  double gamma_star = 0.0;
  double integral = 0.0;
  double integral_star = 0.0;
  double integral_error = 0.0;
  double integral_star_error = 0.0;
  double lambda = 0.0;
};

namespace detail {

inline void require_nonnegative_q(const Problem& problem, std::size_t samples) {
  const SignVerdict v = check_nonnegative_on(problem.q, problem.a, problem.b, samples);
  if (v.status == SignVerdict::Status::EvaluationError) {
    throw DomainError("q: " + v.message);
  }
  if (v.status == SignVerdict::Status::Violated) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "q must be nonnegative on [a, b]; q(" << v.x << ") = " << v.value << " ("
        << SignVerdict::kMode << ")";
    throw HypothesisError(msg.str());
  }
}

inline double reciprocal_or_throw(double integral, const char* what) {
  if (!(integral > 0.0)) {
    std::ostringstream msg;
    msg << what << " integral is " << integral << "; q is trivial on the interval";
    throw HypothesisError(msg.str());
  }
  return 1.0 / integral;
}

} // namespace detail

inline double gamma_integral(const Problem& problem, const KernelGeometry& geom,
                             const QuadratureOptions& quad, double* error = nullptr) {
  const auto r = integrate(
      [&](double s) { return green_diag(geom, s) * problem.q(s); }, geom.a(), geom.b(),
      std::span<const double>{}, quad);
  if (error) {
    *error = r.error_estimate;
  }
  return r.value;
}

inline double gamma_star_integral(const Problem& problem, const KernelGeometry& geom,
                                  const QuadratureOptions& quad, double* error = nullptr) {
  const std::array<double, 1> kink{geom.lambda()};
  const auto r = integrate(
      [&](double s) { return green_diag(geom, s) * phi(geom, s) * problem.q(s); },
      geom.third_left(), geom.third_right(), kink, quad);
  if (error) {
    *error = r.error_estimate;
  }
  return r.value;
}

inline ExistenceConstants existence_constants(const Problem& problem,
                                              const ExistenceOptions& opts = {}) {
  detail::require_nonnegative_q(problem, opts.q_samples);
  const KernelGeometry geom = solve_lambda(problem);
  ExistenceConstants c;
  c.lambda = geom.lambda();
  c.integral = gamma_integral(problem, geom, opts.quadrature, &c.integral_error);
  c.integral_star = gamma_star_integral(problem, geom, opts.quadrature, &c.integral_star_error);
  c.gamma = detail::reciprocal_or_throw(c.integral, "gamma");
  c.gamma_star = detail::reciprocal_or_throw(c.integral_star, "gamma_star");
  return c;
}

inline double gamma_constant(const Problem& problem, const ExistenceOptions& opts = {}) {
  detail::require_nonnegative_q(problem, opts.q_samples);
  const KernelGeometry geom = solve_lambda(problem);
  return detail::reciprocal_or_throw(gamma_integral(problem, geom, opts.quadrature), "gamma");
}

inline double gamma_star_constant(const Problem& problem, const ExistenceOptions& opts = {}) {
  detail::require_nonnegative_q(problem, opts.q_samples);
  const KernelGeometry geom = solve_lambda(problem);
  return detail::reciprocal_or_throw(gamma_star_integral(problem, geom, opts.quadrature),
                                     "gamma_star");
}

/// Per-problem memo of existence_constants. Concurrent lookups take a shared
/// lock; insertion takes the exclusive lock.
class ConstantsCache {
public:
  ExistenceConstants get(const Problem& problem, const ExistenceOptions& opts = {}) {
    const std::string key = make_key(problem, opts);
    {
      std::shared_lock lock(mutex_);
      if (auto it = table_.find(key); it != table_.end()) {
        return it->second;
      }
    }
    ExistenceConstants c = existence_constants(problem, opts);
    std::unique_lock lock(mutex_);
    return table_.emplace(key, c).first->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return table_.size();
  }

private:
  static std::string bits(double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof u);
    return std::to_string(u);
  }

  static std::string make_key(const Problem& p, const ExistenceOptions& o) {
    return bits(p.a) + ':' + bits(p.b) + ':' + bits(p.alpha) + ':' + p.q.print() + ':' +
           bits(o.quadrature.abs_tol) + ':' +
           std::to_string(static_cast<int>(o.quadrature.rule));
  }

  mutable std::shared_mutex mutex_;
  std::map<std::string, ExistenceConstants> table_;
};

enum class ExtremumMode { Sampled, MonotoneEndpoints };

inline const char* to_string(ExtremumMode m) {
  return m == ExtremumMode::Sampled ? "sampled, not proven" : "exact (declared nondecreasing)";
}

/// Verdict for one of (H1) / (H2) with the point that decided it.
struct HypothesisVerdict {
  bool holds = false;
  double witness_y = 0.0; // argmin (H1) or argmax (H2) of f
  double witness_f = 0.0; // f(witness_y)
  double threshold = 0.0; // gamma_star * r1 (H1) or gamma * r2 (H2)
  double margin = 0.0;    // f_min - threshold (H1) or threshold - f_max (H2)
};

enum class Conclusion { Exists, NotCertified };

inline const char* to_string(Conclusion c) {
  return c == Conclusion::Exists ? "exists" : "not-certified";
}

struct ExistenceCertificate {
  double gamma = 0.0;
  double gamma_star = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  HypothesisVerdict h1;
  HypothesisVerdict h2;
  ExtremumMode mode = ExtremumMode::Sampled;
  std::size_t samples = 0;
  Conclusion conclusion = Conclusion::NotCertified;
  /// When conclusion == Exists, a solution with r1 <= ||y|| <= r2 exists.
  std::pair<double, double> norm_bracket{0.0, 0.0};
  std::vector<std::string> warnings;
};

namespace detail {

struct Extremum {
  double y;
  double f;
};

// min (find_max=false) or max of f over [0, r]; also rejects f < 0.
inline Extremum f_extremum(const Problem& problem, double r, bool find_max,
                           ExtremumMode mode, std::size_t samples) {
  auto eval = [&](double y) {
    const double v = problem.f(y);
    if (v < 0.0) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "f must be nonnegative on [0, " << r << "]; f(" << y << ") = " << v;
      throw HypothesisError(msg.str());
    }
    return v;
  };
  if (mode == ExtremumMode::MonotoneEndpoints) {
    const double y = find_max ? r : 0.0;
    return {y, eval(y)};
  }
  Extremum best{0.0, eval(0.0)};
  for (std::size_t i = 1; i < samples; ++i) {
    const double y = i + 1 == samples
                         ? r
                         : r * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double v = eval(y);
    if (find_max ? v > best.f : v < best.f) {
      best = {y, v};
    }
  }
  return best;
}

inline HypothesisVerdict check_h1(const Problem& p, double gamma_star, double r1,
                                  ExtremumMode mode, std::size_t samples) {
  const Extremum m = f_extremum(p, r1, false, mode, samples);
  HypothesisVerdict v;
  v.threshold = gamma_star * r1;
  v.witness_y = m.y;
  v.witness_f = m.f;
  v.margin = m.f - v.threshold;
  v.holds = m.f >= v.threshold;
  return v;
}

inline HypothesisVerdict check_h2(const Problem& p, double gamma, double r2,
                                  ExtremumMode mode, std::size_t samples) {
  const Extremum m = f_extremum(p, r2, true, mode, samples);
  HypothesisVerdict v;
  v.threshold = gamma * r2;
  v.witness_y = m.y;
  v.witness_f = m.f;
  v.margin = v.threshold - m.f;
  v.holds = m.f <= v.threshold;
  return v;
}

} // namespace detail

/// Checks (H1): f >= gamma_star r1 on [0, r1] and (H2): f <= gamma r2 on
/// [0, r2]. Both holding certifies a positive solution with
/// r1 <= ||y|| <= r2.
inline ExistenceCertificate check_hypotheses(const Problem& problem,
                                             const ExistenceConstants& constants, double r1,
                                             double r2, const ExistenceOptions& opts = {}) {
  if (!(r1 > 0.0 && r2 > r1) || !std::isfinite(r2)) {
    std::ostringstream msg;
    msg << "radii must satisfy 0 < r1 < r2 (got r1=" << r1 << ", r2=" << r2 << ")";
    throw ArgumentError(msg.str());
  }
  ExistenceCertificate cert;
  cert.gamma = constants.gamma;
  cert.gamma_star = constants.gamma_star;
  cert.r1 = r1;
  cert.r2 = r2;
  cert.mode = problem.declares.f_nondecreasing ? ExtremumMode::MonotoneEndpoints
                                               : ExtremumMode::Sampled;
  cert.samples = cert.mode == ExtremumMode::Sampled ? opts.f_samples : 2;
  cert.h1 = detail::check_h1(problem, constants.gamma_star, r1, cert.mode, opts.f_samples);
  cert.h2 = detail::check_h2(problem, constants.gamma, r2, cert.mode, opts.f_samples);
  cert.conclusion = cert.h1.holds && cert.h2.holds ? Conclusion::Exists
                                                   : Conclusion::NotCertified;
  cert.norm_bracket = {r1, r2};
  if (!(constants.gamma_star > constants.gamma)) {
    std::ostringstream msg;
    msg << "gamma_star (" << constants.gamma_star << ") does not exceed gamma ("
        << constants.gamma << ")";
    cert.warnings.push_back(msg.str());
  }
  return cert;
}

inline ExistenceCertificate check_hypotheses(const Problem& problem, double r1, double r2,
                                             const ExistenceOptions& opts = {}) {
  if (!(r1 > 0.0 && r2 > r1)) {
    std::ostringstream msg;
    msg << "radii must satisfy 0 < r1 < r2 (got r1=" << r1 << ", r2=" << r2 << ")";
    throw ArgumentError(msg.str());
  }
  return check_hypotheses(problem, existence_constants(problem, opts), r1, r2, opts);
}

/// Log-spaced scan of [r_min, r_max] for the smallest r1 satisfying (H1) and
/// then the smallest r2 > r1 satisfying (H2).
inline std::optional<std::pair<double, double>>
search_radii(const Problem& problem, const ExistenceConstants& constants, double r_min,
             double r_max, const ExistenceOptions& opts = {}) {
  if (!(r_min > 0.0 && r_max > r_min) || !std::isfinite(r_max)) {
    throw ArgumentError("search_radii: requires 0 < r_min < r_max");
  }
  const ExtremumMode mode = problem.declares.f_nondecreasing
                                ? ExtremumMode::MonotoneEndpoints
                                : ExtremumMode::Sampled;
  const double decades = std::log10(r_max / r_min);
  const auto count = static_cast<std::size_t>(
      std::ceil(decades * static_cast<double>(opts.radii_per_decade))) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = i + 1 == count
                  ? r_max
                  : r_min * std::pow(10.0, decades * static_cast<double>(i) /
                                               static_cast<double>(count - 1));
  }

  std::size_t i1 = 0;
  while (i1 < count &&
         !detail::check_h1(problem, constants.gamma_star, grid[i1], mode, opts.f_samples)
              .holds) {
    ++i1;
  }
  if (i1 == count) {
    return std::nullopt;
  }
  for (std::size_t i2 = i1 + 1; i2 < count; ++i2) {
    if (detail::check_h2(problem, constants.gamma, grid[i2], mode, opts.f_samples).holds) {
      return std::pair{grid[i1], grid[i2]};
    }
  }
  return std::nullopt;
}

inline std::optional<std::pair<double, double>>
search_radii(const Problem& problem, double r_min, double r_max,
             const ExistenceOptions& opts = {}) {
  return search_radii(problem, existence_constants(problem, opts), r_min, r_max, opts);
}

} // namespace fraclyap

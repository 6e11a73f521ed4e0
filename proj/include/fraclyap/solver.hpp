#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <locale>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "green_kernel.hpp"
#include "problem.hpp"
#include "quadrature.hpp"

namespace fraclyap {

enum class SolveStatus { Converged, MaxIterations, Diverged };

inline const char* to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::Converged:
    return "converged";
  case SolveStatus::MaxIterations:
    return "max-iterations";
  case SolveStatus::Diverged:
    return "diverged";
  }
  return "unknown";
}

/// Solution values on the uniform grid t_i = a + i (b-a)/n, i = 0..n.
struct SolutionGrid {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> nodes;
  std::vector<double> values;
  double eta = 0.0; // max of values
  std::size_t iterations = 0;
  double last_delta = 0.0; // sup-norm change of the final sweep
  SolveStatus status = SolveStatus::Converged;
  double damping = 1.0;    // damping in effect at the end
  std::optional<double> gl_residual;
  std::vector<std::string> warnings;

  std::size_t intervals() const noexcept { return nodes.empty() ? 0 : nodes.size() - 1; }
  double step() const noexcept { return (b - a) / static_cast<double>(intervals()); }

  /// Piecewise-linear interpolant of the node values.
  double interpolate(double s) const {
    const double h = step();
    const auto n = intervals();
    double pos = (s - a) / h;
    if (pos <= 0.0) {
      return values.front();
    }
    if (pos >= static_cast<double>(n)) {
      return values.back();
    }
    const auto j = std::min(static_cast<std::size_t>(pos), n - 1);
    const double u = pos - static_cast<double>(j);
    return values[j] + u * (values[j + 1] - values[j]);
  }
};

/// The zero function on n uniform intervals of [a, b].
inline SolutionGrid zero_grid(double a, double b, std::size_t n) {
  if (n < 1 || !(a < b)) {
    throw ArgumentError("zero_grid: needs a < b and n >= 1");
  }
  SolutionGrid g;
  g.a = a;
  g.b = b;
  g.nodes.resize(n + 1);
  g.values.assign(n + 1, 0.0);
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    g.nodes[i] = a + h * static_cast<double>(i);
  }
  g.nodes[n] = b;
  return g;
}

inline void refresh_eta(SolutionGrid& g) {
  g.eta = g.values.empty() ? 0.0 : *std::max_element(g.values.begin(), g.values.end());
}

struct SolverOptions {
  std::size_t n = 512;
  double tol = 1e-8;
  std::size_t max_iter = 500;
  double damping = 1.0;
  double quad_tol = 1e-8; // per-node absolute accuracy of T y
  bool auto_damping = true;
  bool require_nonnegative_q = false; // existence mode
  std::optional<std::pair<double, double>> radii; // bracket r1 <= eta <= r2
  double divergence_cap = 1e6;
};

/// Discretised operator  (T y)(t_i) = int_a^b G(t_i, s) q(s) f(y^(s)) ds,
/// y^ the piecewise-linear interpolant of the node values.
///
/// G splits as [ ((t-a)/(b-a))^(alpha-1) (b-s)^(alpha-1) - (t-s)_+^(alpha-1) ] / Gamma(alpha),
/// so with R(i) = int_a^{t_i} (t_i - s)^(alpha-1) w(s) ds and t_n = b,
///   (T y)(t_i) = [ ((t_i-a)/(b-a))^(alpha-1) R(n) - R(i) ] / Gamma(alpha).
/// Every node is a breakpoint. On panel [t_j, t_{j+1}] with m = i - j >= 2 the
/// kernel h^(alpha-1) (m - u)^(alpha-1) is smooth and a fixed Gauss-Kronrod
/// rule (tabulated once per grid) is used; the panel m = 1 carries the
/// endpoint singularity and is integrated adaptively. If the summed |K - G|
/// estimate at a node exceeds its share of quad_tol, that node falls back to
/// direct adaptive integration of G(t_i, .) q f(y^).
class PicardOperator {
public:
  PicardOperator(const Problem& problem, std::size_t n, const SolverOptions& opts = {})
      : problem_(problem), geom_(solve_lambda(problem)), n_(n), opts_(opts),
        rule_(unit_rule_points<GaussKronrod15>()) {
    if (n_ < 2) {
      throw ArgumentError("PicardOperator: n must be at least 2");
    }
    h_ = (problem.b - problem.a) / static_cast<double>(n_);
    const double e = problem.alpha - 1.0;
    const std::size_t K = rule_.size();
    const double scale = std::pow(h_, problem.alpha);
    kron_.assign((n_ + 1) * K, 0.0);
    diff_.assign((n_ + 1) * K, 0.0);
    for (std::size_t m = 2; m <= n_; ++m) {
      for (std::size_t k = 0; k < K; ++k) {
        const double ker = scale * std::pow(static_cast<double>(m) - rule_[k].u, e);
        kron_[m * K + k] = ker * rule_[k].kronrod_weight;
        diff_[m * K + k] = ker * (rule_[k].kronrod_weight - rule_[k].gauss_weight);
      }
    }
    q_at_rule_.resize(n_ * K);
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t k = 0; k < K; ++k) {
        const double s = node(j) + rule_[k].u * h_;
        const double qv = problem_.q(s);
        if (opts_.require_nonnegative_q && qv < 0.0) {
          std::ostringstream msg;
          msg.precision(17);
          msg << "q must be nonnegative in existence mode; q(" << s << ") = " << qv;
          throw HypothesisError(msg.str());
        }
        q_at_rule_[j * K + k] = qv;
      }
    }
    node_scale_.resize(n_ + 1);
    for (std::size_t i = 0; i <= n_; ++i) {
      node_scale_[i] = std::pow(static_cast<double>(i) / static_cast<double>(n_), e);
    }
  }

  std::size_t intervals() const noexcept { return n_; }
  const KernelGeometry& geometry() const noexcept { return geom_; }
  const Problem& problem() const noexcept { return problem_; }

  double node(std::size_t i) const {
    return i == n_ ? problem_.b : problem_.a + h_ * static_cast<double>(i);
  }

  /// Number of nodes handled by the direct adaptive fallback in the last apply().
  std::size_t fallback_nodes() const noexcept { return fallback_nodes_; }

  /// Values of T y at the nodes; endpoints are 0.
  std::vector<double> apply(const std::vector<double>& y) {
    if (y.size() != n_ + 1) {
      throw ArgumentError("PicardOperator::apply: grid size mismatch");
    }
    const std::size_t K = rule_.size();
    const double e = problem_.alpha - 1.0;

    // w(s) = q(s) f(y^(s)) at every rule point
    w_.resize(n_ * K);
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t k = 0; k < K; ++k) {
        const double yv = y[j] + rule_[k].u * (y[j + 1] - y[j]);
        w_[j * K + k] = q_at_rule_[j * K + k] * problem_.f(yv);
      }
    }

    // Singular panel: S(j) = int_{t_j}^{t_{j+1}} (t_{j+1} - s)^(alpha-1) w(s) ds
    const double tol_share = 0.25 * opts_.quad_tol * geom_.gamma_alpha();
    singular_.resize(n_);
    singular_err_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const double lo = node(j);
      const double hi = node(j + 1);
      const double y0 = y[j];
      const double slope = (y[j + 1] - y[j]) / (hi - lo);
      auto integrand = [&](double s) {
        return std::pow(hi - s, e) * problem_.q(s) * problem_.f(y0 + slope * (s - lo));
      };
      QuadratureOptions qo;
      qo.abs_tol = tol_share;
      const auto r = integrate(integrand, lo, hi, std::span<const double>{}, qo);
      singular_[j] = r.value;
      singular_err_[j] = r.error_estimate;
    }

    // R(i) and its |K - G| estimate
    std::vector<double> R(n_ + 1, 0.0);
    std::vector<double> R_err(n_ + 1, 0.0);
    for (std::size_t i = 1; i <= n_; ++i) {
      double sum = singular_[i - 1];
      double err = singular_err_[i - 1];
      for (std::size_t j = 0; j + 1 < i; ++j) {
        const std::size_t m = i - j;
        const double* kw = &kron_[m * K];
        const double* dw = &diff_[m * K];
        const double* wv = &w_[j * K];
        double panel = 0.0;
        double diff = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          panel += kw[k] * wv[k];
          diff += dw[k] * wv[k];
        }
        sum += panel;
        err += std::fabs(diff);
      }
      R[i] = sum;
      R_err[i] = err;
    }

    std::vector<double> out(n_ + 1, 0.0);
    fallback_nodes_ = 0;
    const double budget = opts_.quad_tol * geom_.gamma_alpha();
    SolutionGrid current;
    bool have_current = false;
    for (std::size_t i = 1; i < n_; ++i) {
      const double err = node_scale_[i] * R_err[n_] + R_err[i];
      if (err <= budget) {
        out[i] = (node_scale_[i] * R[n_] - R[i]) / geom_.gamma_alpha();
      } else {
        if (!have_current) {
          current = grid_from(y);
          have_current = true;
        }
        out[i] = direct_node_value(problem_, geom_, current, node(i), opts_.quad_tol);
        ++fallback_nodes_;
      }
    }
    return out;
  }

  /// One T y at t by direct adaptive quadrature with breakpoint t; the
  /// straightforward reading of the integral equation.
  static double direct_node_value(const Problem& problem, const KernelGeometry& geom,
                                  const SolutionGrid& y, double t, double abs_tol) {
    const std::array<double, 1> kink{t};
    QuadratureOptions qo;
    qo.abs_tol = abs_tol;
    qo.max_subdivisions = 20000;
    return integrate(
               [&](double s) {
                 return green(geom, t, s) * problem.q(s) * problem.f(y.interpolate(s));
               },
               problem.a, problem.b, kink, qo)
        .value;
  }

private:
  SolutionGrid grid_from(const std::vector<double>& y) const {
    SolutionGrid g = zero_grid(problem_.a, problem_.b, n_);
    g.values = y;
    return g;
  }

  Problem problem_;
  KernelGeometry geom_;
  std::size_t n_;
  SolverOptions opts_;
  std::vector<UnitRulePoint> rule_;
  double h_ = 0.0;
  std::vector<double> kron_;
  std::vector<double> diff_;
  std::vector<double> q_at_rule_;
  std::vector<double> node_scale_;
  std::vector<double> w_;
  std::vector<double> singular_;
  std::vector<double> singular_err_;
  std::size_t fallback_nodes_ = 0;
};

namespace detail {

// Values within quad_tol below zero are rounding; project them onto the cone.
inline void project_to_cone(std::vector<double>& v, double slack) {
  for (double& x : v) {
    if (x < 0.0 && x >= -slack) {
      x = 0.0;
    }
  }
}

} // namespace detail

/// One application of T to y (same grid); endpoints forced to 0.
inline SolutionGrid picard_step(const Problem& problem, const SolutionGrid& y,
                                const SolverOptions& opts = {}) {
  PicardOperator op(problem, y.intervals(), opts);
  SolutionGrid out = y;
  out.values = op.apply(y.values);
  detail::project_to_cone(out.values, opts.quad_tol);
  out.values.front() = 0.0;
  out.values.back() = 0.0;
  refresh_eta(out);
  out.iterations = y.iterations + 1;
  double delta = 0.0;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    delta = std::max(delta, std::fabs(out.values[i] - y.values[i]));
  }
  out.last_delta = delta;
  out.gl_residual.reset();
  return out;
}

/// Damped Picard iteration y <- (1-d) y + d T y from y = 0.
///
/// Stops when the sup-norm change drops below tol. With auto_damping, an
/// oscillating change sequence switches d from 1 to 0.5. Non-convergence is
/// reported in `status`; the best iterate is returned either way.
inline SolutionGrid picard_solve(const Problem& problem, const SolverOptions& opts = {}) {
  if (opts.n < 16) {
    throw ArgumentError("picard_solve: n must be at least 16");
  }
  if (!(opts.tol > 0.0)) {
    throw ArgumentError("picard_solve: tol must be positive");
  }
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw ArgumentError("picard_solve: damping must lie in (0, 1]");
  }
  PicardOperator op(problem, opts.n, opts);
  SolutionGrid sol = zero_grid(problem.a, problem.b, opts.n);
  sol.damping = opts.damping;
  sol.status = SolveStatus::MaxIterations;

  double cap = opts.divergence_cap;
  if (opts.radii) {
    cap = std::min(cap, 10.0 * opts.radii->second);
  }

  std::vector<double> deltas;
  std::vector<double> next(sol.values.size());
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    const std::vector<double> ty = op.apply(sol.values);
    double delta = 0.0;
    double sup = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = (1.0 - sol.damping) * sol.values[i] + sol.damping * ty[i];
    }
    detail::project_to_cone(next, opts.quad_tol);
    next.front() = 0.0;
    next.back() = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      delta = std::max(delta, std::fabs(next[i] - sol.values[i]));
      sup = std::max(sup, std::fabs(next[i]));
    }
    sol.values.swap(next);
    sol.iterations = it;
    sol.last_delta = delta;
    deltas.push_back(delta);

    if (!std::isfinite(sup) || sup > cap) {
      sol.status = SolveStatus::Diverged;
      std::ostringstream msg;
      msg << "iteration diverged: sup-norm " << sup << " exceeds " << cap << " at sweep " << it;
      sol.warnings.push_back(msg.str());
      break;
    }
    if (delta < opts.tol) {
      sol.status = SolveStatus::Converged;
      break;
    }
    if (opts.auto_damping && sol.damping == 1.0 && deltas.size() >= 4) {
      const std::size_t k = deltas.size() - 1;
      const double d1 = deltas[k] - deltas[k - 1];
      const double d2 = deltas[k - 1] - deltas[k - 2];
      const double d3 = deltas[k - 2] - deltas[k - 3];
      const bool alternating = d1 * d2 < 0.0 && d2 * d3 < 0.0;
      const bool stalled = deltas[k] > 0.9 * deltas[k - 2];
      if (alternating && stalled) {
        sol.damping = 0.5;
        sol.warnings.push_back("oscillation detected; damping reduced to 0.5 at sweep " +
                               std::to_string(it));
      }
    }
  }
  if (sol.status == SolveStatus::MaxIterations) {
    std::ostringstream msg;
    msg << "no convergence within " << opts.max_iter << " sweeps (last change "
        << sol.last_delta << ")";
    sol.warnings.push_back(msg.str());
  }

  refresh_eta(sol);
  for (double v : sol.values) {
    if (v < 0.0) {
      sol.warnings.push_back("solution leaves the cone of nonnegative functions");
      break;
    }
  }
  if (opts.radii && sol.status == SolveStatus::Converged) {
    // the grid maximum can miss the true maximum by up to one node-to-node change
    double slack = 0.0;
    for (std::size_t i = 0; i + 1 < sol.values.size(); ++i) {
      slack = std::max(slack, std::fabs(sol.values[i + 1] - sol.values[i]));
    }
    const auto [r1, r2] = *opts.radii;
    if (sol.eta + slack < r1 || sol.eta - slack > r2) {
      std::ostringstream msg;
      msg << "eta = " << sol.eta << " lies outside the certified bracket [" << r1 << ", " << r2
          << "]";
      sol.warnings.push_back(msg.str());
    }
  }
  return sol;
}

/// Residual check with the Grunwald-Letnikov scheme,
///   D^alpha y(t_i) ~ h^-alpha sum_{k=0}^{i} w_k y(t_{i-k}),
///   w_0 = 1, w_k = w_{k-1} (k - 1 - alpha) / k,
/// as max |D^alpha y + q f(y)| over nodes outside the boundary layers.
struct GlResidual {
  double value = 0.0;
  double at = 0.0;          // node of the maximum
  double left_layer = 0.0;  // excluded width at a
  double right_layer = 0.0; // excluded width at b
  /// Largest floating-point error bound of the evaluated GL sums,
  /// h^-alpha (i+1) eps sum |w_k y_{i-k}|. Residuals below it are zero to
  /// working precision.
  double roundoff_floor = 0.0;
};

/// Excluded left layer as a fraction of b - a. GL loses accuracy like
/// h / (t-a)^2 for y ~ (t-a)^(alpha-1), so a layer of a fixed number of steps
/// does not shrink the residual under refinement.
inline constexpr double kGlLeftLayerFraction = 0.1;

inline GlResidual gl_residual(const Problem& problem, const SolutionGrid& sol) {
  const std::size_t n = sol.intervals();
  const double len = problem.b - problem.a;
  if (n == 0) {
    throw ArgumentError("gl_residual: empty grid");
  }
  const double h = len / static_cast<double>(n);
  if (h > 1e-2 * len * (1.0 + 1e-12)) {
    throw ArgumentError("gl_residual: grid too coarse (need h <= (b-a)/100)");
  }
  const double alpha = problem.alpha;
  std::vector<double> w(n + 1);
  w[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    w[k] = w[k - 1] * (static_cast<double>(k) - 1.0 - alpha) / static_cast<double>(k);
  }
  GlResidual out;
  out.left_layer = std::max(3.0 * h, kGlLeftLayerFraction * len);
  out.right_layer = 3.0 * h;
  const double scale = std::pow(h, -alpha);
  for (std::size_t i = 1; i < n; ++i) {
    const double t = sol.nodes[i];
    if (t < problem.a + out.left_layer - 1e-12 * len ||
        t > problem.b - out.right_layer + 1e-12 * len) {
      continue;
    }
    double acc = 0.0;
    double mag = 0.0;
    for (std::size_t k = 0; k <= i; ++k) {
      acc += w[k] * sol.values[i - k];
      mag += std::fabs(w[k] * sol.values[i - k]);
    }
    const double source = problem.q(t) * problem.f(sol.values[i]);
    const double r = std::fabs(scale * acc + source);
    const double floor = std::numeric_limits<double>::epsilon() *
                         (static_cast<double>(i + 1) * scale * mag + std::fabs(source));
    out.roundoff_floor = std::max(out.roundoff_floor, floor);
    if (r > out.value) {
      out.value = r;
      out.at = t;
    }
  }
  return out;
}

/// CSV with header "t,y" and 17 significant digits.
inline void write_csv(std::ostream& os, const SolutionGrid& sol) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf.precision(17);
  buf << "t,y\n";
  for (std::size_t i = 0; i < sol.nodes.size(); ++i) {
    buf << sol.nodes[i] << ',' << sol.values[i] << '\n';
  }
  os << buf.str();
}

} // namespace fraclyap

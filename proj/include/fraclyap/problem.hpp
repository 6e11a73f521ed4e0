#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "expr.hpp"

namespace fraclyap {

/// Properties of q and f the user asserts in the problem file. They are
/// hypotheses, checked by sampling where used.
struct Declarations {
  bool f_nondecreasing = false;
  bool f_concave = false;
  bool q_nonnegative = false;
};

/// The boundary value problem  D^alpha y + q(t) f(y) = 0 on (a, b),
/// y(a) = y(b) = 0, with D^alpha the Riemann-Liouville derivative.
struct Problem {
  double a = 0.0;
  double b = 1.0;
  double alpha = 1.5;
  Expression q; // in t
  Expression f; // in y
  Declarations declares;

  double length() const noexcept { return b - a; }
};

inline void validate_interval(double a, double b, double alpha) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    std::ostringstream msg;
    msg << "interval must satisfy a < b (got a=" << a << ", b=" << b << ")";
    throw SpecError(msg.str());
  }
  if (!std::isfinite(alpha) || !(alpha > 1.0 && alpha <= 2.0)) {
    std::ostringstream msg;
    msg << "order must satisfy 1 < alpha <= 2 (got " << alpha << ")";
    throw SpecError(msg.str());
  }
}

inline Problem make_problem(double a, double b, double alpha, std::string_view q_text,
                            std::string_view f_text, Declarations declares = {}) {
  validate_interval(a, b, alpha);
  Problem p;
  p.a = a;
  p.b = b;
  p.alpha = alpha;
  p.q = parse(q_text, "t");
  p.f = parse(f_text, "y");
  p.declares = declares;
  return p;
}

} // namespace fraclyap

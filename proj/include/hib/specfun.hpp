#ifndef HIB_SPECFUN_HPP
#define HIB_SPECFUN_HPP

// Hypergeometric kernels evaluated in log-signed form.
//
// phi1 is the degenerate (Humbert) function of two variables
//
//   Phi1(a, b; c; x, y) = sum_{m,n} (a)_{m+n} (b)_n / ((c)_{m+n} m! n!) x^m y^n,
//
// so that Phi1(a, b; c; x, 0) = 1F1(a; c; x) and Phi1(a, b; c; 0, y) = 2F1(a, b; c; y).

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "hib/errors.hpp"
#include "hib/log_signed.hpp"

namespace hib {

struct SeriesControl {
  double rel_tolerance = 1e-12;
  long max_terms = 10000;

  void validate() const {
    if (!(rel_tolerance > 0)) throw DomainError("SeriesControl: rel_tolerance must be > 0");
    if (max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
  }
};

// Largest |y| accepted by phi1 and gauss_2f1.
inline constexpr double kMaxSeriesArgument = 1.0 - 1e-6;

namespace detail {

inline double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

inline long double log_gamma(long double x) {
  int sign = 0;
  return ::lgammal_r(x, &sign);
}

template <typename Real>
bool is_nonpositive_integer(Real x) {
  using std::floor;
  return x <= 0 && x == floor(x);
}

template <typename Real>
LogSignedd to_double(const LogSigned<Real>& v) {
  return LogSignedd::from_log(static_cast<double>(v.log_magnitude), v.sign);
}

template <typename Real>
[[noreturn]] void throw_series_failure(const char* name, const LogSigned<Real>& partial, long terms) {
  std::ostringstream os;
  os << name << ": series did not converge within " << terms << " terms";
  throw SeriesError(os.str(), to_double(partial), terms);
}

template <typename Real>
LogSigned<Real> scaled(Real mantissa, Real log_shift) {
  LogSigned<Real> r = LogSigned<Real>::from_value(mantissa);
  if (!r.is_zero()) r.log_magnitude += log_shift;
  return r;
}

// Rescaling keeps running sums finite; mantissas are kept below kBig.
template <typename Real>
struct Scale {
  static constexpr Real kBig = Real(1e200);
  static Real log_big() {
    using std::log;
    return log(kBig);
  }
};

// Stopping rule shared by all series: three consecutive terms whose
// contribution, including a geometric bound on the remaining tail when the
// term ratio is below one, falls under rel_tolerance relative to the sum.
template <typename Real>
class Convergence {
 public:
  explicit Convergence(double tol) : tol_(static_cast<Real>(tol)) {}

  bool update(Real relative_term, Real term_ratio) {
    using std::abs;
    const Real r = abs(term_ratio);
    const Real tail = r < 1 ? abs(relative_term) * std::max<Real>(1, r / (1 - r))
                            : std::numeric_limits<Real>::infinity();
    quiet_ = tail <= tol_ ? quiet_ + 1 : 0;
    return quiet_ >= 3;
  }

 private:
  Real tol_;
  int quiet_ = 0;
};

// Plain Maclaurin series of 1F1(a; c; x), no transformation.
template <typename Real>
LogSigned<Real> kummer_series(Real a, Real c, Real x, const SeriesControl& ctrl) {
  using std::abs;
  Real sum = 1;
  Real term = 1;
  Real shift = 0;
  Convergence<Real> conv(ctrl.rel_tolerance);
  for (long m = 0;; ++m) {
    if (m >= ctrl.max_terms) throw_series_failure("kummer_1f1", scaled(sum, shift), m);
    const Real ratio = (a + Real(m)) * x / ((c + Real(m)) * Real(m + 1));
    term *= ratio;
    sum += term;
    if (ratio == 0) break;
    if (abs(sum) > Scale<Real>::kBig || abs(term) > Scale<Real>::kBig) {
      sum /= Scale<Real>::kBig;
      term /= Scale<Real>::kBig;
      shift += Scale<Real>::log_big();
    }
    // Terms cannot have peaked before m exceeds |x|.
    if (Real(m) > abs(x) && conv.update(term / sum, ratio)) break;
  }
  return scaled(sum, shift);
}

template <typename Real>
LogSigned<Real> gauss_series(Real a, Real b, Real c, Real y, const SeriesControl& ctrl) {
  using std::abs;
  Real sum = 1;
  Real term = 1;
  Real shift = 0;
  Convergence<Real> conv(ctrl.rel_tolerance);
  for (long n = 0;; ++n) {
    if (n >= ctrl.max_terms) throw_series_failure("gauss_2f1", scaled(sum, shift), n);
    const Real ratio = (a + Real(n)) * (b + Real(n)) * y / ((c + Real(n)) * Real(n + 1));
    term *= ratio;
    sum += term;
    if (ratio == 0) break;
    if (abs(sum) > Scale<Real>::kBig || abs(term) > Scale<Real>::kBig) {
      sum /= Scale<Real>::kBig;
      term /= Scale<Real>::kBig;
      shift += Scale<Real>::log_big();
    }
    if (conv.update(term / sum, ratio)) break;
  }
  return scaled(sum, shift);
}

template <typename Real>
void check_series_argument(const char* name, Real y) {
  using std::abs;
  if (!(abs(y) < 1)) {
    throw DomainError(std::string(name) + ": requires |y| < 1");
  }
  if (abs(y) > Real(kMaxSeriesArgument)) {
    throw DomainError(std::string(name) + ": |y| exceeds 1 - 1e-6");
  }
}

template <typename Real>
void check_lower_parameter(const char* name, Real c) {
  if (is_nonpositive_integer(c)) {
    throw DomainError(std::string(name) + ": gamma must not be zero or a negative integer");
  }
}

// Phi1 with b = 1, x >= 0 and 0 <= y < 1. Summing along anti-diagonals
// k = m + n collapses the double series to
//   sum_k (a)_k / (c)_k * T_k,   T_k = sum_{m<=k} x^m y^(k-m) / m!,
// with T_k = y T_{k-1} + x^k / k!, so each term costs O(1).
template <typename Real>
LogSigned<Real> phi1_unit_b_diagonal(Real a, Real c, Real x, Real y, const SeriesControl& ctrl) {
  using std::abs;
  using std::log;
  Real power = 1;  // x^k / k!
  Real partial = 1;  // T_k
  Real coef = 1;  // (a)_k / (c)_k
  Real sum = 1;
  Real prev = 1;
  Real shift = 0;
  Convergence<Real> conv(ctrl.rel_tolerance);
  for (long k = 1;; ++k) {
    if (k >= ctrl.max_terms) throw_series_failure("phi1", scaled(sum, shift), k);
    power *= x / Real(k);
    partial = y * partial + power;
    coef *= (a + Real(k - 1)) / (c + Real(k - 1));
    const Real term = coef * partial;
    sum += term;
    if (coef == 0) break;
    const Real ratio = prev != 0 ? term / prev : Real(0);
    prev = term;
    if (abs(partial) > Scale<Real>::kBig) {
      partial /= Scale<Real>::kBig;
      power /= Scale<Real>::kBig;
      sum /= Scale<Real>::kBig;
      prev /= Scale<Real>::kBig;
      shift += Scale<Real>::log_big();
    }
    if (abs(coef) > Scale<Real>::kBig) {
      coef /= Scale<Real>::kBig;
      sum /= Scale<Real>::kBig;
      prev /= Scale<Real>::kBig;
      shift += Scale<Real>::log_big();
    }
    if (Real(k) > x && conv.update(term / sum, ratio)) break;
  }
  return scaled(sum, shift);
}

// Phi1 with b = 1, x < 0, 0 < y < 1 and 0 < a < c, as
//   e^x sum_n (a)_n / (c)_n y^n 1F1(c - a; c + n; -x).
// The inner functions are the minimal solution of their three-term
// recurrence in the lower parameter, so they are generated by backward
// recurrence from two series values at the truncation index. Every term is
// at most y^n times the first, which fixes the truncation index a priori.
template <typename Real>
LogSigned<Real> phi1_unit_b_recurrence(Real a, Real c, Real x, Real y, const SeriesControl& ctrl) {
  using std::ceil;
  using std::exp;
  using std::log;
  const Real z = -x;
  const Real upper = c - a;
  const Real cut = log(Real(ctrl.rel_tolerance) * (1 - y) / 8) / log(y);
  const long n_max = std::max<long>(1, static_cast<long>(ceil(cut)));
  if (n_max >= ctrl.max_terms) {
    throw_series_failure("phi1", LogSigned<Real>::zero(), ctrl.max_terms);
  }
  const LogSigned<Real> m_top = kummer_series(upper, c + Real(n_max), z, ctrl);
  const LogSigned<Real> m_above = kummer_series(upper, c + Real(n_max + 1), z, ctrl);
  Real rho = exp(m_top.log_magnitude - m_above.log_magnitude);  // M_n / M_{n+1}
  Real acc = 1;
  for (long j = n_max; j >= 1; --j) {
    const Real b = c + Real(j);
    const Real rho_prev = (b * (b + z - 1) - z * (b - upper) / rho) / (b * (b - 1));
    const Real q = (a + Real(j - 1)) / (c + Real(j - 1)) * y / rho_prev;
    acc = 1 + q * acc;
    rho = rho_prev;
  }
  LogSigned<Real> result = kummer_series(upper, c, z, ctrl);
  result.log_magnitude += x + log(acc);
  return result;
}

}  // namespace detail

/// Rising factorial x (x+1) ... (x+n-1); (x)_0 = 1.
template <typename Real>
LogSigned<Real> pochhammer(Real x, unsigned long n) {
  LogSigned<Real> r = LogSigned<Real>::one();
  for (unsigned long j = 0; j < n; ++j) {
    r *= LogSigned<Real>::from_value(x + Real(j));
    if (r.is_zero()) break;
  }
  return r;
}

/// Kummer's confluent function 1F1(alpha; gamma; x). Negative x is mapped
/// through 1F1(a; c; x) = e^x 1F1(c - a; c; -x) before summation.
template <typename Real>
LogSigned<Real> kummer_1f1(Real alpha, Real gamma, Real x, const SeriesControl& ctrl = {}) {
  ctrl.validate();
  detail::check_lower_parameter("kummer_1f1", gamma);
  if (x == 0) return LogSigned<Real>::one();
  if (x < 0) {
    LogSigned<Real> r = detail::kummer_series(gamma - alpha, gamma, -x, ctrl);
    if (!r.is_zero()) r.log_magnitude += x;
    return r;
  }
  return detail::kummer_series(alpha, gamma, x, ctrl);
}

/// Gauss 2F1(alpha, beta; gamma; y) for |y| < 1. Negative y goes through the
/// Pfaff transformation so the summed series has y/(y-1) in (0, 1/2).
template <typename Real>
LogSigned<Real> gauss_2f1(Real alpha, Real beta, Real gamma, Real y, const SeriesControl& ctrl = {}) {
  using std::log1p;
  ctrl.validate();
  detail::check_series_argument("gauss_2f1", y);
  detail::check_lower_parameter("gauss_2f1", gamma);
  if (y == 0) return LogSigned<Real>::one();
  if (y < 0) {
    LogSigned<Real> r = detail::gauss_series(gamma - alpha, beta, gamma, y / (y - 1), ctrl);
    if (!r.is_zero()) r.log_magnitude -= beta * log1p(-y);
    return r;
  }
  return detail::gauss_series(alpha, beta, gamma, y, ctrl);
}

namespace detail {

// Single-series form sum_n (a)_n (b)_n / ((c)_n n!) y^n 1F1(a+n; c+n; x),
// valid for any sign of x; each inner function is a full kummer_1f1.
template <typename Real>
LogSigned<Real> phi1_nested(Real a, Real b, Real c, Real x, Real y, const SeriesControl& ctrl) {
  using std::exp;
  LogSigned<Real> sum = LogSigned<Real>::zero();
  LogSigned<Real> coef = LogSigned<Real>::one();
  Convergence<Real> conv(ctrl.rel_tolerance);
  for (long n = 0;; ++n) {
    if (n >= ctrl.max_terms) throw_series_failure("phi1", sum, n);
    const LogSigned<Real> term = coef * kummer_1f1(a + Real(n), c + Real(n), x, ctrl);
    sum += term;
    const Real ratio = (a + Real(n)) * (b + Real(n)) * y / ((c + Real(n)) * Real(n + 1));
    if (ratio == 0) break;
    coef *= LogSigned<Real>::from_value(ratio);
    const Real rel = sum.is_zero() ? Real(1) : exp(term.log_magnitude - sum.log_magnitude);
    if (conv.update(rel, ratio)) break;
  }
  return sum;
}

}  // namespace detail

/// Humbert's Phi1(alpha, beta; gamma; x, y) for |y| <= 1 - 1e-6.
///
/// Negative y is mapped through
///   Phi1(a, b; c; x, y) = e^x (1-y)^{-b} Phi1(c-a, b; c; -x, y/(y-1)),
/// after which y >= 0. The generic evaluation is the single series over
/// 1F1(a+n; c+n; x); for beta = 1 two equivalent O(1)-per-term forms are
/// used instead.
template <typename Real>
LogSigned<Real> phi1(Real alpha, Real beta, Real gamma, Real x, Real y, const SeriesControl& ctrl = {}) {
  using std::log1p;
  ctrl.validate();
  detail::check_series_argument("phi1", y);
  detail::check_lower_parameter("phi1", gamma);
  if (y == 0) return kummer_1f1(alpha, gamma, x, ctrl);

  Real log_prefactor = 0;
  if (y < 0) {
    log_prefactor = x - beta * log1p(-y);
    alpha = gamma - alpha;
    x = -x;
    y = y / (y - 1);
  }

  LogSigned<Real> r;
  if (beta == 1 && x >= 0) {
    r = detail::phi1_unit_b_diagonal(alpha, gamma, x, y, ctrl);
  } else if (beta == 1 && alpha > 0 && alpha < gamma) {
    r = detail::phi1_unit_b_recurrence(alpha, gamma, x, y, ctrl);
  } else {
    r = detail::phi1_nested(alpha, beta, gamma, x, y, ctrl);
  }
  if (!r.is_zero()) r.log_magnitude += log_prefactor;
  return r;
}

/// ln B(a, b) for a, b > 0.
template <typename Real>
Real log_beta(Real a, Real b) {
  if (!(a > 0) || !(b > 0)) throw DomainError("log_beta: arguments must be positive");
  return detail::log_gamma(a) + detail::log_gamma(b) - detail::log_gamma(a + b);
}

}  // namespace hib

#endif  // HIB_SPECFUN_HPP

#ifndef HIB_LOG_SIGNED_HPP
#define HIB_LOG_SIGNED_HPP

#include <cmath>
#include <limits>
#include <ostream>

namespace hib {

/// A real number stored as sign * exp(log_magnitude).
///
/// Products and quotients add and subtract logs, so values such as e^{800}
/// stay representable. sign == 0 iff the value is exactly zero, in which case
/// log_magnitude is -inf.
template <typename Real>
struct LogSigned {
  Real log_magnitude = -std::numeric_limits<Real>::infinity();
  int sign = 0;

  static LogSigned zero() { return {}; }
  static LogSigned one() { return {Real(0), 1}; }

  static LogSigned from_log(Real log_mag, int sgn = 1) {
    if (sgn == 0) return zero();
    return {log_mag, sgn > 0 ? 1 : -1};
  }

  static LogSigned from_value(Real v) {
    if (v == Real(0)) return zero();
    using std::abs;
    using std::log;
    return {log(abs(v)), v > 0 ? 1 : -1};
  }

  Real value() const {
    if (sign == 0) return Real(0);
    using std::exp;
    return Real(sign) * exp(log_magnitude);
  }

  bool is_zero() const { return sign == 0; }

  LogSigned operator-() const { return {log_magnitude, -sign}; }

  LogSigned& operator*=(const LogSigned& o) {
    if (sign == 0 || o.sign == 0) return *this = zero();
    log_magnitude += o.log_magnitude;
    sign *= o.sign;
    return *this;
  }

  LogSigned& operator/=(const LogSigned& o) {
    if (o.sign == 0) {
      log_magnitude = std::numeric_limits<Real>::quiet_NaN();
      return *this;
    }
    if (sign == 0) return *this;
    log_magnitude -= o.log_magnitude;
    sign *= o.sign;
    return *this;
  }

  LogSigned& operator+=(const LogSigned& o) {
    if (o.sign == 0) return *this;
    if (sign == 0) return *this = o;
    using std::exp;
    using std::log1p;
    const bool self_larger = log_magnitude >= o.log_magnitude;
    const LogSigned& big = self_larger ? *this : o;
    const LogSigned& small = self_larger ? o : *this;
    const Real ratio = exp(small.log_magnitude - big.log_magnitude);
    if (big.sign == small.sign) {
      *this = {big.log_magnitude + log1p(ratio), big.sign};
    } else if (ratio == Real(1)) {
      *this = zero();
    } else {
      *this = {big.log_magnitude + log1p(-ratio), big.sign};
    }
    return *this;
  }

  LogSigned& operator-=(const LogSigned& o) { return *this += -o; }

  friend LogSigned operator*(LogSigned l, const LogSigned& r) { return l *= r; }
  friend LogSigned operator/(LogSigned l, const LogSigned& r) { return l /= r; }
  friend LogSigned operator+(LogSigned l, const LogSigned& r) { return l += r; }
  friend LogSigned operator-(LogSigned l, const LogSigned& r) { return l -= r; }

  friend std::ostream& operator<<(std::ostream& os, const LogSigned& v) {
    return os << (v.sign < 0 ? "-" : "") << "exp(" << v.log_magnitude << ")";
  }
};

using LogSignedd = LogSigned<double>;

}  // namespace hib

#endif  // HIB_LOG_SIGNED_HPP

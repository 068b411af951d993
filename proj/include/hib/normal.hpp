#ifndef HIB_NORMAL_HPP
#define HIB_NORMAL_HPP

#include <cmath>

namespace hib {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI); }

inline double log_normal_pdf(double x) { return -0.5 * x * x - 0.5 * std::log(2 * M_PI); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / M_SQRT2); }

/// ln Phi(x), accurate for large negative x where Phi underflows.
inline double log_normal_cdf(double x) {
  if (x > -30) return std::log(normal_cdf(x));
  // Mills-ratio expansion: Phi(x) ~ phi(x)/|x| (1 - 1/x^2 + 3/x^4 - 15/x^6)
  const double x2 = x * x;
  const double series = 1 - 1 / x2 + 3 / (x2 * x2) - 15 / (x2 * x2 * x2);
  return log_normal_pdf(x) - std::log(-x) + std::log(series);
}

/// Inverse of the standard normal CDF on (0, 1).
double normal_quantile(double p);

}  // namespace hib

#endif  // HIB_NORMAL_HPP

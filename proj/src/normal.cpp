#include "hib/normal.hpp"

#include <boost/math/distributions/normal.hpp>

#include "hib/errors.hpp"

namespace hib {

double normal_quantile(double p) {
  if (!(p > 0 && p < 1)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, p);
}

}  // namespace hib

#include "hib/hib.hpp"

#include <cmath>
#include <sstream>

#include "hib/kappa_rule.hpp"

namespace hib {

namespace {

// tau values sampled at the ends of the legal range may square to a hair
// outside it.
constexpr double kTau2Slack = 1e-12;

// Beyond this |s| the series needs ~|s| terms and accumulates rounding;
// quadrature is used instead.
constexpr double kSeriesMaxShift = 1e4;

}  // namespace

void HIBParams::validate() const {
  auto fail = [](const std::string& msg) { throw DomainError("HIBParams: " + msg); };
  if (!(a > 0) || !std::isfinite(a)) fail("a must be > 0");
  if (!(b > 0) || !std::isfinite(b)) fail("b must be > 0");
  if (!(tau > 0) || !std::isfinite(tau)) fail("tau must be > 0");
  const double tau2 = tau * tau;
  if (tau2 < kMinTau2 * (1 - kTau2Slack) || tau2 > kMaxTau2 * (1 + kTau2Slack)) {
    std::ostringstream os;
    os << "tau^2 = " << tau2 << " outside [1e-3, 1e3]";
    fail(os.str());
  }
  if (!std::isfinite(s)) fail("s must be finite");
  if (!(sigma > 0) || !std::isfinite(sigma)) fail("sigma must be > 0");
}

SeriesControl hib_series_control() { return SeriesControl{1e-13, 2000000}; }

namespace detail {

double log_kernel(double kappa, double alpha, double b, double tau, double s) {
  const double inv_tau2 = 1.0 / (tau * tau);
  return (alpha - 1) * std::log(kappa) + (b - 1) * std::log1p(-kappa) -
         std::log(inv_tau2 + (1 - inv_tau2) * kappa) - s * kappa;
}

double log_kernel_integral(double alpha, double b, double tau, double s) {
  if (std::abs(s) > kSeriesMaxShift) return log_kernel_integral_quadrature(alpha, b, tau, s);
  const SeriesControl ctrl = hib_series_control();
  const double lb = log_beta(alpha, b);
  if (tau >= 1) {
    const double y = 1 - 1 / (tau * tau);
    return -s + lb + phi1(b, 1.0, alpha + b, s, y, ctrl).log_magnitude;
  }
  const double y = 1 - tau * tau;
  return 2 * std::log(tau) + lb + phi1(alpha, 1.0, alpha + b, -s, y, ctrl).log_magnitude;
}

}  // namespace detail

LogSignedd hb_normalizer(const HIBParams& p) {
  p.validate();
  return LogSignedd::from_log(detail::log_kernel_integral(p.a, p.b, p.tau, p.s));
}

double hb_log_density_kappa(double kappa, const HIBParams& p) {
  if (!(kappa > 0 && kappa < 1)) throw DomainError("hb_density_kappa: kappa must lie in (0, 1)");
  p.validate();
  return detail::log_kernel(kappa, p.a, p.b, p.tau, p.s) -
         detail::log_kernel_integral(p.a, p.b, p.tau, p.s);
}

double hb_density_kappa(double kappa, const HIBParams& p) {
  return std::exp(hb_log_density_kappa(kappa, p));
}

double hib_log_density_lambda2(double lambda2, const HIBParams& p) {
  if (!(lambda2 > 0) || !std::isfinite(lambda2)) {
    throw DomainError("hib_density_lambda2: lambda2 must be positive and finite");
  }
  p.validate();
  // kappa = 1/(1+lambda2), written so that neither end loses precision.
  const double log1p_l = std::log1p(lambda2);
  const double log_kappa = -log1p_l;
  const double log_one_minus_kappa = std::log(lambda2) - log1p_l;
  const double kappa = 1.0 / (1.0 + lambda2);
  const double inv_tau2 = 1.0 / (p.tau * p.tau);
  const double log_kern = (p.a - 1) * log_kappa + (p.b - 1) * log_one_minus_kappa -
                          std::log(inv_tau2 + (1 - inv_tau2) * kappa) - p.s * kappa;
  return log_kern - detail::log_kernel_integral(p.a, p.b, p.tau, p.s) - 2 * log1p_l;
}

double hib_density_lambda2(double lambda2, const HIBParams& p) {
  return std::exp(hib_log_density_lambda2(lambda2, p));
}

LogSignedd hb_mgf(double t, const HIBParams& p) {
  p.validate();
  if (!std::isfinite(t)) throw DomainError("hb_mgf: t must be finite");
  if (t == 0) return LogSignedd::one();
  return LogSignedd::from_log(detail::log_kernel_integral(p.a, p.b, p.tau, p.s - t) -
                              detail::log_kernel_integral(p.a, p.b, p.tau, p.s));
}

double hb_moment(unsigned n, const HIBParams& p) {
  p.validate();
  if (n == 0) return 1.0;
  return std::exp(detail::log_kernel_integral(p.a + n, p.b, p.tau, p.s) -
                  detail::log_kernel_integral(p.a, p.b, p.tau, p.s));
}

std::vector<ShrinkageProfilePoint> shrinkage_profile(const HIBParams& p, int grid_size) {
  if (grid_size < 2) throw DomainError("shrinkage_profile: grid_size must be >= 2");
  p.validate();
  const double log_c = detail::log_kernel_integral(p.a, p.b, p.tau, p.s);
  std::vector<ShrinkageProfilePoint> out;
  out.reserve(static_cast<std::size_t>(grid_size));
  for (int i = 1; i <= grid_size; ++i) {
    const double kappa = static_cast<double>(i) / (grid_size + 1);
    out.push_back({kappa, std::exp(detail::log_kernel(kappa, p.a, p.b, p.tau, p.s) - log_c)});
  }
  return out;
}

}  // namespace hib

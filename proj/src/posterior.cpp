#include "hib/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hib/kappa_rule.hpp"
#include "hib/normal.hpp"

namespace hib {

namespace {

double log_moment_ratio(unsigned n, const HIBParams& q) {
  return detail::log_kernel_integral(q.a + n, q.b, q.tau, q.s) -
         detail::log_kernel_integral(q.a, q.b, q.tau, q.s);
}

}  // namespace

namespace detail {

double kappa_expectation(const HIBParams& p, const std::function<double(double)>& f) {
  const KappaRule rule = kappa_rule(p.a, p.b, p.tau, p.s);
  const std::vector<double>& kappa = rule.kappa;
  const std::vector<double>& log_w = rule.log_weight;
  const double max_log = *std::max_element(log_w.begin(), log_w.end());
  double num = 0;
  double den = 0;
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    const double w = std::exp(log_w[i] - max_log);
    if (w == 0) continue;
    den += w;
    num += w * f(kappa[i]);
  }
  return num / den;
}

}  // namespace detail

HIBParams posterior_update(double y, const HIBParams& p) {
  HIBParams q = p;
  q.a = p.a + 0.5;
  q.s = p.s + y * y / (2 * p.sigma * p.sigma);
  return q;
}

double posterior_kappa_moment(unsigned n, double y, const HIBParams& p) {
  p.validate();
  if (n == 0) return 1.0;
  return std::exp(log_moment_ratio(n, posterior_update(y, p)));
}

double posterior_mean_beta(double y, const HIBParams& p) {
  return (1 - posterior_kappa_moment(1, y, p)) * y;
}

double posterior_var_beta(double y, const HIBParams& p) {
  p.validate();
  const HIBParams q = posterior_update(y, p);
  const double log_i0 = detail::log_kernel_integral(q.a, q.b, q.tau, q.s);
  const double e1 = std::exp(detail::log_kernel_integral(q.a + 1, q.b, q.tau, q.s) - log_i0);
  const double e2 = std::exp(detail::log_kernel_integral(q.a + 2, q.b, q.tau, q.s) - log_i0);
  const double var_kappa = std::max(0.0, e2 - e1 * e1);
  return p.sigma * p.sigma * (1 - e1) + y * y * var_kappa;
}

LogSignedd marginal_m1(double y, const HIBParams& p) {
  p.validate();
  const HIBParams q = posterior_update(y, p);
  const double log_m = -0.5 * std::log(2 * M_PI * p.sigma * p.sigma) +
                       detail::log_kernel_integral(q.a, q.b, q.tau, q.s) -
                       detail::log_kernel_integral(p.a, p.b, p.tau, p.s);
  return LogSignedd::from_log(log_m);
}

double score_m1(double y, const HIBParams& p) {
  return -posterior_kappa_moment(1, y, p) * y / (p.sigma * p.sigma);
}

double g_shrink(double Z, int dim, const HIBParams& p) {
  if (!(Z >= 0) || !std::isfinite(Z)) throw DomainError("g_shrink: Z must be finite and >= 0");
  if (dim < 1) throw DomainError("g_shrink: dim must be >= 1");
  p.validate();
  const double alpha = p.a + 0.5 * dim;
  const double shift = p.s + 0.5 * Z;
  return std::exp(detail::log_kernel_integral(alpha + 1, p.b, p.tau, shift) -
                  detail::log_kernel_integral(alpha, p.b, p.tau, shift));
}

double prob_positive(double y, const HIBParams& p) {
  p.validate();
  if (y == 0) return 0.5;
  const double z = y / p.sigma;
  return detail::kappa_expectation(posterior_update(y, p), [z](double k) {
    return normal_cdf(std::sqrt(1 - k) * z);
  });
}

EffectPosterior effect_posterior(double y, const HIBParams& p) {
  p.validate();
  const HIBParams q = posterior_update(y, p);
  const double log_prior = detail::log_kernel_integral(p.a, p.b, p.tau, p.s);
  const double log_i0 = detail::log_kernel_integral(q.a, q.b, q.tau, q.s);
  const double e1 = std::exp(detail::log_kernel_integral(q.a + 1, q.b, q.tau, q.s) - log_i0);
  const double e2 = std::exp(detail::log_kernel_integral(q.a + 2, q.b, q.tau, q.s) - log_i0);

  EffectPosterior out;
  out.e_kappa = e1;
  out.var_kappa = std::max(0.0, e2 - e1 * e1);
  out.post_mean_beta = (1 - e1) * y;
  out.post_var_beta = p.sigma * p.sigma * (1 - e1) + y * y * out.var_kappa;
  out.log_marginal_m1 = -0.5 * std::log(2 * M_PI * p.sigma * p.sigma) + log_i0 - log_prior;
  out.prob_positive = prob_positive(y, p);
  return out;
}

}  // namespace hib

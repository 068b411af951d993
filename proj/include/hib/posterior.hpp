#ifndef HIB_POSTERIOR_HPP
#define HIB_POSTERIOR_HPP

#include <functional>

#include "hib/hib.hpp"

namespace hib {

/// Posterior of a single effect beta given y ~ N(beta, sigma^2) and a
/// nonzero beta with the HIB prior.
struct EffectPosterior {
  double post_mean_beta = 0;
  double post_var_beta = 0;
  double e_kappa = 0;
  double var_kappa = 0;
  double log_marginal_m1 = 0;
  double prob_positive = 0.5;
};

/// kappa | y ~ HB(a + 1/2, b, tau, s + y^2 / (2 sigma^2)).
HIBParams posterior_update(double y, const HIBParams& p);

/// E[kappa^n | y].
double posterior_kappa_moment(unsigned n, double y, const HIBParams& p);

/// E[beta | y] = (1 - E[kappa | y]) y.
double posterior_mean_beta(double y, const HIBParams& p);

/// Var[beta | y] = sigma^2 (1 - E[kappa | y]) + y^2 Var[kappa | y].
double posterior_var_beta(double y, const HIBParams& p);

/// Marginal density of y under beta != 0.
LogSignedd marginal_m1(double y, const HIBParams& p);

/// d/dy ln m1(y) = -E[kappa | y] y / sigma^2. With this score the posterior
/// mean is y + sigma^2 * score.
double score_m1(double y, const HIBParams& p);

/// Shrinkage factor g(Z) = E[kappa | Z] for the rule beta_hat = (1 - g(Z)) y
/// with Z = ||y||^2 over `dim` unit-variance coordinates sharing one kappa.
/// p.sigma is ignored; callers standardize y first.
double g_shrink(double Z, int dim, const HIBParams& p);

/// P(beta > 0 | y, beta != 0) = E[Phi(sqrt(1 - kappa) y / sigma) | y].
double prob_positive(double y, const HIBParams& p);

/// All of the above from one set of series evaluations.
EffectPosterior effect_posterior(double y, const HIBParams& p);

namespace detail {

// E[f(kappa)] under the density proportional to the HB(p) kernel, by
// 64-point Gauss rules on panels graded toward the features of the kernel.
// The end panels substitute kappa = c u^2 and 1 - kappa = c v^2 and carry
// the endpoint powers as Jacobi weights, so f may involve sqrt(kappa) or
// sqrt(1 - kappa).
double kappa_expectation(const HIBParams& p, const std::function<double(double)>& f);

}  // namespace detail

}  // namespace hib

#endif  // HIB_POSTERIOR_HPP

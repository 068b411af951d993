#ifndef HIB_KAPPA_RULE_HPP
#define HIB_KAPPA_RULE_HPP

#include <vector>

namespace hib::detail {

// Quadrature nodes and log weights for integrals over kappa in (0, 1)
// against the kernel
//   kappa^{alpha-1} (1-kappa)^{b-1} {1/tau^2 + (1-1/tau^2) kappa}^{-1} e^{-s kappa}.
// 64-point Gauss rules on panels graded toward the features of the kernel;
// the end panels substitute kappa = c u^2 and 1 - kappa = c v^2 and carry
// the endpoint powers as Jacobi weights.
struct KappaRule {
  std::vector<double> kappa;
  std::vector<double> log_weight;
};

KappaRule kappa_rule(double alpha, double b, double tau, double s);

// ln of the kernel integral summed from kappa_rule.
double log_kernel_integral_quadrature(double alpha, double b, double tau, double s);

}  // namespace hib::detail

#endif  // HIB_KAPPA_RULE_HPP

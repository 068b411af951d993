#include "hib/kappa_rule.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "hib/hib.hpp"

namespace hib::detail {

namespace {

constexpr int kNodes = 64;

struct GaussRule {
  std::array<double, kNodes> nodes;        // on (0, 1)
  std::array<double, kNodes> log_weights;  // for the weight u^e on (0, 1)
};

// Golub-Welsch for the Jacobi weight (1 + x)^e on [-1, 1], mapped to u^e on
// (0, 1). e = 0 gives Gauss-Legendre.
GaussRule make_jacobi_rule(double e) {
  Eigen::VectorXd diag(kNodes);
  Eigen::VectorXd sub(kNodes - 1);
  diag(0) = e / (e + 2);
  for (int k = 1; k < kNodes; ++k) {
    const double t = 2.0 * k + e;
    diag(k) = e * e / (t * (t + 2));
    sub(k - 1) = std::sqrt(4.0 * k * k * (k + e) * (k + e) / (t * t * (t + 1) * (t - 1)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  // Total mass of u^e on (0, 1) is 1/(e + 1).
  const double log_mass = -std::log1p(e);
  GaussRule rule{};
  for (int i = 0; i < kNodes; ++i) {
    rule.nodes[i] = 0.5 * (es.eigenvalues()(i) + 1.0);
    const double v0 = es.eigenvectors()(0, i);
    rule.log_weights[i] = log_mass + 2 * std::log(std::abs(v0));
  }
  return rule;
}

const GaussRule& jacobi_rule(double e) {
  thread_local std::map<double, GaussRule> cache;
  auto it = cache.find(e);
  if (it != cache.end()) return it->second;
  if (cache.size() > 64) cache.clear();
  return cache.emplace(e, make_jacobi_rule(e)).first->second;
}

// Panel edges on [0, 1], graded geometrically toward e^{-s kappa}
// concentration and toward the pole of {1/tau^2 + (1 - 1/tau^2) kappa}^{-1}.
std::vector<double> panel_edges(double tau, double s) {
  std::vector<double> edges = {0.0, 0.5, 1.0};
  const double tau2 = tau * tau;
  for (double k : {0.25, 1.0, 4.0, 16.0, 64.0}) {
    if (s > 1) edges.push_back(k / s);
    if (s < -1) edges.push_back(1 - k / -s);
    if (tau2 > 1) edges.push_back(k / tau2);
    if (tau2 < 1) edges.push_back(1 - k * tau2);
  }
  std::sort(edges.begin(), edges.end());
  std::vector<double> out;
  for (double e : edges) {
    if (e < 0 || e > 1) continue;
    if (!out.empty() && e - out.back() < 1e-12) continue;
    out.push_back(e);
  }
  return out;
}

}  // namespace

KappaRule kappa_rule(double alpha, double b, double tau, double s) {
  const double inv_tau2 = 1.0 / (tau * tau);
  auto log_smooth = [&](double k) { return -std::log(inv_tau2 + (1 - inv_tau2) * k) - s * k; };

  const std::vector<double> edges = panel_edges(tau, s);
  const std::size_t panels = edges.size() - 1;
  KappaRule r;
  r.kappa.reserve(panels * kNodes);
  r.log_weight.reserve(panels * kNodes);

  for (std::size_t j = 0; j < panels; ++j) {
    const double lo = edges[j];
    const double hi = edges[j + 1];
    if (j == 0) {
      // kappa = hi u^2: kappa^{alpha-1} d kappa = 2 hi^alpha u^{2 alpha-1} du
      const GaussRule& rule = jacobi_rule(2 * alpha - 1);
      const double log_jac = std::log(2.0) + alpha * std::log(hi);
      for (int i = 0; i < kNodes; ++i) {
        const double k = hi * rule.nodes[i] * rule.nodes[i];
        r.kappa.push_back(k);
        r.log_weight.push_back(rule.log_weights[i] + log_jac + (b - 1) * std::log1p(-k) + log_smooth(k));
      }
    } else if (j + 1 == panels) {
      // 1 - kappa = len v^2
      const GaussRule& rule = jacobi_rule(2 * b - 1);
      const double len = 1 - lo;
      const double log_jac = std::log(2.0) + b * std::log(len);
      for (int i = 0; i < kNodes; ++i) {
        const double k = 1 - len * rule.nodes[i] * rule.nodes[i];
        r.kappa.push_back(k);
        r.log_weight.push_back(rule.log_weights[i] + log_jac + (alpha - 1) * std::log(k) + log_smooth(k));
      }
    } else {
      const GaussRule& rule = jacobi_rule(0.0);
      const double width = hi - lo;
      for (int i = 0; i < kNodes; ++i) {
        const double k = lo + width * rule.nodes[i];
        r.kappa.push_back(k);
        r.log_weight.push_back(rule.log_weights[i] + std::log(width) + log_kernel(k, alpha, b, tau, s));
      }
    }
  }
  return r;
}

double log_kernel_integral_quadrature(double alpha, double b, double tau, double s) {
  const KappaRule r = kappa_rule(alpha, b, tau, s);
  const double max_log = *std::max_element(r.log_weight.begin(), r.log_weight.end());
  double sum = 0;
  for (double lw : r.log_weight) sum += std::exp(lw - max_log);
  return max_log + std::log(sum);
}

}  // namespace hib::detail

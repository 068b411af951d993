#ifndef HIB_HIB_HPP
#define HIB_HIB_HPP

#include <vector>

#include "hib/log_signed.hpp"
#include "hib/specfun.hpp"

namespace hib {

inline constexpr double kMinTau2 = 1e-3;
inline constexpr double kMaxTau2 = 1e3;

/// Hyperparameters of the hypergeometric inverted-beta prior on lambda^2
/// (equivalently the hypergeometric-beta prior on kappa = 1/(1+lambda^2)),
/// plus the noise scale sigma of the normal likelihood.
struct HIBParams {
  double a = 0.5;  ///< tail exponent; small a means heavy tails in beta
  double b = 1.0;  ///< behavior at the origin; small b means a spike at zero
  double tau = 1.0;  ///< global scale, tau^2 restricted to [1e-3, 1e3]
  double s = 0.0;  ///< prior sum-of-squares shift, any real
  double sigma = 1.0;

  /// Throws DomainError naming the violated invariant.
  void validate() const;
};

/// Series settings used for every Phi1 evaluation in this library. The term
/// budget covers tau^2 at the edges of its legal range and |y/sigma| in the
/// hundreds.
SeriesControl hib_series_control();

namespace detail {

// ln of kappa^{alpha-1} (1-kappa)^{b-1} {1/tau^2 + (1-1/tau^2) kappa}^{-1} e^{-s kappa}.
double log_kernel(double kappa, double alpha, double b, double tau, double s);

// ln of the integral of the kernel over (0, 1). For tau >= 1 this is
//   -s + ln B(alpha, b) + ln Phi1(b, 1; alpha+b; s, 1 - 1/tau^2),
// for tau < 1 the equivalent
//   2 ln tau + ln B(alpha, b) + ln Phi1(alpha, 1; alpha+b; -s, 1 - tau^2),
// which keeps the second Phi1 argument inside [0, 1).
double log_kernel_integral(double alpha, double b, double tau, double s);

}  // namespace detail

/// Normalizing constant C of the kappa density.
LogSignedd hb_normalizer(const HIBParams& p);

/// Log density of kappa on (0, 1); usable far into the tails.
double hb_log_density_kappa(double kappa, const HIBParams& p);
double hb_density_kappa(double kappa, const HIBParams& p);

/// Density of lambda^2 = 1/kappa - 1.
double hib_log_density_lambda2(double lambda2, const HIBParams& p);
double hib_density_lambda2(double lambda2, const HIBParams& p);

/// E[exp(t kappa)].
LogSignedd hb_mgf(double t, const HIBParams& p);

/// E[kappa^n].
double hb_moment(unsigned n, const HIBParams& p);

struct ShrinkageProfilePoint {
  double kappa;
  double density;
};

/// Density on the open grid kappa_i = i/(grid_size+1), i = 1..grid_size.
std::vector<ShrinkageProfilePoint> shrinkage_profile(const HIBParams& p, int grid_size);

}  // namespace hib

#endif  // HIB_HIB_HPP

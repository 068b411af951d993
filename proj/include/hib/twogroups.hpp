#ifndef HIB_TWOGROUPS_HPP
#define HIB_TWOGROUPS_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "hib/hib.hpp"
#include "hib/io.hpp"

namespace hib {

/// y ~ w N(beta, sigma^2) with beta from the HIB prior, plus (1 - w) N(0, sigma^2).
struct TwoGroupsModel {
  double w = 0.1;
  HIBParams hib;

  void validate() const;
};

/// Posterior probability that y came from the null component.
double local_fdr(double y, const TwoGroupsModel& m);

enum class TailSide { lower, upper, two_sided };

/// Tail-area false discovery rate (1 - w) F0 / F, where F0 and F are the
/// null and mixture probabilities of the tail at y on the chosen side.
double tail_fdr(double y, const TwoGroupsModel& m, TailSide side);

/// How importance-sampling draws of (w, tau) are proposed.
enum class Proposal {
  /// Student-t around the posterior mode in (logit w, logit position of
  /// ln tau), mixed with the prior for heavy tails.
  laplace,
  /// The prior itself.
  prior,
};

struct FitConfig {
  long n_draws = 5000;
  std::uint64_t seed = 1;
  double min_ess = 50;
  double a = 0.5;
  double b = 1.0;
  double s = 0.0;  ///< held fixed during the fit
  double tau_min = 0.0316227766016838;  ///< sqrt(1e-3)
  double tau_max = 31.622776601683793;  ///< sqrt(1e3)
  Proposal proposal = Proposal::laplace;
  int workers = 1;

  void validate() const;
};

struct ISDraw {
  double w;
  double tau;
  double weight;  ///< self-normalized
};

struct FitResult {
  std::vector<ISDraw> draws;
  double post_mean_w = 0;
  double post_mean_tau = 0;
  double is_effective_sample_size = 0;
  std::uint64_t seed = 0;
  double a = 0.5;
  double b = 1.0;
  double s = 0.0;
  Proposal proposal = Proposal::laplace;
};

/// Importance-sampling weights collapsed onto too few draws.
class DegenerateWeightsError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Posterior over (w, tau) for unit-noise z-scores with priors w ~ U(0, 1)
/// and tau ~ C+(0, 1) truncated to [tau_min, tau_max], by self-normalized
/// importance sampling. Deterministic given the config, whatever the worker
/// count.
FitResult fit_hyperparams(const std::vector<double>& z, const FitConfig& config);

struct PosteriorSummary {
  std::string observation_id;
  double z = 0;
  double incl_prob = 0;
  double local_fdr = 1;
  double post_mean_beta = 0;
  double post_var_beta = 0;
  double prob_positive = 0.5;  ///< P(beta > 0 | z, beta != 0)
  double outperf_prob = 0;     ///< P(beta != 0 and beta > 0 | z)
};

/// Per-observation summaries averaged over the weighted draws of `fit`,
/// under HIB(a, b) with the fit's s. Ids default to the 0-based index.
std::vector<PosteriorSummary> summarize(const std::vector<double>& z, const FitResult& fit, double a,
                                        double b, const std::vector<std::string>& ids = {},
                                        int workers = 1);

struct GroupFdr {
  long count = 0;
  double expected_fdr = 0;
};

/// Observations with incl_prob > threshold, and their mean local fdr.
GroupFdr group_fdr(const std::vector<PosteriorSummary>& summaries, double threshold);

void write_summaries_csv(std::ostream& os, const std::vector<PosteriorSummary>& summaries);
void write_summaries_json(std::ostream& os, const std::vector<PosteriorSummary>& summaries);
void write_summary_json(JsonWriter& json, const PosteriorSummary& s);
void write_fit_json(JsonWriter& json, const FitResult& fit);

const char* to_string(Proposal p);
const char* to_string(TailSide side);

}  // namespace hib

#endif  // HIB_TWOGROUPS_HPP

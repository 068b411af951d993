#ifndef HIB_SIMULATION_HPP
#define HIB_SIMULATION_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "hib/twogroups.hpp"

namespace hib {

enum class SignalKind {
  fixed,   ///< k entries equal to value
  random,  ///< k entries drawn as scale * t(t_dof)
};

enum class Estimator { hib, laplace };

/// Slab (a/2) exp(-a |u|) with a = scale.
struct LaplaceConfig {
  bool estimate_scale = true;  ///< joint marginal maximum likelihood in (w, a)
  double scale = 1.0;          ///< used when not estimated
  double scale_min = 0.04;
  double scale_max = 3.0;

  void validate() const;
};

struct ExperimentConfig {
  long p = 1000;
  SignalKind signal = SignalKind::fixed;
  long k = 5;
  double value = 7;  ///< fixed signals
  double scale = 1;  ///< random signals
  int t_dof = 3;
  long replicates = 100;
  std::vector<Estimator> estimators = {Estimator::hib, Estimator::laplace};
  std::uint64_t seed = 1;
  double a = 0.5;  ///< HIB shape parameters
  double b = 1.0;
  double flag_threshold = 0.5;  ///< HIB flags incl_prob above this
  LaplaceConfig laplace;
  FitConfig fit;  ///< a, b, seed and workers are overridden per replicate
  int workers = 1;

  void validate() const;
};

struct Dataset {
  std::vector<double> beta;
  std::vector<double> y;
};

/// Deterministic in (config.seed, replicate).
Dataset generate_dataset(const ExperimentConfig& config, long replicate);

struct HibEstimate {
  std::vector<double> beta_hat;
  std::vector<double> incl_prob;
  FitResult fit;
};

/// Posterior means averaged over the inclusion indicator and the
/// importance-sampling draws of (w, tau).
HibEstimate run_hib_estimator(const std::vector<double>& y, double a, double b, const FitConfig& fit_config);

struct LaplaceEstimate {
  std::vector<double> beta_hat;  ///< posterior medians
  double w = 0;                  ///< marginal maximum likelihood weight
  double w_lower = 0;            ///< weight at which the threshold equals sqrt(2 ln n)
  double scale = 1;
};

/// Approximate Johnstone-Silverman baseline: point mass at zero mixed with
/// a Laplace slab, weight (and by default scale) by marginal maximum
/// likelihood with w restricted to [w_lower, 1], componentwise posterior
/// median.
LaplaceEstimate run_laplace_baseline(const std::vector<double>& y, const LaplaceConfig& config = {});

/// Posterior median of beta given y under weight w, with unit noise.
double laplace_posterior_median(double y, double w, double scale);

/// Smallest |y| with a nonzero posterior median.
double laplace_threshold(double w, double scale);

struct ReplicateScore {
  double sse = 0;
  long fp = 0;
  long flagged = 0;
  double fdr = 0;  ///< fp / max(1, flagged)
};

ReplicateScore score_replicate(const std::vector<double>& beta, const std::vector<double>& beta_hat,
                               const std::vector<bool>& flags);

struct ReplicateRow {
  long replicate = 0;
  Estimator estimator = Estimator::hib;
  ReplicateScore score;
  double w_hat = 0;    ///< posterior mean of w, or the MML weight
  double tau_hat = 0;  ///< HIB only
  double is_ess = 0;   ///< HIB only
  double scale_hat = 0;  ///< Laplace only
};

struct EstimatorSummary {
  Estimator estimator = Estimator::hib;
  double sse_mean = 0;
  double fp_mean = 0;
  double fdr_mean = 0;
  double flagged_mean = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<EstimatorSummary> summaries;  ///< in config.estimators order
  std::vector<ReplicateRow> rows;           ///< replicate-major
};

/// Runs every replicate for every estimator. Replicates run in parallel;
/// a failure is rethrown naming its replicate.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// "hib_a<a>_b<b>" or "laplace_approx_js".
std::string estimator_label(Estimator e, const ExperimentConfig& config);

/// One row per estimator: estimator, signal, k, value_or_scale, t_dof, p,
/// replicates, sse, fp, fdr.
void write_experiment_csv(std::ostream& os, const std::vector<ExperimentResult>& results);

/// Config echo, summaries and per-replicate rows.
void write_experiment_json(std::ostream& os, const std::vector<ExperimentResult>& results);

const char* to_string(SignalKind k);

}  // namespace hib

#endif  // HIB_SIMULATION_HPP

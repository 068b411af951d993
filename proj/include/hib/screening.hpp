#ifndef HIB_SCREENING_HPP
#define HIB_SCREENING_HPP

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hib/twogroups.hpp"

namespace hib {

/// One firm-year. Either z is given directly or it is formed from the raw
/// value and its peer-group benchmark.
struct TrajectoryRecord {
  std::string firm_id;
  long year = 0;
  std::optional<double> z;
  double raw_value = 0;
  double benchmark_mean = 0;
  double benchmark_sd = 1;
  long line = 0;  ///< source line, 0 when not read from a file
};

/// Reads a CSV with a header naming either (firm_id, year, z) or
/// (firm_id, year, raw_value, benchmark_mean, benchmark_sd). Extra columns
/// are ignored. Errors carry `source` and the line number.
std::vector<TrajectoryRecord> read_trajectory_csv(std::istream& in, const std::string& source = "input");

struct FirmTrajectory {
  std::string firm_id;
  std::vector<double> z_series;  ///< ordered by year
  long n = 0;
  double phi_hat = 0;
  double n_eff = 0;
  double z_stat = 0;      ///< mean * sqrt(n_eff)
  double z_stat_raw = 0;  ///< mean * sqrt(n)
  bool degenerate = false;  ///< autocorrelation undefined (constant or single-point series)
};

/// Groups records by firm (firms in lexicographic order), sorts each series
/// by year and forms z = (raw - mean) / sd where needed. Statistics are left
/// unset.
std::vector<FirmTrajectory> standardize(const std::vector<TrajectoryRecord>& records);

struct Autocorrelation {
  double phi = 0;         ///< max(raw, 0)
  double raw = 0;         ///< the sample estimate before thresholding
  bool degenerate = false;  ///< zero variance; phi and raw are 0
};

/// Lag-1 sample autocorrelation with denominator-n normalization.
Autocorrelation lag1_autocorr(const std::vector<double>& z_series);

/// n (1 - phi) / (1 + phi).
double effective_n(long n, double phi);

/// Fills n, phi_hat, n_eff, z_stat and z_stat_raw. A given phi replaces
/// the estimate.
FirmTrajectory aggregate(FirmTrajectory traj, std::optional<double> phi = std::nullopt);

struct ScreenConfig {
  long min_years = 5;
  bool ess_correction = true;
  double high_threshold = 0.9;
  double mid_threshold = 0.5;
  FitConfig fit;

  void validate() const;
};

struct FlaggedGroup {
  double lower = 0;  ///< incl_prob > lower
  double upper = 1;  ///< incl_prob <= upper
  std::vector<std::string> firm_ids;
  double expected_fdr = 0;
};

struct ScreenReport {
  long input_firms = 0;
  long excluded_short = 0;  ///< firms with fewer than min_years records
  long cohort_size = 0;
  long degenerate_series = 0;
  ScreenConfig config;
  std::vector<FirmTrajectory> firms;        ///< the cohort, aggregated
  std::vector<PosteriorSummary> summaries;  ///< aligned with firms
  FlaggedGroup flagged_high;
  FlaggedGroup flagged_mid;
  FitResult fit;

  /// "high", "mid" or "none" for cohort member i.
  const char* flag_tier(std::size_t i) const;
};

/// Filters by min_years, aggregates, fits (w, tau) to the selected z
/// statistics and partitions the cohort at the two thresholds.
ScreenReport screen(const std::vector<FirmTrajectory>& trajectories, const ScreenConfig& config);

/// JSON report; fit draws are included on request.
void write_screen_json(std::ostream& os, const ScreenReport& report, bool include_draws = false);

/// One row per cohort firm.
void write_screen_csv(std::ostream& os, const ScreenReport& report);

struct SyntheticCohort {
  long null_firms = 1000;
  long signal_firms = 30;
  double signal_mean = 1.5;
  long years = 10;
  double phi = 0;  ///< AR(1) coefficient of the yearly noise, unit marginal variance
  std::uint64_t seed = 1;
};

/// z-score records for a simulated cohort. Signal firms are named
/// "S0000".., null firms "N0000"...
std::vector<TrajectoryRecord> synthetic_cohort(const SyntheticCohort& design);

}  // namespace hib

#endif  // HIB_SCREENING_HPP

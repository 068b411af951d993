#include "hib/screening.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "hib/parallel.hpp"
#include "hib/random.hpp"

namespace hib {

namespace {

std::string where(const std::string& source, long line) {
  return source + ":" + std::to_string(line) + ": ";
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_long(const std::string& s, long& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string record_label(const TrajectoryRecord& r) {
  std::string label = "firm '" + r.firm_id + "' year " + std::to_string(r.year);
  if (r.line > 0) label += " (line " + std::to_string(r.line) + ")";
  return label;
}

}  // namespace

std::vector<TrajectoryRecord> read_trajectory_csv(std::istream& in, const std::string& source) {
  std::string line;
  long line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw InputError(source + ": empty file, expected a header row");

  auto column = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int c_firm = column("firm_id"), c_year = column("year"), c_z = column("z");
  const int c_raw = column("raw_value"), c_mean = column("benchmark_mean"), c_sd = column("benchmark_sd");
  const bool raw_layout = c_raw >= 0 && c_mean >= 0 && c_sd >= 0;
  if (c_firm < 0 || c_year < 0 || (c_z < 0 && !raw_layout)) {
    throw InputError(where(source, line_no) +
                     "header must name firm_id, year and either z or raw_value, benchmark_mean, "
                     "benchmark_sd");
  }
  const bool use_z = c_z >= 0;

  std::vector<TrajectoryRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> f;
    try {
      f = split_csv_line(line);
    } catch (const std::invalid_argument& e) {
      throw InputError(where(source, line_no) + e.what());
    }
    if (f.size() != header.size()) {
      throw InputError(where(source, line_no) + "expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(f.size()));
    }
    TrajectoryRecord r;
    r.line = line_no;
    r.firm_id = f[c_firm];
    if (r.firm_id.empty()) throw InputError(where(source, line_no) + "empty firm_id");
    if (!parse_long(f[c_year], r.year)) {
      throw InputError(where(source, line_no) + "year '" + f[c_year] + "' is not an integer");
    }
    auto number = [&](int c, const char* name) {
      double v;
      if (!parse_double(f[c], v)) {
        throw InputError(where(source, line_no) + name + " '" + f[c] + "' is not a finite number");
      }
      return v;
    };
    if (use_z) {
      r.z = number(c_z, "z");
    } else {
      r.raw_value = number(c_raw, "raw_value");
      r.benchmark_mean = number(c_mean, "benchmark_mean");
      r.benchmark_sd = number(c_sd, "benchmark_sd");
      if (!(r.benchmark_sd > 0)) {
        throw InputError(where(source, line_no) + "benchmark_sd must be > 0 for " + record_label(r));
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<FirmTrajectory> standardize(const std::vector<TrajectoryRecord>& records) {
  std::map<std::string, std::vector<const TrajectoryRecord*>> by_firm;
  for (const TrajectoryRecord& r : records) by_firm[r.firm_id].push_back(&r);

  std::vector<FirmTrajectory> out;
  out.reserve(by_firm.size());
  for (auto& [firm, rows] : by_firm) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const TrajectoryRecord* l, const TrajectoryRecord* r) { return l->year < r->year; });
    const bool has_z = rows.front()->z.has_value();
    FirmTrajectory t;
    t.firm_id = firm;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const TrajectoryRecord& r = *rows[i];
      if (i > 0 && r.year == rows[i - 1]->year) {
        throw InputError("duplicate record for " + record_label(r));
      }
      if (r.z.has_value() != has_z) {
        throw InputError("firm '" + firm + "' mixes z and raw_value records");
      }
      if (has_z) {
        t.z_series.push_back(*r.z);
      } else {
        if (!(r.benchmark_sd > 0)) throw InputError("benchmark_sd must be > 0 for " + record_label(r));
        t.z_series.push_back((r.raw_value - r.benchmark_mean) / r.benchmark_sd);
      }
    }
    t.n = static_cast<long>(t.z_series.size());
    out.push_back(std::move(t));
  }
  return out;
}

Autocorrelation lag1_autocorr(const std::vector<double>& z) {
  if (z.size() < 2) throw DomainError("lag1_autocorr: series needs at least 2 points");
  const double n = static_cast<double>(z.size());
  double mean = 0;
  for (double v : z) mean += v;
  mean /= n;
  double den = 0, num = 0;
  for (std::size_t t = 0; t < z.size(); ++t) {
    den += (z[t] - mean) * (z[t] - mean);
    if (t > 0) num += (z[t] - mean) * (z[t - 1] - mean);
  }
  Autocorrelation r;
  if (!(den > 1e-300)) {
    r.degenerate = true;
    return r;
  }
  r.raw = num / den;
  r.phi = std::max(r.raw, 0.0);
  return r;
}

double effective_n(long n, double phi) {
  if (n < 1) throw DomainError("effective_n: n must be >= 1");
  if (!(phi >= 0 && phi < 1)) throw DomainError("effective_n: phi must lie in [0, 1)");
  return static_cast<double>(n) * (1 - phi) / (1 + phi);
}

FirmTrajectory aggregate(FirmTrajectory traj, std::optional<double> phi) {
  if (traj.z_series.empty()) throw DomainError("aggregate: firm '" + traj.firm_id + "' has no records");
  traj.n = static_cast<long>(traj.z_series.size());
  if (phi) {
    traj.phi_hat = *phi;
    traj.degenerate = false;
  } else if (traj.n < 2) {
    traj.phi_hat = 0;
    traj.degenerate = true;
  } else {
    const Autocorrelation ac = lag1_autocorr(traj.z_series);
    traj.phi_hat = ac.phi;
    traj.degenerate = ac.degenerate;
  }
  traj.n_eff = effective_n(traj.n, traj.phi_hat);
  double mean = 0;
  for (double v : traj.z_series) mean += v;
  mean /= static_cast<double>(traj.n);
  traj.z_stat_raw = mean * std::sqrt(static_cast<double>(traj.n));
  traj.z_stat = mean * std::sqrt(traj.n_eff);
  return traj;
}

void ScreenConfig::validate() const {
  if (min_years < 1) throw DomainError("ScreenConfig: min_years must be >= 1");
  if (!(mid_threshold > 0 && mid_threshold < high_threshold && high_threshold < 1)) {
    throw DomainError("ScreenConfig: need 0 < mid_threshold < high_threshold < 1");
  }
  fit.validate();
}

const char* ScreenReport::flag_tier(std::size_t i) const {
  const double p = summaries.at(i).incl_prob;
  if (p > flagged_high.lower) return "high";
  if (p > flagged_mid.lower) return "mid";
  return "none";
}

ScreenReport screen(const std::vector<FirmTrajectory>& trajectories, const ScreenConfig& config) {
  config.validate();
  ScreenReport rep;
  rep.config = config;
  rep.input_firms = static_cast<long>(trajectories.size());
  std::vector<const FirmTrajectory*> kept;
  for (const FirmTrajectory& t : trajectories) {
    if (static_cast<long>(t.z_series.size()) >= config.min_years) {
      kept.push_back(&t);
    } else {
      ++rep.excluded_short;
    }
  }
  if (kept.empty()) {
    throw InputError("screen: no firm has at least " + std::to_string(config.min_years) + " years of data");
  }
  rep.cohort_size = static_cast<long>(kept.size());
  rep.firms.resize(kept.size());
  parallel_for(kept.size(), config.fit.workers, [&](std::size_t i) { rep.firms[i] = aggregate(*kept[i]); });

  std::vector<double> z(kept.size());
  std::vector<std::string> ids(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const FirmTrajectory& f = rep.firms[i];
    z[i] = config.ess_correction ? f.z_stat : f.z_stat_raw;
    ids[i] = f.firm_id;
    rep.degenerate_series += f.degenerate;
  }
  rep.fit = fit_hyperparams(z, config.fit);
  rep.summaries = summarize(z, rep.fit, config.fit.a, config.fit.b, ids, config.fit.workers);

  rep.flagged_high.lower = config.high_threshold;
  rep.flagged_high.upper = 1;
  rep.flagged_mid.lower = config.mid_threshold;
  rep.flagged_mid.upper = config.high_threshold;
  double high_sum = 0, mid_sum = 0;
  for (const PosteriorSummary& s : rep.summaries) {
    if (s.incl_prob > config.high_threshold) {
      rep.flagged_high.firm_ids.push_back(s.observation_id);
      high_sum += 1 - s.incl_prob;
    } else if (s.incl_prob > config.mid_threshold) {
      rep.flagged_mid.firm_ids.push_back(s.observation_id);
      mid_sum += 1 - s.incl_prob;
    }
  }
  if (!rep.flagged_high.firm_ids.empty()) rep.flagged_high.expected_fdr = high_sum / rep.flagged_high.firm_ids.size();
  if (!rep.flagged_mid.firm_ids.empty()) rep.flagged_mid.expected_fdr = mid_sum / rep.flagged_mid.firm_ids.size();
  return rep;
}

namespace {

void write_group(JsonWriter& json, const FlaggedGroup& g) {
  json.begin_object()
      .field("incl_prob_above", g.lower)
      .field("incl_prob_at_most", g.upper)
      .field("count", static_cast<long>(g.firm_ids.size()))
      .field("expected_fdr", g.expected_fdr);
  json.key("firm_ids").begin_array();
  for (const std::string& id : g.firm_ids) json.value(id);
  json.end_array().end_object();
}

}  // namespace

void write_screen_json(std::ostream& os, const ScreenReport& rep, bool include_draws) {
  JsonWriter json(os);
  json.begin_object()
      .field("input_firms", rep.input_firms)
      .field("excluded_short", rep.excluded_short)
      .field("cohort_size", rep.cohort_size)
      .field("degenerate_series", rep.degenerate_series);
  json.key("config")
      .begin_object()
      .field("min_years", rep.config.min_years)
      .field("ess_correction", rep.config.ess_correction)
      .field("high_threshold", rep.config.high_threshold)
      .field("mid_threshold", rep.config.mid_threshold)
      .field("a", rep.config.fit.a)
      .field("b", rep.config.fit.b)
      .field("s", rep.config.fit.s)
      .field("tau_min", rep.config.fit.tau_min)
      .field("tau_max", rep.config.fit.tau_max)
      .field("n_draws", rep.config.fit.n_draws)
      .field("min_ess", rep.config.fit.min_ess)
      .field("seed", rep.config.fit.seed)
      .field("proposal", to_string(rep.config.fit.proposal))
      .end_object();
  json.key("flagged_high");
  write_group(json, rep.flagged_high);
  json.key("flagged_mid");
  write_group(json, rep.flagged_mid);
  json.key("fit")
      .begin_object()
      .field("post_mean_w", rep.fit.post_mean_w)
      .field("post_mean_tau", rep.fit.post_mean_tau)
      .field("is_effective_sample_size", rep.fit.is_effective_sample_size)
      .field("seed", rep.fit.seed)
      .field("n_draws", static_cast<long>(rep.fit.draws.size()));
  if (include_draws) {
    json.key("draws").begin_array();
    for (const ISDraw& d : rep.fit.draws) {
      json.begin_object().field("w", d.w).field("tau", d.tau).field("normalized_weight", d.weight).end_object();
    }
    json.end_array();
  }
  json.end_object();
  json.key("firms").begin_array();
  for (std::size_t i = 0; i < rep.firms.size(); ++i) {
    const FirmTrajectory& f = rep.firms[i];
    const PosteriorSummary& s = rep.summaries[i];
    json.begin_object()
        .field("firm_id", f.firm_id)
        .field("n", f.n)
        .field("phi_hat", f.phi_hat)
        .field("n_eff", f.n_eff)
        .field("z_raw", f.z_stat_raw)
        .field("z_corrected", f.z_stat)
        .field("degenerate_series", f.degenerate)
        .field("incl_prob", s.incl_prob)
        .field("local_fdr", s.local_fdr)
        .field("post_mean_beta", s.post_mean_beta)
        .field("post_var_beta", s.post_var_beta)
        .field("prob_positive", s.prob_positive)
        .field("outperf_prob", s.outperf_prob)
        .field("flag_tier", rep.flag_tier(i))
        .end_object();
  }
  json.end_array();
  json.end_object();
  json.finish();
}

void write_screen_csv(std::ostream& os, const ScreenReport& rep) {
  os << "firm_id,n,phi_hat,n_eff,z_raw,z_corrected,incl_prob,outperf_prob,local_fdr,post_mean_beta,flag_tier\n";
  for (std::size_t i = 0; i < rep.firms.size(); ++i) {
    const FirmTrajectory& f = rep.firms[i];
    const PosteriorSummary& s = rep.summaries[i];
    os << csv_field(f.firm_id) << ',' << f.n;
    for (double v : {f.phi_hat, f.n_eff, f.z_stat_raw, f.z_stat, s.incl_prob, s.outperf_prob, s.local_fdr,
                     s.post_mean_beta}) {
      os << ',' << format_number(v, kCsvDigits);
    }
    os << ',' << rep.flag_tier(i) << '\n';
  }
}

std::vector<TrajectoryRecord> synthetic_cohort(const SyntheticCohort& design) {
  if (design.null_firms < 0 || design.signal_firms < 0 || design.years < 1) {
    throw DomainError("synthetic_cohort: counts must be nonnegative and years >= 1");
  }
  if (!(std::abs(design.phi) < 1)) throw DomainError("synthetic_cohort: |phi| must be < 1");
  Rng rng(design.seed);
  const double innovation_sd = std::sqrt(1 - design.phi * design.phi);
  std::vector<TrajectoryRecord> out;
  auto firm = [&](const std::string& id, double mu) {
    double e = rng.normal();
    for (long t = 0; t < design.years; ++t) {
      if (t > 0) e = design.phi * e + innovation_sd * rng.normal();
      TrajectoryRecord r;
      r.firm_id = id;
      r.year = 2000 + t;
      r.z = mu + e;
      out.push_back(std::move(r));
    }
  };
  char id[32];
  for (long i = 0; i < design.signal_firms; ++i) {
    std::snprintf(id, sizeof id, "S%04ld", i);
    firm(id, design.signal_mean);
  }
  for (long i = 0; i < design.null_firms; ++i) {
    std::snprintf(id, sizeof id, "N%04ld", i);
    firm(id, 0);
  }
  return out;
}

}  // namespace hib

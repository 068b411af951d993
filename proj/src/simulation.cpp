#include "hib/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hib/marginal_table.hpp"
#include "hib/normal.hpp"
#include "hib/parallel.hpp"
#include "hib/random.hpp"

namespace hib {

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw DomainError("ExperimentConfig: " + msg); };
  if (p < 1) fail("p must be >= 1");
  if (k < 0 || k > p) fail("k must lie in [0, p]");
  if (signal == SignalKind::fixed && !(value > 0)) fail("value must be > 0");
  if (signal == SignalKind::random && !(scale > 0)) fail("scale must be > 0");
  if (t_dof < 1) fail("t_dof must be >= 1");
  if (replicates < 1) fail("replicates must be >= 1");
  if (estimators.empty()) fail("no estimators selected");
  if (!(flag_threshold > 0 && flag_threshold < 1)) fail("flag_threshold must lie in (0, 1)");
  laplace.validate();
  if (workers < 1) fail("workers must be >= 1");
  FitConfig f = fit;
  f.a = a;
  f.b = b;
  f.validate();
}

const char* to_string(SignalKind k) { return k == SignalKind::fixed ? "fixed" : "random"; }

std::string estimator_label(Estimator e, const ExperimentConfig& config) {
  if (e == Estimator::laplace) return "laplace_approx_js";
  std::ostringstream os;
  os << "hib_a" << format_number(config.a, 6) << "_b" << format_number(config.b, 6);
  return os.str();
}

Dataset generate_dataset(const ExperimentConfig& config, long replicate) {
  Rng rng(derive_seed(config.seed, 2 * static_cast<std::uint64_t>(replicate)));
  const std::size_t p = static_cast<std::size_t>(config.p);
  Dataset d;
  d.beta.assign(p, 0.0);
  d.y.resize(p);
  // Partial Fisher-Yates picks the k signal positions.
  std::vector<std::size_t> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t j = 0; j < static_cast<std::size_t>(config.k); ++j) {
    std::swap(idx[j], idx[j + rng.below(p - j)]);
    d.beta[idx[j]] = config.signal == SignalKind::fixed ? config.value : config.scale * rng.student_t(config.t_dof);
  }
  for (std::size_t i = 0; i < p; ++i) d.y[i] = d.beta[i] + rng.normal();
  return d;
}

HibEstimate run_hib_estimator(const std::vector<double>& y, double a, double b, const FitConfig& fit_config) {
  FitConfig cfg = fit_config;
  cfg.a = a;
  cfg.b = b;
  HibEstimate est;
  est.fit = fit_hyperparams(y, cfg);
  const auto summaries = summarize(y, est.fit, a, b, {}, cfg.workers);
  est.beta_hat.resize(y.size());
  est.incl_prob.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    est.beta_hat[i] = summaries[i].post_mean_beta;
    est.incl_prob[i] = summaries[i].incl_prob;
  }
  return est;
}

namespace {

// For y >= 0 under the Laplace(scale) slab: ln(g(y) / phi(y)) with g the
// slab marginal, and r = e^{2 a y} Phi(-y - a) / Phi(y - a), the ratio of
// the negative to the positive part of the slab posterior.
struct SlabTerms {
  double log_ratio;
  double r;
};

SlabTerms slab_terms(double y, double a) {
  const double lp = log_normal_cdf(y - a);
  const double r = std::exp(2 * a * y + log_normal_cdf(-y - a) - lp);
  const double log_g = std::log(a / 2) + a * a / 2 - a * y + lp + std::log1p(r);
  return {log_g - log_normal_pdf(y), r};
}

// P(beta > 0 | y) for y >= 0.
double prob_above_zero(double y, double w, double a) {
  const SlabTerms t = slab_terms(y, a);
  const double log_odds = std::log(w) - std::log1p(-w) + t.log_ratio;
  const double w_post = log_odds > 0 ? 1 / (1 + std::exp(-log_odds)) : std::exp(log_odds) / (1 + std::exp(log_odds));
  return w_post / (1 + t.r);
}

}  // namespace

double laplace_posterior_median(double y, double w, double scale) {
  if (y < 0) return -laplace_posterior_median(-y, w, scale);
  if (w <= 0) return 0;
  const double a = scale;
  const double p_plus = prob_above_zero(y, w, a);
  if (p_plus <= 0.5) return 0;
  // P(beta > m | y) = P+ Phi(y - a - m) / Phi(y - a) = 1/2.
  const double z0 = std::exp(log_normal_cdf(y - a)) / (2 * p_plus);
  if (z0 >= 1) return 0;
  return std::max(0.0, y - a - normal_quantile(z0));
}

double laplace_threshold(double w, double scale) {
  if (!(w > 0 && w <= 1)) throw DomainError("laplace_threshold: w must lie in (0, 1]");
  double lo = 0, hi = 1;
  while (prob_above_zero(hi, w, scale) <= 0.5) {
    hi *= 2;
    if (hi > 1e3) throw NumericError("laplace_threshold: no threshold below 1e3");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (prob_above_zero(mid, w, scale) > 0.5 ? hi : lo) = mid;
  }
  return hi;
}

void LaplaceConfig::validate() const {
  if (estimate_scale) {
    if (!(scale_min > 0 && scale_max > scale_min)) throw DomainError("LaplaceConfig: need 0 < scale_min < scale_max");
  } else if (!(scale > 0)) {
    throw DomainError("LaplaceConfig: scale must be > 0");
  }
}

namespace {

// Weight fit at a fixed slab scale, with the profile log likelihood
// sum ln(1 + w (g/phi - 1)).
LaplaceEstimate fit_weight(const std::vector<double>& y, double a, double& loglik) {
  LaplaceEstimate est;
  est.scale = a;

  // Lower bound: the weight whose threshold is the universal threshold.
  const double universal = std::sqrt(2 * std::log(static_cast<double>(std::max<std::size_t>(y.size(), 2))));
  double lo = -40, hi = 0;  // ln w
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (laplace_threshold(std::exp(mid), a) > universal ? lo : hi) = mid;
  }
  est.w_lower = std::exp(hi);

  // Score of the marginal likelihood in w is decreasing; find its root.
  std::vector<double> beta(y.size());  // g/phi - 1
  for (std::size_t i = 0; i < y.size(); ++i) {
    beta[i] = std::expm1(slab_terms(std::abs(y[i]), a).log_ratio);
  }
  auto score = [&](double w) {
    double s = 0;
    for (double bi : beta) s += std::isinf(bi) ? 1 / w : bi / (1 + w * bi);
    return s;
  };
  double w_lo = est.w_lower, w_hi = 1;
  if (score(w_lo) <= 0) {
    est.w = w_lo;
  } else if (score(w_hi) >= 0) {
    est.w = 1;
  } else {
    int iter = 0;
    for (; iter < 200 && w_hi - w_lo > 1e-14; ++iter) {
      const double mid = 0.5 * (w_lo + w_hi);
      (score(mid) > 0 ? w_lo : w_hi) = mid;
    }
    est.w = 0.5 * (w_lo + w_hi);
    if (!std::isfinite(est.w)) throw NumericError("run_laplace_baseline: weight search failed");
  }

  loglik = 0;
  for (double bi : beta) loglik += std::isinf(bi) ? INFINITY : std::log1p(est.w * bi);
  return est;
}

}  // namespace

LaplaceEstimate run_laplace_baseline(const std::vector<double>& y, const LaplaceConfig& config) {
  if (y.empty()) throw InputError("run_laplace_baseline: y is empty");
  config.validate();
  for (double v : y) {
    if (!std::isfinite(v)) throw InputError("run_laplace_baseline: non-finite y");
  }
  double loglik = 0;
  LaplaceEstimate est;
  if (!config.estimate_scale) {
    est = fit_weight(y, config.scale, loglik);
  } else {
    // Profile likelihood over ln a: grid search, then golden section.
    const double lo = std::log(config.scale_min), hi = std::log(config.scale_max);
    const int grid = 32;
    auto profile = [&](double log_a) {
      double ll;
      fit_weight(y, std::exp(log_a), ll);
      return ll;
    };
    int best = 0;
    double best_ll = -INFINITY;
    for (int i = 0; i <= grid; ++i) {
      const double ll = profile(lo + (hi - lo) * i / grid);
      if (ll > best_ll) {
        best_ll = ll;
        best = i;
      }
    }
    double left = lo + (hi - lo) * std::max(0, best - 1) / grid;
    double right = lo + (hi - lo) * std::min(grid, best + 1) / grid;
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double x1 = right - g * (right - left), x2 = left + g * (right - left);
    double f1 = profile(x1), f2 = profile(x2);
    for (int i = 0; i < 60 && right - left > 1e-8; ++i) {
      if (f1 > f2) {
        right = x2;
        x2 = x1;
        f2 = f1;
        x1 = right - g * (right - left);
        f1 = profile(x1);
      } else {
        left = x1;
        x1 = x2;
        f1 = f2;
        x2 = left + g * (right - left);
        f2 = profile(x2);
      }
    }
    double log_a = 0.5 * (left + right);
    if (best_ll > profile(log_a)) log_a = lo + (hi - lo) * best / grid;
    est = fit_weight(y, std::exp(log_a), loglik);
  }
  est.beta_hat.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) est.beta_hat[i] = laplace_posterior_median(y[i], est.w, est.scale);
  return est;
}

ReplicateScore score_replicate(const std::vector<double>& beta, const std::vector<double>& beta_hat,
                               const std::vector<bool>& flags) {
  if (beta.size() != beta_hat.size() || beta.size() != flags.size()) {
    throw InputError("score_replicate: lengths differ");
  }
  ReplicateScore s;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const double d = beta_hat[i] - beta[i];
    s.sse += d * d;
    if (flags[i]) {
      ++s.flagged;
      if (beta[i] == 0) ++s.fp;
    }
  }
  s.fdr = static_cast<double>(s.fp) / static_cast<double>(std::max<long>(1, s.flagged));
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const bool use_hib =
      std::find(config.estimators.begin(), config.estimators.end(), Estimator::hib) != config.estimators.end();
  // Build the shared table with every worker before replicates fan out.
  if (use_hib) MarginalTable::get(config.a, config.b, config.fit.s, config.workers);

  const std::size_t n_est = config.estimators.size();
  ExperimentResult res;
  res.config = config;
  res.rows.resize(static_cast<std::size_t>(config.replicates) * n_est);
  parallel_for(static_cast<std::size_t>(config.replicates), config.workers, [&](std::size_t r) {
    try {
      const Dataset d = generate_dataset(config, static_cast<long>(r));
      for (std::size_t e = 0; e < n_est; ++e) {
        ReplicateRow& row = res.rows[r * n_est + e];
        row.replicate = static_cast<long>(r);
        row.estimator = config.estimators[e];
        std::vector<bool> flags(d.y.size());
        if (row.estimator == Estimator::hib) {
          FitConfig fc = config.fit;
          fc.seed = derive_seed(config.seed, 2 * static_cast<std::uint64_t>(r) + 1);
          fc.workers = 1;
          const HibEstimate h = run_hib_estimator(d.y, config.a, config.b, fc);
          for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = h.incl_prob[i] > config.flag_threshold;
          row.score = score_replicate(d.beta, h.beta_hat, flags);
          row.w_hat = h.fit.post_mean_w;
          row.tau_hat = h.fit.post_mean_tau;
          row.is_ess = h.fit.is_effective_sample_size;
        } else {
          const LaplaceEstimate l = run_laplace_baseline(d.y, config.laplace);
          for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = l.beta_hat[i] != 0;
          row.score = score_replicate(d.beta, l.beta_hat, flags);
          row.w_hat = l.w;
          row.scale_hat = l.scale;
        }
      }
    } catch (const SeriesError& e) {
      throw SeriesError("replicate " + std::to_string(r) + ": " + e.what(), e.partial_sum(), e.terms());
    } catch (const DegenerateWeightsError& e) {
      throw DegenerateWeightsError("replicate " + std::to_string(r) + ": " + e.what());
    } catch (const NumericError& e) {
      throw NumericError("replicate " + std::to_string(r) + ": " + e.what());
    }
  });

  for (std::size_t e = 0; e < n_est; ++e) {
    EstimatorSummary s;
    s.estimator = config.estimators[e];
    for (long r = 0; r < config.replicates; ++r) {
      const ReplicateScore& sc = res.rows[r * n_est + e].score;
      s.sse_mean += sc.sse;
      s.fp_mean += static_cast<double>(sc.fp);
      s.fdr_mean += sc.fdr;
      s.flagged_mean += static_cast<double>(sc.flagged);
    }
    const double n = static_cast<double>(config.replicates);
    s.sse_mean /= n;
    s.fp_mean /= n;
    s.fdr_mean /= n;
    s.flagged_mean /= n;
    res.summaries.push_back(s);
  }
  return res;
}

namespace {

double signal_size(const ExperimentConfig& c) { return c.signal == SignalKind::fixed ? c.value : c.scale; }

}  // namespace

void write_experiment_csv(std::ostream& os, const std::vector<ExperimentResult>& results) {
  os << "estimator,signal,k,value_or_scale,t_dof,p,replicates,sse,fp,fdr\n";
  for (const ExperimentResult& r : results) {
    const ExperimentConfig& c = r.config;
    for (const EstimatorSummary& s : r.summaries) {
      os << csv_field(estimator_label(s.estimator, c)) << ',' << to_string(c.signal) << ',' << c.k << ','
         << format_number(signal_size(c), kCsvDigits) << ',' << c.t_dof << ',' << c.p << ',' << c.replicates
         << ',' << format_number(s.sse_mean, kCsvDigits) << ',' << format_number(s.fp_mean, kCsvDigits) << ','
         << format_number(s.fdr_mean, kCsvDigits) << '\n';
    }
  }
}

void write_experiment_json(std::ostream& os, const std::vector<ExperimentResult>& results) {
  JsonWriter json(os);
  json.begin_array();
  for (const ExperimentResult& r : results) {
    const ExperimentConfig& c = r.config;
    json.begin_object();
    json.key("config")
        .begin_object()
        .field("p", c.p)
        .field("signal", to_string(c.signal))
        .field("k", c.k)
        .field("value_or_scale", signal_size(c))
        .field("t_dof", c.t_dof)
        .field("replicates", c.replicates)
        .field("seed", c.seed)
        .field("a", c.a)
        .field("b", c.b)
        .field("flag_threshold", c.flag_threshold)
        .field("laplace_estimate_scale", c.laplace.estimate_scale)
        .field("laplace_scale", c.laplace.scale)
        .field("n_draws", c.fit.n_draws)
        .field("min_ess", c.fit.min_ess)
        .field("tau_min", c.fit.tau_min)
        .field("tau_max", c.fit.tau_max)
        .field("proposal", to_string(c.fit.proposal))
        .end_object();
    json.key("summaries").begin_array();
    for (const EstimatorSummary& s : r.summaries) {
      json.begin_object()
          .field("estimator", estimator_label(s.estimator, c))
          .field("sse_mean", s.sse_mean)
          .field("fp_mean", s.fp_mean)
          .field("fdr_mean", s.fdr_mean)
          .field("flagged_mean", s.flagged_mean)
          .end_object();
    }
    json.end_array();
    json.key("replicates").begin_array();
    for (const ReplicateRow& row : r.rows) {
      json.begin_object()
          .field("replicate", row.replicate)
          .field("estimator", estimator_label(row.estimator, c))
          .field("sse", row.score.sse)
          .field("fp", row.score.fp)
          .field("flagged", row.score.flagged)
          .field("fdr", row.score.fdr)
          .field("w_hat", row.w_hat);
      if (row.estimator == Estimator::laplace) json.field("scale_hat", row.scale_hat);
      if (row.estimator == Estimator::hib) json.field("tau_hat", row.tau_hat).field("is_ess", row.is_ess);
      json.end_object();
    }
    json.end_array();
    json.end_object();
  }
  json.end_array();
  json.finish();
}

}  // namespace hib

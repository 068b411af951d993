#include "hib/twogroups.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hib/marginal_table.hpp"
#include "hib/normal.hpp"
#include "hib/parallel.hpp"
#include "hib/posterior.hpp"
#include "hib/random.hpp"

namespace hib {

void TwoGroupsModel::validate() const {
  if (!(w >= 0 && w <= 1)) throw DomainError("TwoGroupsModel: w must lie in [0, 1]");
  hib.validate();
}

namespace {

// ln m1(y) - ln m0(y)
double log_marginal_ratio(double y, const HIBParams& p) {
  return marginal_m1(y, p).log_magnitude - (log_normal_pdf(y / p.sigma) - std::log(p.sigma));
}

// 1 / (1 + exp(x)) without overflow.
double logistic_complement(double x) {
  return x > 0 ? std::exp(-x) / (1 + std::exp(-x)) : 1 / (1 + std::exp(x));
}

// ln(1 - w + w e^{lr})
double log_mixture_ratio(double w, double lr) {
  if (lr <= 0) return std::log1p(w * std::expm1(lr));
  return lr + std::log(w + (1 - w) * std::exp(-lr));
}

}  // namespace

double local_fdr(double y, const TwoGroupsModel& m) {
  m.validate();
  if (m.w == 0) return 1;
  if (m.w == 1) return 0;
  const double lr = log_marginal_ratio(y, m.hib);
  return logistic_complement(std::log(m.w) - std::log1p(-m.w) + lr);
}

double tail_fdr(double y, const TwoGroupsModel& m, TailSide side) {
  m.validate();
  if (!std::isfinite(y)) throw DomainError("tail_fdr: y must be finite");
  if (m.w == 0) return 1;
  // Given kappa, y ~ N(0, sigma^2 / kappa) under the alternative.
  const double z = y / m.hib.sigma;
  double f0 = 0;
  double f1 = 0;
  switch (side) {
    case TailSide::lower:
      f0 = normal_cdf(z);
      f1 = detail::kappa_expectation(m.hib, [z](double k) { return normal_cdf(z * std::sqrt(k)); });
      break;
    case TailSide::upper:
      f0 = normal_cdf(-z);
      f1 = detail::kappa_expectation(m.hib, [z](double k) { return normal_cdf(-z * std::sqrt(k)); });
      break;
    case TailSide::two_sided: {
      const double az = std::abs(z);
      f0 = 2 * normal_cdf(-az);
      f1 = 2 * detail::kappa_expectation(m.hib, [az](double k) { return normal_cdf(-az * std::sqrt(k)); });
      break;
    }
  }
  if (!std::isfinite(f1)) throw NumericError("tail_fdr: quadrature failed");
  const double num = (1 - m.w) * f0;
  const double den = m.w * f1 + num;
  if (den <= 0) return 0;
  return std::clamp(num / den, 0.0, 1.0);
}

void FitConfig::validate() const {
  auto fail = [](const std::string& msg) { throw DomainError("FitConfig: " + msg); };
  if (n_draws < 100) fail("n_draws must be >= 100");
  if (!(min_ess > 0)) fail("min_ess must be > 0");
  if (!(a > 0) || !(b > 0)) fail("a and b must be > 0");
  if (!std::isfinite(s)) fail("s must be finite");
  if (!(tau_min > 0) || !(tau_max > tau_min)) fail("need 0 < tau_min < tau_max");
  HIBParams p;
  p.a = a;
  p.b = b;
  p.s = s;
  p.tau = tau_min;
  p.validate();
  p.tau = tau_max;
  p.validate();
  if (workers < 1) fail("workers must be >= 1");
}

const char* to_string(Proposal p) { return p == Proposal::laplace ? "laplace" : "prior"; }

const char* to_string(TailSide side) {
  switch (side) {
    case TailSide::lower: return "lower";
    case TailSide::upper: return "upper";
    case TailSide::two_sided: return "two_sided";
  }
  return "?";
}

namespace {

constexpr double kPriorShare = 0.1;  // defensive prior component of the proposal
constexpr int kTDof = 5;
constexpr double kInflation = 1.5;

double sigmoid(double x) { return x >= 0 ? 1 / (1 + std::exp(-x)) : std::exp(x) / (1 + std::exp(x)); }

double logit(double p) { return std::log(p) - std::log1p(-p); }

// ln sigma(x) and ln(1 - sigma(x))
double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

// Log ratios ln m1 - ln m0 of every observation at every u-node, row-major.
struct RatioGrid {
  int u_count = 0;
  std::vector<double> values;

  const double* row(std::size_t i) const { return values.data() + i * u_count; }
};

RatioGrid build_ratio_grid(const std::vector<double>& z, const MarginalTable& table, int workers) {
  RatioGrid g;
  g.u_count = table.u_count();
  g.values.resize(z.size() * g.u_count);
  parallel_for(z.size(), workers, [&](std::size_t i) {
    const double t = std::abs(z[i]);
    const MarginalColumn c = table.column(t);
    const double log_m0 = log_normal_pdf(t);
    for (int k = 0; k < g.u_count; ++k) g.values[i * g.u_count + k] = c.log_m1[k] - log_m0;
  });
  return g;
}

// Fit coordinates: theta = logit w and phi = logit of the position of
// ln tau within [ln tau_min, ln tau_max].
class Posterior2d {
 public:
  Posterior2d(const RatioGrid& grid, const MarginalTable& table, const FitConfig& cfg)
      : grid_(grid), table_(table), cfg_(cfg) {
    log_tau_lo_ = std::log(cfg.tau_min);
    log_tau_span_ = std::log(cfg.tau_max) - log_tau_lo_;
    cdf_lo_ = std::atan(cfg.tau_min);
    cdf_hi_ = std::atan(cfg.tau_max);
    n_ = grid.values.size() / grid.u_count;
  }

  double tau_of(double phi) const { return std::exp(log_tau_lo_ + sigmoid(phi) * log_tau_span_); }
  double phi_of(double tau) const { return logit((std::log(tau) - log_tau_lo_) / log_tau_span_); }

  double log_likelihood(double w, double tau) const {
    const Stencil st = table_.u_stencil(2 * std::log(tau));
    double ll = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double* r = grid_.row(i) + st.first;
      const double lr = st.w[0] * r[0] + st.w[1] * r[1] + st.w[2] * r[2] + st.w[3] * r[3];
      ll += log_mixture_ratio(w, lr);
    }
    return ll;
  }

  // Prior density of (theta, phi): uniform w, truncated half-Cauchy tau,
  // and the Jacobians of both maps.
  double log_prior(double theta, double phi) const {
    const double tau = tau_of(phi);
    const double log_p_tau = -std::log1p(tau * tau) - std::log(cdf_hi_ - cdf_lo_);
    const double log_jac_w = log_sigmoid(theta) + log_sigmoid(-theta);
    const double log_jac_tau =
        std::log(tau) + std::log(log_tau_span_) + log_sigmoid(phi) + log_sigmoid(-phi);
    return log_p_tau + log_jac_w + log_jac_tau;
  }

  double log_target(double theta, double phi) const {
    return log_likelihood(sigmoid(theta), tau_of(phi)) + log_prior(theta, phi);
  }

  // Prior draw in (theta, phi).
  std::array<double, 2> draw_prior(Rng& rng) const {
    const double w = rng.uniform();
    const double tau = std::tan(cdf_lo_ + rng.uniform() * (cdf_hi_ - cdf_lo_));
    return {logit(w), phi_of(std::clamp(tau, cfg_.tau_min, cfg_.tau_max))};
  }

 private:
  const RatioGrid& grid_;
  const MarginalTable& table_;
  const FitConfig& cfg_;
  double log_tau_lo_, log_tau_span_, cdf_lo_, cdf_hi_;
  std::size_t n_;
};

// Nelder-Mead maximization in two dimensions.
template <typename F>
std::array<double, 2> maximize(F f, std::array<double, 2> start, double step) {
  using Point = std::array<double, 2>;
  std::array<Point, 3> x = {start, Point{start[0] + step, start[1]}, Point{start[0], start[1] + step}};
  std::array<double, 3> fx = {f(x[0]), f(x[1]), f(x[2])};
  auto lerp = [](const Point& a, const Point& b, double t) {
    return Point{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };
  for (int iter = 0; iter < 400; ++iter) {
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return fx[i] > fx[j]; });
    const int best = order[0], mid = order[1], worst = order[2];
    if (std::abs(fx[best] - fx[worst]) < 1e-9 * (1 + std::abs(fx[best])) &&
        std::hypot(x[best][0] - x[worst][0], x[best][1] - x[worst][1]) < 1e-6) {
      break;
    }
    const Point centroid = lerp(x[best], x[mid], 0.5);
    const Point reflect = lerp(centroid, x[worst], -1);
    const double f_reflect = f(reflect);
    if (f_reflect > fx[best]) {
      const Point expand = lerp(centroid, x[worst], -2);
      const double f_expand = f(expand);
      if (f_expand > f_reflect) {
        x[worst] = expand;
        fx[worst] = f_expand;
      } else {
        x[worst] = reflect;
        fx[worst] = f_reflect;
      }
    } else if (f_reflect > fx[mid]) {
      x[worst] = reflect;
      fx[worst] = f_reflect;
    } else {
      const Point contract = lerp(centroid, x[worst], 0.5);
      const double f_contract = f(contract);
      if (f_contract > fx[worst]) {
        x[worst] = contract;
        fx[worst] = f_contract;
      } else {
        for (int i : {mid, worst}) {
          x[i] = lerp(x[best], x[i], 0.5);
          fx[i] = f(x[i]);
        }
      }
    }
  }
  const int best = static_cast<int>(std::max_element(fx.begin(), fx.end()) - fx.begin());
  return x[best];
}

struct TProposal {
  Eigen::Vector2d mean;
  Eigen::Matrix2d chol;  // lower factor of the scale matrix
  double log_norm;       // log density normalizer

  double log_density(const Eigen::Vector2d& x) const {
    const Eigen::Vector2d d = chol.triangularView<Eigen::Lower>().solve(x - mean);
    return log_norm - 0.5 * (kTDof + 2) * std::log1p(d.squaredNorm() / kTDof);
  }

  Eigen::Vector2d draw(Rng& rng) const {
    const Eigen::Vector2d g(rng.normal(), rng.normal());
    const double scale = std::sqrt(rng.chi_square(kTDof) / kTDof);
    return mean + chol * g / scale;
  }
};

TProposal laplace_proposal(const Posterior2d& post) {
  auto f = [&](const std::array<double, 2>& x) { return post.log_target(x[0], x[1]); };
  // Coarse grid, then simplex refinement from the best grid point.
  std::array<double, 2> best = {0, 0};
  double best_f = -INFINITY;
  for (double theta = -14; theta <= 8; theta += 0.5) {
    for (double phi = -7; phi <= 7; phi += 0.5) {
      const double v = f({theta, phi});
      if (v > best_f) {
        best_f = v;
        best = {theta, phi};
      }
    }
  }
  const std::array<double, 2> mode = maximize(f, best, 0.25);

  const double h = 0.02;
  const double f0 = f(mode);
  auto at = [&](double dt, double dp) { return f({mode[0] + dt, mode[1] + dp}); };
  Eigen::Matrix2d hess;
  hess(0, 0) = (at(h, 0) - 2 * f0 + at(-h, 0)) / (h * h);
  hess(1, 1) = (at(0, h) - 2 * f0 + at(0, -h)) / (h * h);
  hess(0, 1) = hess(1, 0) = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);

  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
  Eigen::LLT<Eigen::Matrix2d> neg(-hess);
  if (neg.info() == Eigen::Success) {
    cov = neg.solve(Eigen::Matrix2d::Identity());
  } else {
    // Flat or saddle-shaped at the mode: fall back to the diagonal curvature.
    for (int i = 0; i < 2; ++i) cov(i, i) = hess(i, i) < 0 ? -1 / hess(i, i) : 1.0;
  }
  cov *= kInflation * kInflation;

  TProposal q;
  q.mean = Eigen::Vector2d(mode[0], mode[1]);
  q.chol = Eigen::LLT<Eigen::Matrix2d>(cov).matrixL();
  q.log_norm = std::lgamma(0.5 * (kTDof + 2)) - std::lgamma(0.5 * kTDof) - std::log(kTDof * M_PI) -
               std::log(q.chol(0, 0) * q.chol(1, 1));
  return q;
}

}  // namespace

FitResult fit_hyperparams(const std::vector<double>& z, const FitConfig& config) {
  config.validate();
  if (z.empty()) throw InputError("fit_hyperparams: z is empty");
  for (double v : z) {
    if (!std::isfinite(v)) throw InputError("fit_hyperparams: z contains a non-finite value");
  }

  const auto table = MarginalTable::get(config.a, config.b, config.s, config.workers);
  const RatioGrid grid = build_ratio_grid(z, *table, config.workers);
  const Posterior2d post(grid, *table, config);

  Rng rng(config.seed);
  const std::size_t n = static_cast<std::size_t>(config.n_draws);
  std::vector<std::array<double, 2>> x(n);
  std::vector<double> log_q(n);

  if (config.proposal == Proposal::prior) {
    for (std::size_t j = 0; j < n; ++j) x[j] = post.draw_prior(rng);
  } else {
    const TProposal q = laplace_proposal(post);
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.uniform() < kPriorShare) {
        x[j] = post.draw_prior(rng);
      } else {
        const Eigen::Vector2d d = q.draw(rng);
        x[j] = {d(0), d(1)};
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double lt = q.log_density(Eigen::Vector2d(x[j][0], x[j][1]));
      const double lp = post.log_prior(x[j][0], x[j][1]);
      const double hi = std::max(lt, lp);
      log_q[j] = hi + std::log((1 - kPriorShare) * std::exp(lt - hi) + kPriorShare * std::exp(lp - hi));
    }
  }

  std::vector<double> log_w(n);
  parallel_for(n, config.workers, [&](std::size_t j) {
    const double w = sigmoid(x[j][0]);
    const double tau = post.tau_of(x[j][1]);
    const double ll = post.log_likelihood(w, tau);
    // With the prior as proposal the prior cancels.
    log_w[j] = config.proposal == Proposal::prior ? ll : ll + post.log_prior(x[j][0], x[j][1]) - log_q[j];
  });

  const double max_log = *std::max_element(log_w.begin(), log_w.end());
  if (!std::isfinite(max_log)) throw NumericError("fit_hyperparams: non-finite importance weights");
  double total = 0;
  for (double lw : log_w) total += std::exp(lw - max_log);

  FitResult fit;
  fit.seed = config.seed;
  fit.a = config.a;
  fit.b = config.b;
  fit.s = config.s;
  fit.proposal = config.proposal;
  fit.draws.resize(n);
  double sum_sq = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double wt = std::exp(log_w[j] - max_log) / total;
    fit.draws[j] = {sigmoid(x[j][0]), post.tau_of(x[j][1]), wt};
    fit.post_mean_w += wt * fit.draws[j].w;
    fit.post_mean_tau += wt * fit.draws[j].tau;
    sum_sq += wt * wt;
  }
  fit.is_effective_sample_size = 1 / sum_sq;
  if (fit.is_effective_sample_size < config.min_ess) {
    std::ostringstream os;
    os << "fit_hyperparams: importance-sampling effective sample size "
       << fit.is_effective_sample_size << " is below min_ess " << config.min_ess
       << "; increase n_draws";
    throw DegenerateWeightsError(os.str());
  }
  return fit;
}

std::vector<PosteriorSummary> summarize(const std::vector<double>& z, const FitResult& fit, double a,
                                        double b, const std::vector<std::string>& ids, int workers) {
  if (!ids.empty() && ids.size() != z.size()) {
    throw InputError("summarize: ids and z differ in length");
  }
  if (fit.draws.empty()) throw InputError("summarize: fit has no draws");
  const auto table = MarginalTable::get(a, b, fit.s, workers);

  // Draws carrying negligible weight are skipped.
  double max_weight = 0;
  for (const ISDraw& d : fit.draws) max_weight = std::max(max_weight, d.weight);
  struct Active {
    double weight;
    double log_odds;  // ln(w / (1 - w))
    Stencil stencil;
  };
  std::vector<Active> active;
  for (const ISDraw& d : fit.draws) {
    if (d.weight < 1e-14 * max_weight) continue;
    if (d.w <= 0) continue;  // contributes zero inclusion mass
    const double log_odds = d.w >= 1 ? INFINITY : std::log(d.w) - std::log1p(-d.w);
    active.push_back({d.weight, log_odds, table->u_stencil(2 * std::log(d.tau))});
  }
  double total_weight = 0;
  for (const ISDraw& d : fit.draws) total_weight += d.weight;

  std::vector<PosteriorSummary> out(z.size());
  parallel_for(z.size(), workers, [&](std::size_t i) {
    PosteriorSummary& s = out[i];
    s.observation_id = ids.empty() ? std::to_string(i) : ids[i];
    s.z = z[i];
    if (!std::isfinite(z[i])) throw InputError("summarize: non-finite z for observation " + s.observation_id);
    const double t = std::abs(z[i]);
    const MarginalColumn c = table->column(t);
    const double log_m0 = log_normal_pdf(t);
    double incl = 0, mean = 0, second = 0, outperf = 0;
    for (const Active& d : active) {
      const double lr = d.stencil.apply(c.log_m1) - log_m0;
      const double p = std::isinf(d.log_odds) ? 1.0 : logistic_complement(-(d.log_odds + lr));
      const double e1 = std::clamp(d.stencil.apply(c.e1), 0.0, 1.0);
      const double e2 = std::clamp(d.stencil.apply(c.e2), 0.0, e1);
      double pp = std::clamp(d.stencil.apply(c.pp), 0.5, 1.0);
      if (z[i] < 0) pp = 1 - pp;
      const double wp = d.weight * p;
      incl += wp;
      mean += wp * (1 - e1) * z[i];
      second += wp * ((1 - e1) + z[i] * z[i] * (1 - 2 * e1 + e2));
      outperf += wp * pp;
    }
    incl /= total_weight;
    mean /= total_weight;
    second /= total_weight;
    outperf /= total_weight;
    s.incl_prob = std::clamp(incl, 0.0, 1.0);
    s.local_fdr = 1 - s.incl_prob;
    s.post_mean_beta = mean;
    s.post_var_beta = std::max(0.0, second - mean * mean);
    s.outperf_prob = std::min(outperf, s.incl_prob);
    s.prob_positive = incl > 0 ? std::clamp(outperf / incl, 0.0, 1.0) : (z[i] == 0 ? 0.5 : (z[i] > 0 ? 1.0 : 0.0));
    if (z[i] == 0) s.prob_positive = 0.5;
  });
  return out;
}

GroupFdr group_fdr(const std::vector<PosteriorSummary>& summaries, double threshold) {
  if (!(threshold > 0 && threshold < 1)) throw DomainError("group_fdr: threshold must lie in (0, 1)");
  GroupFdr g;
  double sum = 0;
  for (const PosteriorSummary& s : summaries) {
    if (s.incl_prob > threshold) {
      ++g.count;
      sum += 1 - s.incl_prob;
    }
  }
  g.expected_fdr = g.count > 0 ? sum / g.count : 0.0;
  return g;
}

void write_summaries_csv(std::ostream& os, const std::vector<PosteriorSummary>& summaries) {
  os << "observation_id,z,incl_prob,local_fdr,post_mean_beta,post_var_beta,prob_positive,outperf_prob\n";
  for (const PosteriorSummary& s : summaries) {
    os << csv_field(s.observation_id);
    for (double v : {s.z, s.incl_prob, s.local_fdr, s.post_mean_beta, s.post_var_beta, s.prob_positive,
                     s.outperf_prob}) {
      os << ',' << format_number(v, kCsvDigits);
    }
    os << '\n';
  }
}

void write_summary_json(JsonWriter& json, const PosteriorSummary& s) {
  json.begin_object()
      .field("observation_id", s.observation_id)
      .field("z", s.z)
      .field("incl_prob", s.incl_prob)
      .field("local_fdr", s.local_fdr)
      .field("post_mean_beta", s.post_mean_beta)
      .field("post_var_beta", s.post_var_beta)
      .field("prob_positive", s.prob_positive)
      .field("outperf_prob", s.outperf_prob)
      .end_object();
}

void write_summaries_json(std::ostream& os, const std::vector<PosteriorSummary>& summaries) {
  JsonWriter json(os);
  json.begin_array();
  for (const PosteriorSummary& s : summaries) write_summary_json(json, s);
  json.end_array();
  json.finish();
}

void write_fit_json(JsonWriter& json, const FitResult& fit) {
  json.begin_object()
      .field("post_mean_w", fit.post_mean_w)
      .field("post_mean_tau", fit.post_mean_tau)
      .field("is_effective_sample_size", fit.is_effective_sample_size)
      .field("seed", fit.seed)
      .field("a", fit.a)
      .field("b", fit.b)
      .field("s", fit.s)
      .field("proposal", to_string(fit.proposal));
  json.key("draws").begin_array();
  for (const ISDraw& d : fit.draws) {
    json.begin_object().field("w", d.w).field("tau", d.tau).field("normalized_weight", d.weight).end_object();
  }
  json.end_array();
  json.end_object();
}

}  // namespace hib

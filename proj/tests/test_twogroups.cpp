#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hib/marginal_table.hpp"
#include "hib/normal.hpp"
#include "hib/posterior.hpp"
#include "hib/random.hpp"
#include "hib/twogroups.hpp"
#include "oracle.hpp"

using namespace hib;

namespace {

TwoGroupsModel model(double w, double a = 0.5, double b = 1, double tau = 1, double s = 0) {
  TwoGroupsModel m;
  m.w = w;
  m.hib.a = a;
  m.hib.b = b;
  m.hib.tau = tau;
  m.hib.s = s;
  return m;
}

// m1(y) for sigma = 1 as an integral over kappa of N(y | 0, 1/kappa).
double oracle_m1(double y, const HIBParams& p) {
  const double log_norm = oracle::log_kappa_integral(p.a, p.b, p.tau, p.s);
  const double log_num = oracle::log_kappa_integral(p.a, p.b, p.tau, p.s, [y](double k) {
    return std::sqrt(k) * normal_pdf(y * std::sqrt(k));
  });
  return std::exp(log_num - log_norm);
}

// P(Y <= y) under the alternative.
double oracle_f1(double y, const HIBParams& p) {
  const double log_norm = oracle::log_kappa_integral(p.a, p.b, p.tau, p.s);
  const double log_num = oracle::log_kappa_integral(
      p.a, p.b, p.tau, p.s, [y](double k) { return normal_cdf(y * std::sqrt(k)); });
  return std::exp(log_num - log_norm);
}

std::vector<double> shifted_sample(std::uint64_t seed, int n, int k, double shift) {
  Rng rng(seed);
  std::vector<double> z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal() + (i < k ? shift : 0.0);
  return z;
}

FitResult single_draw(double w, double tau) {
  FitResult f;
  f.draws = {{w, tau, 1.0}};
  f.post_mean_w = w;
  f.post_mean_tau = tau;
  f.is_effective_sample_size = 1;
  return f;
}

}  // namespace

TEST_CASE("local fdr") {
  for (double y : {-5.0, 0.0, 2.0, 30.0}) {
    CHECK(local_fdr(y, model(0)) == 1.0);
    CHECK(local_fdr(y, model(1)) == 0.0);
  }
  const TwoGroupsModel m = model(0.1);
  const double m1 = oracle_m1(3, m.hib);
  const double m0 = normal_pdf(3);
  CHECK(local_fdr(3, m) == doctest::Approx(0.9 * m0 / (0.1 * m1 + 0.9 * m0)).epsilon(1e-9));

  // Nonincreasing in |y| for a spread of parameters.
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {0.5, 1.0, 2.0}) {
      for (double tau : {0.1, 1.0, 10.0}) {
        const TwoGroupsModel mm = model(0.2, a, b, tau);
        double prev = 1;
        for (double y = 0; y <= 12; y += 0.25) {
          const double v = local_fdr(y, mm);
          CHECK(v >= 0);
          CHECK(v <= prev + 1e-12);
          CHECK(local_fdr(-y, mm) == doctest::Approx(v).epsilon(1e-12));
          prev = v;
        }
      }
    }
  }
  CHECK_THROWS_AS(local_fdr(1, model(1.5)), DomainError);
}

TEST_CASE("tail fdr") {
  for (TailSide side : {TailSide::lower, TailSide::upper, TailSide::two_sided}) {
    CHECK(tail_fdr(-1, model(0), side) == 1.0);
    CHECK(tail_fdr(2, model(0), side) == 1.0);
  }

  const TwoGroupsModel m = model(0.05);
  const double f1 = oracle_f1(-2.5, m.hib);
  const double f0 = normal_cdf(-2.5);
  CHECK(tail_fdr(-2.5, m, TailSide::lower) ==
        doctest::Approx(0.95 * f0 / (0.05 * f1 + 0.95 * f0)).epsilon(1e-8));
  // Symmetric marginals.
  CHECK(tail_fdr(2.5, m, TailSide::upper) ==
        doctest::Approx(tail_fdr(-2.5, m, TailSide::lower)).epsilon(1e-10));
  CHECK(tail_fdr(2.5, m, TailSide::two_sided) ==
        doctest::Approx(0.95 * 2 * f0 / (0.05 * 2 * f1 + 0.95 * 2 * f0)).epsilon(1e-8));

  // FDR(y) = E[fdr(Y) | Y <= y] under the mixture: integrate m and (1 - w) m0.
  using boost::math::quadrature::gauss_kronrod;
  const TwoGroupsModel mm = model(0.2, 0.5, 1, 2);
  auto mix = [&](double t) {
    return 0.2 * std::exp(marginal_m1(t, mm.hib).log_magnitude) + 0.8 * normal_pdf(t);
  };
  // Mass below -400 under the heavy-tailed alternative comes from the oracle.
  const double far_tail = 0.2 * oracle_f1(-400, mm.hib);
  for (double y = -6; y <= 2; y += 1) {
    const double num = 0.8 * normal_cdf(y);
    const double den = far_tail + gauss_kronrod<double, 61>::integrate(mix, -400.0, y, 15, 1e-12);
    CHECK(tail_fdr(y, mm, TailSide::lower) == doctest::Approx(num / den).epsilon(1e-4));
  }
  // fdr falls further out in the tail, so the tail average lies below fdr(y).
  for (double y = -8; y <= -1; y += 0.5) {
    CHECK(tail_fdr(y, mm, TailSide::lower) <= local_fdr(y, mm) + 1e-12);
  }
}

TEST_CASE("table interpolation against exact nodes") {
  const auto table = MarginalTable::get(0.5, 1, 0);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0, 1);
  const double u_lo = std::log(kMinTau2), u_hi = std::log(kMaxTau2);
  for (int i = 0; i < 120; ++i) {
    const double t = i < 80 ? 15 * unit(gen) : 500 * unit(gen) * unit(gen);
    const double u = u_lo + (u_hi - u_lo) * unit(gen);
    const MarginalNode exact = exact_marginal_node(t, u, 0.5, 1, 0);
    const MarginalColumn c = table->column(t);
    const Stencil st = table->u_stencil(u);
    CHECK(std::abs(st.apply(c.log_m1) - exact.log_m1) < 1e-5);
    CHECK(std::abs(st.apply(c.e1) - exact.e1) < 1e-5);
    CHECK(std::abs(st.apply(c.e2) - exact.e2) < 1e-5);
    CHECK(std::abs(st.apply(c.pp) - exact.pp) < 1e-5);
  }
  // Exact node against the direct posterior routines.
  HIBParams p;
  p.tau = std::exp(0.5 * 1.3);
  const MarginalNode n = exact_marginal_node(2.7, 1.3, 0.5, 1, 0);
  const EffectPosterior e = effect_posterior(2.7, p);
  CHECK(n.log_m1 == doctest::Approx(e.log_marginal_m1).epsilon(1e-12));
  CHECK(n.e1 == doctest::Approx(e.e_kappa).epsilon(1e-12));
  CHECK(n.pp == doctest::Approx(e.prob_positive).epsilon(1e-10));
}

TEST_CASE("fit on null data") {
  const std::vector<double> z = shifted_sample(21, 5000, 0, 0);
  FitConfig cfg;
  cfg.seed = 4;
  const FitResult fit = fit_hyperparams(z, cfg);
  CHECK(fit.post_mean_w < 0.05);
  double total = 0, sq = 0;
  for (const ISDraw& d : fit.draws) {
    CHECK(d.weight >= 0);
    CHECK(d.tau >= cfg.tau_min);
    CHECK(d.tau <= cfg.tau_max);
    total += d.weight;
    sq += d.weight * d.weight;
  }
  CHECK(total == doctest::Approx(1).epsilon(1e-12));
  CHECK(fit.is_effective_sample_size == doctest::Approx(1 / sq).epsilon(1e-12));
  CHECK(fit.is_effective_sample_size <= cfg.n_draws);

  const auto s = summarize(z, fit, cfg.a, cfg.b);
  long flagged = 0;
  for (const auto& x : s) flagged += x.incl_prob > 0.5;
  CHECK(flagged < 50);
}

TEST_CASE("fit with a block of shifted signals") {
  const std::vector<double> z = shifted_sample(22, 1000, 100, 5);
  FitConfig cfg;
  cfg.seed = 9;
  const FitResult fit = fit_hyperparams(z, cfg);
  // The alternative keeps a share of its mass near zero, so near-null noise
  // is partly absorbed by it and w sits above the signal fraction.
  CHECK(fit.post_mean_w > 0.05);
  CHECK(fit.post_mean_w < 0.4);
  CHECK(fit.is_effective_sample_size > 1000);

  // The proposal only changes the Monte Carlo error.
  FitConfig prior_cfg = cfg;
  prior_cfg.proposal = Proposal::prior;
  prior_cfg.n_draws = 20000;
  const FitResult prior_fit = fit_hyperparams(z, prior_cfg);
  CHECK(prior_fit.post_mean_w == doctest::Approx(fit.post_mean_w).epsilon(0.05));
  CHECK(prior_fit.post_mean_tau == doctest::Approx(fit.post_mean_tau).epsilon(0.05));

  const auto s = summarize(z, fit, cfg.a, cfg.b);
  const auto six = summarize({6.0}, fit, cfg.a, cfg.b);
  CHECK(six[0].incl_prob > 0.9);
  long found = 0;
  for (int i = 0; i < 100; ++i) found += s[i].incl_prob > 0.5;
  CHECK(found >= 95);
  for (const auto& x : s) {
    CHECK(x.incl_prob + x.local_fdr == doctest::Approx(1).epsilon(1e-15));
    CHECK(x.outperf_prob <= x.incl_prob + 1e-15);
    CHECK(std::abs(x.post_mean_beta) <= std::abs(x.z) + 1e-12);
    CHECK(x.post_var_beta >= 0);
    CHECK(x.prob_positive >= 0);
    CHECK(x.prob_positive <= 1);
  }

  // Group fdr over the inclusion probabilities just computed.
  const GroupFdr g = group_fdr(s, 0.9);
  CHECK(g.count >= 90);
  CHECK(g.expected_fdr < 0.1);
}

TEST_CASE("fit invariances") {
  std::vector<double> z = shifted_sample(23, 400, 20, 4);
  FitConfig cfg;
  cfg.n_draws = 1000;
  cfg.seed = 17;
  const FitResult base = fit_hyperparams(z, cfg);

  std::vector<double> rev(z.rbegin(), z.rend());
  const FitResult reversed = fit_hyperparams(rev, cfg);
  CHECK(reversed.post_mean_w == doctest::Approx(base.post_mean_w).epsilon(1e-10));
  CHECK(reversed.post_mean_tau == doctest::Approx(base.post_mean_tau).epsilon(1e-10));

  cfg.workers = 4;
  const FitResult threaded = fit_hyperparams(z, cfg);
  REQUIRE(threaded.draws.size() == base.draws.size());
  for (std::size_t j = 0; j < base.draws.size(); ++j) {
    CHECK(threaded.draws[j].w == base.draws[j].w);
    CHECK(threaded.draws[j].tau == base.draws[j].tau);
    CHECK(threaded.draws[j].weight == base.draws[j].weight);
  }
  CHECK(threaded.post_mean_w == base.post_mean_w);
  const auto s1 = summarize(z, base, 0.5, 1, {}, 1);
  const auto s4 = summarize(z, base, 0.5, 1, {}, 4);
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(s1[i].incl_prob == s4[i].incl_prob);
    CHECK(s1[i].post_mean_beta == s4[i].post_mean_beta);
  }

  cfg.seed = 18;
  CHECK(fit_hyperparams(z, cfg).post_mean_w != base.post_mean_w);
}

TEST_CASE("fit errors") {
  FitConfig cfg;
  CHECK_THROWS_AS(fit_hyperparams({}, cfg), InputError);
  CHECK_THROWS_AS(fit_hyperparams({1.0, NAN}, cfg), InputError);
  cfg.n_draws = 50;
  CHECK_THROWS_AS(fit_hyperparams({1.0}, cfg), DomainError);
  cfg.n_draws = 5000;
  cfg.tau_max = 100;
  CHECK_THROWS_AS(fit_hyperparams({1.0}, cfg), DomainError);

  // Prior draws cannot cover a posterior this concentrated.
  FitConfig prior_cfg;
  prior_cfg.proposal = Proposal::prior;
  prior_cfg.n_draws = 200;
  prior_cfg.min_ess = 150;
  const std::vector<double> z = shifted_sample(24, 3000, 0, 0);
  try {
    fit_hyperparams(z, prior_cfg);
    FAIL("expected DegenerateWeightsError");
  } catch (const DegenerateWeightsError& e) {
    CHECK(std::string(e.what()).find("n_draws") != std::string::npos);
  }
}

TEST_CASE("summaries from a single draw") {
  const FitResult fit = single_draw(0.1, 1);
  const TwoGroupsModel m = model(0.1);
  const std::vector<double> z = {-7, -4, -1, 0, 0.5, 4, 9};
  const auto s = summarize(z, fit, 0.5, 1, {"a", "b", "c", "d", "e", "f", "g"});
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(s[i].observation_id == std::string(1, static_cast<char>('a' + i)));
    CHECK(s[i].local_fdr == doctest::Approx(local_fdr(z[i], m)).epsilon(2e-5));
    const EffectPosterior e = effect_posterior(z[i], m.hib);
    const double p = s[i].incl_prob;
    CHECK(s[i].post_mean_beta == doctest::Approx(p * e.post_mean_beta).epsilon(1e-5));
    const double second = p * (e.post_var_beta + e.post_mean_beta * e.post_mean_beta);
    CHECK(s[i].post_var_beta ==
          doctest::Approx(second - s[i].post_mean_beta * s[i].post_mean_beta).epsilon(1e-5));
    CHECK(s[i].prob_positive == doctest::Approx(e.prob_positive).epsilon(1e-5));
    CHECK(s[i].outperf_prob == doctest::Approx(p * e.prob_positive).epsilon(1e-5));
  }
  CHECK(s[3].incl_prob < 0.5);
  CHECK(s[3].prob_positive == 0.5);
  CHECK(s[3].outperf_prob == doctest::Approx(s[3].incl_prob / 2).epsilon(1e-12));
  CHECK(s[5].incl_prob == doctest::Approx(1 - local_fdr(4, m)).epsilon(2e-5));

  CHECK_THROWS_AS(summarize({1.0, 2.0}, fit, 0.5, 1, {"x"}), InputError);
}

TEST_CASE("group fdr") {
  CHECK(group_fdr({}, 0.9).count == 0);
  CHECK(group_fdr({}, 0.9).expected_fdr == 0);
  std::vector<PosteriorSummary> s(4);
  for (auto& x : s) x.incl_prob = 0.95;
  const GroupFdr g = group_fdr(s, 0.9);
  CHECK(g.count == 4);
  CHECK(g.expected_fdr == doctest::Approx(0.05));
  s[0].incl_prob = 0.9;  // strict threshold
  CHECK(group_fdr(s, 0.9).count == 3);
  CHECK_THROWS_AS(group_fdr(s, 1.0), DomainError);
}

TEST_CASE("serialization") {
  PosteriorSummary x;
  x.observation_id = "firm,1";
  x.z = 1.5;
  x.incl_prob = 0.25;
  x.local_fdr = 0.75;
  std::ostringstream csv;
  write_summaries_csv(csv, {x});
  CHECK(csv.str() ==
        "observation_id,z,incl_prob,local_fdr,post_mean_beta,post_var_beta,prob_positive,outperf_prob\n"
        "\"firm,1\",1.5,0.25,0.75,0,0,0.5,0\n");
  std::ostringstream json;
  write_summaries_json(json, {x});
  CHECK(json.str().find("\"observation_id\": \"firm,1\"") != std::string::npos);
  CHECK(json.str().find("\"outperf_prob\": 0") != std::string::npos);
}

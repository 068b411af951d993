#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "hib/normal.hpp"
#include "hib/simulation.hpp"

using namespace hib;

namespace {

long count_nonzero(const std::vector<double>& v) {
  return std::count_if(v.begin(), v.end(), [](double x) { return x != 0; });
}

// P(beta > m | y) under the spike-and-Laplace posterior, by quadrature of
// the slab posterior e^{-a|u|} phi(y - u) on a fine grid.
double oracle_upper_mass(double y, double w, double a, double m) {
  const double h = 1e-3;
  double slab = 0, above = 0;
  for (double u = -40 + h / 2; u < 40; u += h) {
    const double f = 0.5 * a * std::exp(-a * std::abs(u)) * normal_pdf(y - u) * h;
    slab += f;
    if (u > m) above += f;
  }
  const double null = (1 - w) * normal_pdf(y);
  const double total = w * slab + null;
  return (w * above + (m < 0 ? null : 0.0)) / total;
}

}  // namespace

TEST_CASE("dataset generation") {
  ExperimentConfig cfg;
  cfg.k = 0;
  Dataset d = generate_dataset(cfg, 0);
  CHECK(count_nonzero(d.beta) == 0);
  CHECK(d.y.size() == 1000);

  cfg.k = 5;
  cfg.value = 7;
  d = generate_dataset(cfg, 3);
  CHECK(std::count(d.beta.begin(), d.beta.end(), 7.0) == 5);
  CHECK(count_nonzero(d.beta) == 5);

  // Same (seed, replicate) gives the same data; others differ.
  const Dataset again = generate_dataset(cfg, 3);
  CHECK(again.y == d.y);
  CHECK(generate_dataset(cfg, 4).y != d.y);

  cfg.signal = SignalKind::random;
  cfg.k = 50;
  cfg.scale = 2;
  cfg.t_dof = 3;
  std::vector<double> mags;
  for (long r = 0; r < 40; ++r) {
    const Dataset x = generate_dataset(cfg, r);
    for (double b : x.beta) {
      if (b != 0) mags.push_back(std::abs(b));
    }
  }
  REQUIRE(mags.size() == 2000);
  std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
  const double median = mags[mags.size() / 2];
  const double t3_median = boost::math::quantile(boost::math::students_t(3.0), 0.75);
  CHECK(t3_median == doctest::Approx(0.7649).epsilon(1e-4));
  CHECK(std::abs(median / (2 * t3_median) - 1) < 0.25);
}

TEST_CASE("HIB estimator") {
  FitConfig fc;
  fc.seed = 5;
  std::vector<double> zeros(300, 0.0);
  const HibEstimate z = run_hib_estimator(zeros, 0.5, 1, fc);
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    CHECK(z.beta_hat[i] == 0);
    CHECK(z.incl_prob[i] < 0.5);
  }

  ExperimentConfig cfg;
  cfg.k = 0;
  cfg.seed = 77;
  Dataset d = generate_dataset(cfg, 0);
  d.y[123] = 8;
  const HibEstimate h = run_hib_estimator(d.y, 0.5, 1, fc);
  CHECK(h.incl_prob[123] > 0.9);
  for (std::size_t i = 0; i < d.y.size(); ++i) CHECK(std::abs(h.beta_hat[i]) <= std::abs(d.y[i]));
}

TEST_CASE("Laplace posterior median") {
  // Quantile condition checked by quadrature.
  for (double y : {2.5, 3.5, 5.0, 8.0}) {
    for (double w : {0.05, 0.3}) {
      for (double a : {0.3, 1.0}) {
        const double m = laplace_posterior_median(y, w, a);
        CHECK(laplace_posterior_median(-y, w, a) == -m);
        if (m > 0) {
          CHECK(oracle_upper_mass(y, w, a, m) == doctest::Approx(0.5).epsilon(2e-4));
        } else {
          CHECK(oracle_upper_mass(y, w, a, 1e-9) <= 0.5 + 2e-4);
        }
      }
    }
  }
  // Thresholding: zero below the threshold, nonzero above.
  const double t = laplace_threshold(0.1, 1);
  CHECK(laplace_posterior_median(t * 0.999, 0.1, 1) == 0);
  CHECK(laplace_posterior_median(t * 1.001, 0.1, 1) > 0);
  CHECK(laplace_threshold(0.01, 1) > t);
  // Far tail: median ~ y - a.
  CHECK(std::abs(laplace_posterior_median(10, 0.1, 1) - 10) < 1.5);
  CHECK(laplace_posterior_median(40, 0.1, 1) == doctest::Approx(39).epsilon(1e-6));
}

TEST_CASE("Laplace baseline") {
  const LaplaceEstimate z = run_laplace_baseline(std::vector<double>(500, 0.0));
  CHECK(count_nonzero(z.beta_hat) == 0);
  // The weight floor puts the threshold at the universal threshold.
  CHECK(laplace_threshold(z.w_lower, z.scale) == doctest::Approx(std::sqrt(2 * std::log(500.0))).epsilon(1e-8));
  CHECK(z.w >= z.w_lower);

  ExperimentConfig cfg;
  cfg.k = 50;
  cfg.value = 5;
  const Dataset d = generate_dataset(cfg, 0);
  LaplaceConfig fixed;
  fixed.estimate_scale = false;
  fixed.scale = 1;
  const LaplaceEstimate f = run_laplace_baseline(d.y, fixed);
  CHECK(f.scale == 1);
  CHECK(f.w > 0.02);
  CHECK(f.w < 0.5);
  const LaplaceEstimate e = run_laplace_baseline(d.y);
  CHECK(e.scale >= 0.04);
  CHECK(e.scale <= 3);
  // Estimating the scale cannot lower the maximized likelihood; the fit
  // moves toward a wider slab for signals at 5.
  CHECK(e.scale < 1);
  for (std::size_t i = 0; i < d.y.size(); ++i) CHECK(std::abs(e.beta_hat[i]) <= std::abs(d.y[i]));

  CHECK_THROWS_AS(run_laplace_baseline({}), InputError);
}

TEST_CASE("scoring") {
  const std::vector<double> beta = {0, 0, 3, 4};
  ReplicateScore s = score_replicate(beta, beta, {false, false, true, true});
  CHECK(s.sse == 0);
  CHECK(s.fp == 0);
  CHECK(s.fdr == 0);

  s = score_replicate(beta, {0.5, 0, 2, 4}, {true, false, true, false});
  CHECK(s.sse == doctest::Approx(1.25));
  CHECK(s.fp == 1);
  CHECK(s.flagged == 2);
  CHECK(s.fdr == 0.5);

  s = score_replicate(beta, {0, 0, 0, 0}, {false, false, false, false});
  CHECK(s.sse == 25);
  CHECK(s.fdr == 0);
  CHECK_THROWS_AS(score_replicate(beta, {0}, {false}), InputError);
}

TEST_CASE("experiment determinism and shape") {
  ExperimentConfig cfg;
  cfg.p = 300;
  cfg.k = 10;
  cfg.value = 4;
  cfg.replicates = 4;
  cfg.seed = 99;
  cfg.fit.n_draws = 1000;
  std::string out[2];
  for (int i = 0; i < 2; ++i) {
    cfg.workers = i == 0 ? 1 : 3;
    const ExperimentResult r = run_experiment(cfg);
    REQUIRE(r.summaries.size() == 2);
    REQUIRE(r.rows.size() == 8);
    for (const EstimatorSummary& s : r.summaries) {
      CHECK(s.fp_mean <= cfg.p - cfg.k);
      CHECK(s.fdr_mean >= 0);
      CHECK(s.fdr_mean <= 1);
    }
    std::ostringstream os;
    write_experiment_csv(os, {r});
    write_experiment_json(os, {r});
    out[i] = os.str();
  }
  CHECK(out[0] == out[1]);
  CHECK(out[0].rfind("estimator,signal,k,value_or_scale,t_dof,p,replicates,sse,fp,fdr\nhib_a0.5_b1,fixed,10,4,", 0) == 0);
  CHECK(out[0].find("laplace_approx_js,fixed,10,4,") != std::string::npos);

  // With no signals any flag is false.
  cfg.k = 0;
  const ExperimentResult null_run = run_experiment(cfg);
  for (const ReplicateRow& row : null_run.rows) CHECK(row.score.fdr == (row.score.flagged > 0 ? 1.0 : 0.0));

  cfg.k = 400;
  CHECK_THROWS_AS(run_experiment(cfg), DomainError);
}

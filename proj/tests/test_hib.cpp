#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include "hib/hib.hpp"
#include "oracle.hpp"

using hib::HIBParams;

namespace {

HIBParams make(double a, double b, double tau, double s) {
  HIBParams p;
  p.a = a;
  p.b = b;
  p.tau = tau;
  p.s = s;
  return p;
}

double log_c_oracle(const HIBParams& p) { return oracle::log_kappa_integral(p.a, p.b, p.tau, p.s); }

std::vector<HIBParams> random_params(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shape(0.1, 5.0), log_tau2(std::log(1e-3), std::log(1e3)),
      shift(-20.0, 60.0);
  std::vector<HIBParams> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(make(shape(rng), shape(rng), std::exp(0.5 * log_tau2(rng)), shift(rng)));
  }
  return out;
}

}  // namespace

TEST_CASE("validate") {
  CHECK_NOTHROW(make(0.5, 1, 1, 0).validate());
  CHECK_THROWS_AS(make(0, 1, 1, 0).validate(), hib::DomainError);
  CHECK_THROWS_AS(make(1, -1, 1, 0).validate(), hib::DomainError);
  CHECK_THROWS_AS(make(1, 1, 0, 0).validate(), hib::DomainError);
  CHECK_THROWS_AS(make(1, 1, 40, 0).validate(), hib::DomainError);
  CHECK_THROWS_AS(make(1, 1, 0.03, 0).validate(), hib::DomainError);
  CHECK_NOTHROW(make(1, 1, std::sqrt(1e3), 0).validate());
  CHECK_NOTHROW(make(1, 1, std::sqrt(1e-3), 0).validate());
  HIBParams p;
  p.sigma = 0;
  CHECK_THROWS_AS(p.validate(), hib::DomainError);
  p = make(1, 1, 1, std::nan(""));
  CHECK_THROWS_AS(p.validate(), hib::DomainError);
}

TEST_CASE("normalizer") {
  CHECK(hib::hb_normalizer(make(1, 1, 1, 0)).value() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hib::hb_normalizer(make(0.5, 0.5, 1, 0)).value() == doctest::Approx(M_PI).epsilon(1e-14));
  const HIBParams p = make(0.5, 1, 2, 1.5);
  CHECK(std::abs(hib::hb_normalizer(p).log_magnitude - log_c_oracle(p)) < 1e-9);
}

TEST_CASE("normalizer against quadrature on a random grid") {
  for (const HIBParams& p : random_params(60, 3)) {
    INFO("a=" << p.a << " b=" << p.b << " tau=" << p.tau << " s=" << p.s);
    CHECK(std::abs(hib::hb_normalizer(p).log_magnitude - log_c_oracle(p)) < 1e-9);
  }
}

TEST_CASE("kappa density") {
  CHECK(hib::hb_density_kappa(0.3, make(1, 1, 1, 0)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(hib::hb_density_kappa(0.5, make(2, 2, 1, 0)) == doctest::Approx(1.5).epsilon(1e-13));
  const HIBParams p = make(0.5, 1, 0.2, -2);
  const double expect = std::exp(oracle::log_kernel(0.25, 0.5, 1, 0.2, -2) - log_c_oracle(p));
  CHECK(oracle::rel_err(hib::hb_density_kappa(0.25, p), expect) < 1e-8);
  CHECK_THROWS_AS(hib::hb_density_kappa(0.0, p), hib::DomainError);
  CHECK_THROWS_AS(hib::hb_density_kappa(1.0, p), hib::DomainError);
}

TEST_CASE("tau = 1, s = 0 collapses to Beta(a, b)") {
  for (double a : {0.3, 0.5, 1.0, 2.5}) {
    for (double b : {0.5, 1.0, 3.0}) {
      boost::math::beta_distribution<double> beta(a, b);
      for (double k : {0.01, 0.2, 0.5, 0.77, 0.99}) {
        CHECK(oracle::rel_err(hib::hb_density_kappa(k, make(a, b, 1, 0)), boost::math::pdf(beta, k)) <
              1e-10);
      }
    }
  }
}

TEST_CASE("lambda2 density") {
  const HIBParams p = make(0.7, 1.3, 2.5, 0.8);
  for (double l2 : {1e-3, 0.4, 2.0, 55.0}) {
    const double k = 1 / (1 + l2);
    CHECK(oracle::rel_err(hib::hib_density_lambda2(l2, p),
                          hib::hb_density_kappa(k, p) / ((1 + l2) * (1 + l2))) < 1e-12);
  }
  for (double l2 : {0.1, 1.0, 7.0}) {
    CHECK(oracle::rel_err(hib::hib_density_lambda2(l2, make(1, 1, 1, 0)), std::pow(1 + l2, -2.0)) <
          1e-13);
  }
  // a lambda^2 / b ~ F(2b, 2a); here 0.5 lambda^2 ~ F(2, 1).
  boost::math::fisher_f_distribution<double> f(2, 1);
  const double expect = 0.5 * boost::math::pdf(f, 0.5 * 1.7);
  CHECK(oracle::rel_err(hib::hib_density_lambda2(1.7, make(0.5, 1, 1, 0)), expect) < 1e-12);
  CHECK_THROWS_AS(hib::hib_density_lambda2(0.0, p), hib::DomainError);
  CHECK_THROWS_AS(hib::hib_density_lambda2(-1.0, p), hib::DomainError);
}

TEST_CASE("lambda2 density integrates to one") {
  using boost::math::quadrature::gauss_kronrod;
  for (const HIBParams& p : {make(0.5, 1, 1, 0), make(2, 0.7, 3, 2), make(1.5, 2, 0.1, -3)}) {
    // t = ln lambda^2
    auto f = [&](double t) { return std::exp(hib::hib_log_density_lambda2(std::exp(t), p) + t); };
    double total = 0;
    for (double lo = -80; lo < 80; lo += 10) total += gauss_kronrod<double, 61>::integrate(f, lo, lo + 10, 10, 1e-13);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("lambda2 log-log slopes at the origin and in the tail") {
  for (const HIBParams& p : {make(0.5, 1, 1, 0), make(1.5, 0.5, 2, 1), make(0.8, 2.5, 0.5, -1)}) {
    auto slope = [&](double x0, double x1) {
      return (hib::hib_log_density_lambda2(x1, p) - hib::hib_log_density_lambda2(x0, p)) /
             (std::log(x1) - std::log(x0));
    };
    CHECK(std::abs(slope(1e-6, 1e-5) - (p.b - 1)) < 0.05);
    CHECK(std::abs(slope(1e5, 1e6) + (p.a + 1)) < 0.05);
  }
}

TEST_CASE("mgf") {
  const HIBParams p = make(0.5, 1, 1, 0);
  CHECK(hib::hb_mgf(0.0, p).value() == 1.0);
  const double h = 1e-5;
  for (const HIBParams& q : {p, make(2, 3, 5, 4), make(0.3, 0.6, 0.2, -5)}) {
    const double fd = (hib::hb_mgf(h, q).value() - hib::hb_mgf(-h, q).value()) / (2 * h);
    CHECK(std::abs(fd - hib::hb_moment(1, q)) < 1e-6);
  }
  const double log_expect =
      oracle::log_kappa_integral(0.5, 1, 1, 0, [](double k) { return std::exp(0.7 * k); }) -
      log_c_oracle(p);
  CHECK(std::abs(hib::hb_mgf(0.7, p).log_magnitude - log_expect) < 1e-9);
}

TEST_CASE("moments") {
  CHECK(hib::hb_moment(0, make(0.5, 1, 1, 0)) == 1.0);
  CHECK(hib::hb_moment(1, make(1, 1, 1, 0)) == doctest::Approx(0.5).epsilon(1e-14));
  const HIBParams p = make(0.5, 1, 3, -1);
  const double expect =
      std::exp(oracle::log_kappa_integral(2.5, 1, 3, -1) - log_c_oracle(p));
  CHECK(oracle::rel_err(hib::hb_moment(2, p), expect) < 1e-8);
  for (const HIBParams& q : random_params(50, 9)) {
    INFO("a=" << q.a << " b=" << q.b << " tau=" << q.tau << " s=" << q.s);
    const double lc = log_c_oracle(q);
    for (unsigned n = 1; n <= 3; ++n) {
      const double e = std::exp(oracle::log_kappa_integral(q.a + n, q.b, q.tau, q.s) - lc);
      CHECK(oracle::rel_err(hib::hb_moment(n, q), e) < 1e-8);
    }
  }
}

TEST_CASE("larger tau moves mass toward kappa = 0") {
  for (double s : {-2.0, 0.0, 3.0}) {
    CHECK(hib::hb_moment(1, make(0.5, 1, 10, s)) < hib::hb_moment(1, make(0.5, 1, 0.1, s)));
  }
  double last = 1;
  for (double tau : {0.05, 0.2, 1.0, 4.0, 30.0}) {
    const double m = hib::hb_moment(1, make(0.7, 0.7, tau, 0));
    CHECK(m < last);
    last = m;
  }
}

TEST_CASE("shrinkage profile") {
  CHECK_THROWS_AS(hib::shrinkage_profile(make(1, 1, 1, 0), 1), hib::DomainError);
  for (const auto& pt : hib::shrinkage_profile(make(1, 1, 1, 0), 9)) {
    CHECK(pt.density == doctest::Approx(1.0).epsilon(1e-13));
  }
  const auto strawderman = hib::shrinkage_profile(make(0.5, 1, 1, 0), 20);
  REQUIRE(strawderman.size() == 20);
  CHECK(strawderman.front().kappa == doctest::Approx(1.0 / 21));
  for (std::size_t i = 1; i < strawderman.size(); ++i) {
    CHECK(strawderman[i].density < strawderman[i - 1].density);
    CHECK(strawderman[i].density * std::sqrt(strawderman[i].kappa) ==
          doctest::Approx(0.5).epsilon(1e-12));
  }
  const auto horseshoe = hib::shrinkage_profile(make(0.5, 0.5, 1, 0), 21);
  for (std::size_t i = 0; i < horseshoe.size(); ++i) {
    CHECK(horseshoe[i].density == doctest::Approx(horseshoe[horseshoe.size() - 1 - i].density));
  }
  CHECK(horseshoe[10].density < horseshoe[0].density);
}

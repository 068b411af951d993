#include "hib/marginal_table.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "hib/hib.hpp"
#include "hib/normal.hpp"
#include "hib/parallel.hpp"
#include "hib/posterior.hpp"

namespace hib {

std::array<double, 4> cubic_weights(double x) {
  return {-x * (x - 1) * (x - 2) / 6, (x + 1) * (x - 1) * (x - 2) / 2,
          -(x + 1) * x * (x - 2) / 2, (x + 1) * x * (x - 1) / 6};
}

namespace {

Stencil make_stencil(double pos, int count) {
  pos = std::clamp(pos, 0.0, static_cast<double>(count - 1));
  int first = static_cast<int>(std::floor(pos)) - 1;
  first = std::clamp(first, 0, count - 4);
  return {first, cubic_weights(pos - (first + 1))};
}

}  // namespace

MarginalNode exact_marginal_node(double t, double u, double a, double b, double s) {
  HIBParams p;
  p.a = a;
  p.b = b;
  p.s = s;
  p.tau = std::exp(0.5 * u);
  const HIBParams q = posterior_update(t, p);
  const double l0 = detail::log_kernel_integral(q.a, q.b, q.tau, q.s);
  MarginalNode n;
  n.log_m1 = -0.5 * std::log(2 * M_PI) + l0 - detail::log_kernel_integral(a, b, p.tau, s);
  n.e1 = std::exp(detail::log_kernel_integral(q.a + 1, q.b, q.tau, q.s) - l0);
  n.e2 = std::exp(detail::log_kernel_integral(q.a + 2, q.b, q.tau, q.s) - l0);
  n.pp = t == 0 ? 0.5 : detail::kappa_expectation(q, [t](double k) {
    return normal_cdf(std::sqrt(1 - k) * t);
  });
  return n;
}

MarginalTable::MarginalTable(double a, double b, double s, int workers) : a_(a), b_(b), s_(s) {
  const double u_lo = std::log(kMinTau2);
  const double u_hi = std::log(kMaxTau2);
  u_count_ = static_cast<int>(std::ceil((u_hi - u_lo) / kUStep - 1e-9)) + 1;
  u_min_ = u_lo;
  u_step_ = (u_hi - u_lo) / (u_count_ - 1);
  r_count_ = static_cast<int>(std::ceil(std::log1p(kMaxT) / kRStep)) + 1;

  const std::size_t total = static_cast<std::size_t>(u_count_) * r_count_;
  log_m1_.resize(total);
  e1_.resize(total);
  e2_.resize(total);
  pp_.resize(total);
  parallel_for(total, workers, [&](std::size_t idx) {
    const int iu = static_cast<int>(idx / r_count_);
    const int ir = static_cast<int>(idx % r_count_);
    // The last node may round a hair past the legal range.
    const double u = std::min(u_node(iu), u_hi);
    const MarginalNode n = exact_marginal_node(std::expm1(kRStep * ir), u, a, b, s);
    log_m1_[idx] = n.log_m1;
    e1_[idx] = n.e1;
    e2_[idx] = n.e2;
    pp_[idx] = n.pp;
  });
}

std::shared_ptr<const MarginalTable> MarginalTable::get(double a, double b, double s, int workers) {
  static std::mutex mutex;
  static std::map<std::tuple<double, double, double>, std::shared_ptr<const MarginalTable>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{a, b, s}];
  if (!slot) slot = std::make_shared<const MarginalTable>(a, b, s, workers);
  return slot;
}

Stencil MarginalTable::u_stencil(double u) const {
  const double u_lo = std::log(kMinTau2);
  const double u_hi = std::log(kMaxTau2);
  u = std::clamp(u, u_lo, u_hi);
  return make_stencil((u - u_min_) / u_step_, u_count_);
}

MarginalColumn MarginalTable::column(double t) const {
  MarginalColumn c;
  c.log_m1.resize(u_count_);
  c.e1.resize(u_count_);
  c.e2.resize(u_count_);
  c.pp.resize(u_count_);
  if (t > kMaxT) {
    const double u_hi = std::log(kMaxTau2);
    for (int iu = 0; iu < u_count_; ++iu) {
      const MarginalNode n = exact_marginal_node(t, std::min(u_node(iu), u_hi), a_, b_, s_);
      c.log_m1[iu] = n.log_m1;
      c.e1[iu] = n.e1;
      c.e2[iu] = n.e2;
      c.pp[iu] = n.pp;
    }
    return c;
  }
  const Stencil sr = make_stencil(std::log1p(t) / kRStep, r_count_);
  for (int iu = 0; iu < u_count_; ++iu) {
    const std::size_t row = static_cast<std::size_t>(iu) * r_count_ + sr.first;
    auto interp = [&](const std::vector<double>& v) {
      return sr.w[0] * v[row] + sr.w[1] * v[row + 1] + sr.w[2] * v[row + 2] + sr.w[3] * v[row + 3];
    };
    c.log_m1[iu] = interp(log_m1_);
    c.e1[iu] = interp(e1_);
    c.e2[iu] = interp(e2_);
    c.pp[iu] = interp(pp_);
  }
  return c;
}

}  // namespace hib

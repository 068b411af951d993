#ifndef HIB_MARGINAL_TABLE_HPP
#define HIB_MARGINAL_TABLE_HPP

#include <array>
#include <memory>
#include <vector>

namespace hib {

/// Exact posterior quantities for a unit-noise observation t >= 0 under the
/// HB(a, b, tau, s) prior with ln tau^2 = u.
struct MarginalNode {
  double log_m1;  ///< ln m1(t)
  double e1;      ///< E[kappa | t]
  double e2;      ///< E[kappa^2 | t]
  double pp;      ///< P(beta > 0 | t, beta != 0)
};

MarginalNode exact_marginal_node(double t, double u, double a, double b, double s);

/// A column of MarginalNode values at every u-node for one fixed t.
struct MarginalColumn {
  std::vector<double> log_m1, e1, e2, pp;
};

/// Four-point Lagrange stencil on the u-nodes.
struct Stencil {
  int first;
  std::array<double, 4> w;

  double apply(const std::vector<double>& v) const {
    return w[0] * v[first] + w[1] * v[first + 1] + w[2] * v[first + 2] + w[3] * v[first + 3];
  }
};

/// Tabulated unit-noise marginal quantities on a tensor grid in
/// u = ln tau^2 over the legal tau range and r = ln(1 + t) for t up to
/// kMaxT, interpolated by cubic Lagrange in both directions. Fitting and
/// summarizing many observations over many (w, tau) draws goes through a
/// per-observation column in u, so each draw costs one 4-point sum per
/// quantity. Observations beyond kMaxT get exactly computed columns.
class MarginalTable {
 public:
  static constexpr double kUStep = 0.2;  ///< upper bound; the range is split evenly
  static constexpr double kRStep = 0.025;
  static constexpr double kMaxT = 400.0;

  MarginalTable(double a, double b, double s, int workers);

  /// Shared table for (a, b, s), built on first use.
  static std::shared_ptr<const MarginalTable> get(double a, double b, double s, int workers = 1);

  int u_count() const { return u_count_; }
  double u_node(int i) const { return u_min_ + u_step_ * i; }

  /// Stencil for u, clamped to the tabulated range.
  Stencil u_stencil(double u) const;

  /// Column for |z| = t in unit-noise scale.
  MarginalColumn column(double t) const;

  double a() const { return a_; }
  double b() const { return b_; }
  double s() const { return s_; }

 private:
  double a_, b_, s_;
  double u_min_;
  double u_step_;
  int u_count_;
  int r_count_;
  // Row-major [u][r] per quantity.
  std::vector<double> log_m1_, e1_, e2_, pp_;
};

/// Lagrange weights for nodes at -1, 0, 1, 2 evaluated at x.
std::array<double, 4> cubic_weights(double x);

}  // namespace hib

#endif  // HIB_MARGINAL_TABLE_HPP

// Within-transformation for high-dimensional fixed effects, least squares
// with ordered rank-deficiency handling, and sandwich standard errors.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace menucost::fe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One categorical dimension re-coded to 0..n_groups-1 in order of first
/// appearance.
struct FeIndex {
  std::string name;
  std::vector<int> codes;
  int n_groups = 0;
};

FeIndex make_fe_index(std::string name, std::span<const double> values);

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct AbsorbOptions {
  double tol = 1e-9;
  int max_iter = 10000;
};

struct AbsorbReport {
  int iterations = 0;
  double max_change = 0;
};

namespace detail {

/// Subtracts group means of `fe` from every column; returns the largest
/// scaled mean removed.
template <typename Derived>
double demean_once(Eigen::MatrixBase<Derived>& m, const FeIndex& fe, std::span<const double> scale,
                   std::vector<double>& sums, std::vector<double>& counts) {
  using Index = Eigen::Index;
  const Index n = m.rows();
  counts.assign(static_cast<std::size_t>(fe.n_groups), 0.0);
  for (Index i = 0; i < n; ++i) counts[static_cast<std::size_t>(fe.codes[static_cast<std::size_t>(i)])] += 1.0;
  double change = 0;
  for (Index j = 0; j < m.cols(); ++j) {
    sums.assign(static_cast<std::size_t>(fe.n_groups), 0.0);
    for (Index i = 0; i < n; ++i) sums[static_cast<std::size_t>(fe.codes[static_cast<std::size_t>(i)])] += m(i, j);
    double col_change = 0;
    for (std::size_t g = 0; g < sums.size(); ++g) {
      if (counts[g] > 0) sums[g] /= counts[g];
      col_change = std::max(col_change, std::abs(sums[g]));
    }
    for (Index i = 0; i < n; ++i) m(i, j) -= sums[static_cast<std::size_t>(fe.codes[static_cast<std::size_t>(i)])];
    change = std::max(change, col_change / scale[static_cast<std::size_t>(j)]);
  }
  return change;
}

}  // namespace detail

/// Alternating projections: sweeps group-demeaning over every dimension until
/// the largest mean removed in a sweep, relative to the root mean square of
/// what is left of the column, is below tol. Columns that collapse into the
/// fixed effects are measured against 1e-5 of their starting size instead. The sweep change is inflated by 1/(1 - r), r being the observed
/// contraction ratio, so slow geometric convergence does not stop early. One
/// dimension is exact after a single pass.
template <typename Derived>
AbsorbReport absorb_fe(const Eigen::MatrixBase<Derived>& matrix, const std::vector<FeIndex>& fes,
                       const AbsorbOptions& options = {}) {
  if (fes.empty()) throw std::invalid_argument("absorb_fe: need at least one fixed-effect dimension");
  auto& m = const_cast<Eigen::MatrixBase<Derived>&>(matrix);
  for (const auto& fe : fes)
    if (static_cast<Eigen::Index>(fe.codes.size()) != m.rows())
      throw std::invalid_argument("absorb_fe: fixed effect '" + fe.name + "' has the wrong length");

  const double root_n = std::sqrt(static_cast<double>(std::max<Eigen::Index>(m.rows(), 1)));
  std::vector<double> floor(static_cast<std::size_t>(m.cols()), 1.0);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double rms = m.col(j).norm() / root_n;
    if (rms > 0) floor[static_cast<std::size_t>(j)] = 1e-5 * rms;
  }
  std::vector<double> scale = floor;
  auto rescale = [&] {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto k = static_cast<std::size_t>(j);
      scale[k] = std::max(floor[k], m.col(j).norm() / root_n);
    }
  };

  std::vector<double> sums, counts;
  AbsorbReport report;
  if (fes.size() == 1) {
    report.iterations = 1;
    detail::demean_once(m, fes.front(), scale, sums, counts);
    return report;
  }
  double previous = 0;
  for (int it = 1; it <= options.max_iter; ++it) {
    rescale();
    double change = 0;
    for (const auto& fe : fes) change = std::max(change, detail::demean_once(m, fe, scale, sums, counts));
    report.iterations = it;
    report.max_change = change;
    const double ratio = previous > 0 ? std::min(change / previous, 0.999) : 0.0;
    if (change / (1 - ratio) < options.tol) return report;
    previous = change;
  }
  throw ConvergenceError("absorb_fe: no convergence after " + std::to_string(options.max_iter) +
                             " sweeps (last change " + std::to_string(report.max_change) + ")",
                         report.max_change);
}

/// Rank of the dummy matrix spanned by the fixed effects (the intercept is
/// inside that span). Exact for one or two dimensions and for small problems;
/// otherwise the two-dimension value plus (groups - 1) per further dimension.
int fe_degrees_of_freedom(const std::vector<FeIndex>& fes);

struct OlsFit {
  /// One entry per input column; NaN for dropped columns.
  Vector coef;
  std::vector<int> kept;
  std::vector<int> dropped;
  Vector residuals;
  /// (X'X)^-1 over the kept columns.
  Matrix xtx_inv;
};

/// Least squares through Householder QR. Columns are screened in order: one
/// whose component orthogonal to the already-kept columns has norm at most
/// rank_tol times its reference norm (pre-absorption norm when given) is
/// dropped. Throws when no column survives.
OlsFit ols_fit(const Matrix& x, const Vector& y, std::span<const double> reference_norms = {},
               double rank_tol = 1e-9);

enum class SeKind { clustered, hc1, classical };

const char* se_kind_name(SeKind kind);
SeKind parse_se_kind(const std::string& name);

/// G/(G-1)*(N-1)/(N-K) for clustered, N/(N-K) for hc1, 1 for classical.
double small_sample_factor(SeKind kind, std::int64_t n, std::int64_t k, std::int64_t g);

/// Variance matrix of the kept coefficients. `x` holds only the kept columns.
/// `dof_k` is K in the small-sample factors and in the classical sigma^2.
Matrix coefficient_vcov(const Matrix& x, const Vector& residuals, const Matrix& xtx_inv,
                        std::span<const int> clusters, SeKind kind, std::int64_t dof_k);

Vector standard_errors(const Matrix& x, const Vector& residuals, const Matrix& xtx_inv,
                       std::span<const int> clusters, SeKind kind, std::int64_t dof_k);

/// "***" / "**" / "*" at the 1/5/10% two-sided normal critical values.
std::string significance_stars(double t);

}  // namespace menucost::fe

#include "menucost/fe.hpp"

#include <limits>
#include <map>
#include <numeric>

namespace menucost::fe {

FeIndex make_fe_index(std::string name, std::span<const double> values) {
  FeIndex fe;
  fe.name = std::move(name);
  fe.codes.reserve(values.size());
  std::map<double, int> seen;
  for (double v : values) {
    const auto [it, inserted] = seen.emplace(v, static_cast<int>(seen.size()));
    fe.codes.push_back(it->second);
  }
  fe.n_groups = static_cast<int>(seen.size());
  return fe;
}

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    x = parent[static_cast<std::size_t>(x)];
  }
  return x;
}

// Connected components of the bipartite graph linking groups of two dimensions.
int bipartite_components(const FeIndex& a, const FeIndex& b) {
  std::vector<int> parent(static_cast<std::size_t>(a.n_groups + b.n_groups));
  std::iota(parent.begin(), parent.end(), 0);
  int components = a.n_groups + b.n_groups;
  for (std::size_t i = 0; i < a.codes.size(); ++i) {
    const int x = find_root(parent, a.codes[i]);
    const int y = find_root(parent, a.n_groups + b.codes[i]);
    if (x != y) {
      parent[static_cast<std::size_t>(x)] = y;
      --components;
    }
  }
  return components;
}

constexpr double kDenseRankBudget = 4e6;

}  // namespace

int fe_degrees_of_freedom(const std::vector<FeIndex>& fes) {
  if (fes.empty()) return 0;
  if (fes.size() == 1) return fes.front().n_groups;
  const std::size_t n = fes.front().codes.size();
  int total_groups = 0;
  for (const auto& fe : fes) total_groups += fe.n_groups;

  if (fes.size() > 2 && static_cast<double>(n) * total_groups <= kDenseRankBudget) {
    Matrix d = Matrix::Zero(static_cast<Eigen::Index>(n), total_groups);
    int offset = 0;
    for (const auto& fe : fes) {
      for (std::size_t i = 0; i < n; ++i) d(static_cast<Eigen::Index>(i), offset + fe.codes[i]) = 1.0;
      offset += fe.n_groups;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(d);
    return static_cast<int>(qr.rank());
  }
  int df = fes[0].n_groups + fes[1].n_groups - bipartite_components(fes[0], fes[1]);
  for (std::size_t d = 2; d < fes.size(); ++d) df += fes[d].n_groups - 1;
  return df;
}

OlsFit ols_fit(const Matrix& x, const Vector& y, std::span<const double> reference_norms, double rank_tol) {
  if (x.rows() != y.size()) throw std::invalid_argument("ols_fit: X and y differ in rows");
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  OlsFit fit;
  fit.coef = Vector::Constant(k, std::numeric_limits<double>::quiet_NaN());

  // Ordered screening against an orthonormal basis of the kept columns
  // (Gram-Schmidt applied twice).
  Matrix basis(n, k);
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    Vector v = x.col(j);
    const double own = v.norm();
    double ref = own;
    if (!reference_norms.empty()) ref = std::max(ref, reference_norms[static_cast<std::size_t>(j)]);
    for (int pass = 0; pass < 2 && rank > 0; ++pass) v -= basis.leftCols(rank) * (basis.leftCols(rank).transpose() * v);
    const double rest = v.norm();
    if (own == 0 || rest <= rank_tol * ref) {
      fit.dropped.push_back(static_cast<int>(j));
      continue;
    }
    basis.col(rank++) = v / rest;
    fit.kept.push_back(static_cast<int>(j));
  }
  if (fit.kept.empty()) throw std::runtime_error("ols_fit: no usable regressors");

  Matrix xk(n, static_cast<Eigen::Index>(fit.kept.size()));
  for (std::size_t c = 0; c < fit.kept.size(); ++c) xk.col(static_cast<Eigen::Index>(c)) = x.col(fit.kept[c]);
  Eigen::HouseholderQR<Matrix> qr(xk);
  const Vector b = qr.solve(y);
  for (std::size_t c = 0; c < fit.kept.size(); ++c) fit.coef(fit.kept[c]) = b(static_cast<Eigen::Index>(c));
  fit.residuals = y - xk * b;

  const Eigen::Index p = xk.cols();
  const Matrix r = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Matrix r_inv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(p, p));
  fit.xtx_inv = r_inv * r_inv.transpose();
  return fit;
}

const char* se_kind_name(SeKind kind) {
  switch (kind) {
    case SeKind::clustered: return "clustered";
    case SeKind::hc1: return "hc1";
    case SeKind::classical: return "classical";
  }
  return "?";
}

SeKind parse_se_kind(const std::string& name) {
  if (name == "clustered" || name == "cluster") return SeKind::clustered;
  if (name == "hc1" || name == "robust") return SeKind::hc1;
  if (name == "classical" || name == "iid") return SeKind::classical;
  throw std::invalid_argument("unknown standard-error kind '" + name + "'");
}

double small_sample_factor(SeKind kind, std::int64_t n, std::int64_t k, std::int64_t g) {
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  switch (kind) {
    case SeKind::clustered: {
      const double dg = static_cast<double>(g);
      return dg / (dg - 1) * (dn - 1) / (dn - dk);
    }
    case SeKind::hc1: return dn / (dn - dk);
    case SeKind::classical: return 1.0;
  }
  return 1.0;
}

Matrix coefficient_vcov(const Matrix& x, const Vector& residuals, const Matrix& xtx_inv,
                        std::span<const int> clusters, SeKind kind, std::int64_t dof_k) {
  const std::int64_t n = x.rows();
  const Eigen::Index p = x.cols();
  if (n - dof_k <= 0) throw std::runtime_error("standard errors: no residual degrees of freedom");

  switch (kind) {
    case SeKind::classical: {
      const double s2 = residuals.squaredNorm() / static_cast<double>(n - dof_k);
      return s2 * xtx_inv;
    }
    case SeKind::hc1: {
      const Matrix xe = x.array().colwise() * residuals.array();
      const Matrix meat = xe.transpose() * xe;
      return small_sample_factor(kind, n, dof_k, 0) * (xtx_inv * meat * xtx_inv);
    }
    case SeKind::clustered: {
      if (static_cast<std::int64_t>(clusters.size()) != n)
        throw std::invalid_argument("standard errors: cluster ids missing or wrong length");
      const int g = clusters.empty() ? 0 : *std::max_element(clusters.begin(), clusters.end()) + 1;
      std::vector<std::uint8_t> used(static_cast<std::size_t>(g), 0);
      for (int c : clusters) used[static_cast<std::size_t>(c)] = 1;
      const auto n_clusters = std::count(used.begin(), used.end(), 1);
      if (n_clusters < 2) throw std::runtime_error("clustered standard errors need at least two clusters");
      Matrix scores = Matrix::Zero(g, p);
      for (Eigen::Index i = 0; i < n; ++i) scores.row(clusters[static_cast<std::size_t>(i)]) += residuals(i) * x.row(i);
      const Matrix meat = scores.transpose() * scores;
      return small_sample_factor(kind, n, dof_k, n_clusters) * (xtx_inv * meat * xtx_inv);
    }
  }
  return {};
}

Vector standard_errors(const Matrix& x, const Vector& residuals, const Matrix& xtx_inv,
                       std::span<const int> clusters, SeKind kind, std::int64_t dof_k) {
  return coefficient_vcov(x, residuals, xtx_inv, clusters, kind, dof_k).diagonal().cwiseMax(0.0).cwiseSqrt();
}

std::string significance_stars(double t) {
  const double a = std::abs(t);
  if (!std::isfinite(a)) return "";
  if (a >= 2.5758293035489) return "***";
  if (a >= 1.959963984540054) return "**";
  if (a >= 1.6448536269514722) return "*";
  return "";
}

}  // namespace menucost::fe

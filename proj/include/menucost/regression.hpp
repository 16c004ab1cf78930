// Declarative regression specs over a column table, the build -> absorb ->
// fit -> standard-error pipeline, named presets for the volume / small-change
// study, and per-product cross-store regressions.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "menucost/fe.hpp"

namespace menucost {

/// Named numeric columns of equal length; missing values are NaN.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t rows) : rows_(rows) {}

  std::size_t rows() const { return rows_; }
  void add_column(const std::string& name, std::vector<double> values);
  bool has(const std::string& name) const { return columns_.count(name) > 0; }
  /// Throws DataError naming the column when absent.
  const std::vector<double>& column(const std::string& name) const;
  std::vector<std::string> names() const;
  Dataset select_rows(const std::vector<std::size_t>& rows) const;

 private:
  std::size_t rows_ = 0;
  std::map<std::string, std::vector<double>> columns_;
};

enum class Transform { identity, ln, ln1p };

struct Term {
  std::string column;
  Transform transform = Transform::identity;
  /// Identity-transformed columns multiplied into the term.
  std::vector<std::string> interactions;

  std::string name() const;
  /// "ln(avg_volume)", "ln1p(x)*flag", "x".
  static Term parse(const std::string& text);
};

struct Predicate {
  enum class Op { eq, ne, lt, le, gt, ge };
  std::string column;
  Op op = Op::eq;
  double value = 0;

  bool holds(double x) const;
  std::string text() const;
  /// "sale_bb == 0", "direction < 0".
  static Predicate parse(const std::string& text);
};

struct RegressionSpec {
  std::string name = "custom";
  /// events | weeks | stats | categories
  std::string table = "events";
  std::string dependent;
  std::vector<Term> regressors;
  std::vector<std::string> fixed_effects;
  std::optional<std::string> cluster;
  fe::SeKind se_kind = fe::SeKind::clustered;
  std::vector<Predicate> sample_filter;
  /// Run one regression per distinct value of this column.
  std::optional<std::string> by;
  double tolerance = 1e-9;
  int max_iter = 10000;

  void validate() const;
};

/// Parses "key: value" lines (lists comma separated, '#' comments). Keys:
/// name, table, dependent, regressors, fixed_effects, cluster, se, filter, by,
/// tolerance, max_iter.
RegressionSpec parse_spec(const std::string& text);
std::string format_spec(const RegressionSpec& spec);

RegressionSpec preset(const std::string& name);
std::vector<std::string> preset_names();

struct Design {
  fe::Matrix x;
  fe::Vector y;
  std::vector<std::string> names;
  std::vector<fe::FeIndex> fes;
  std::vector<int> clusters;
  int n_clusters = 0;
  std::int64_t rows_filtered = 0;
  std::int64_t rows_dropped_nonpositive = 0;
  std::int64_t rows_dropped_missing = 0;
};

/// Fixed-effect and cluster names resolve "product" to the upc column.
std::string resolve_column(const std::string& name);

Design build_design(const Dataset& data, const RegressionSpec& spec);

struct RegressionResult {
  std::string label;
  std::vector<std::string> terms;
  fe::Vector coef;
  fe::Vector se;
  std::vector<std::string> dropped_terms;
  std::int64_t n_obs = 0;
  std::int64_t n_clusters = 0;
  std::int64_t dof_k = 0;
  double r2_within = 0;
  int iterations = 0;
  double final_change = 0;
  std::int64_t rows_dropped = 0;

  std::optional<std::size_t> index_of(const std::string& term) const;
  double t_stat(std::size_t i) const { return coef(static_cast<Eigen::Index>(i)) / se(static_cast<Eigen::Index>(i)); }
};

/// Absorbs the design's fixed effects (or adds an intercept when there are
/// none), fits, and computes standard errors. K in the small-sample factors
/// is kept regressors + fixed-effect degrees of freedom.
RegressionResult fit_design(Design design, const RegressionSpec& spec);

RegressionResult run_spec(const Dataset& data, const RegressionSpec& spec);

struct GroupResult {
  double group = 0;
  std::optional<RegressionResult> result;
  std::string error;
};

/// One fit per value of spec.by; a failing group records its error and the
/// batch continues.
std::vector<GroupResult> run_spec_by(const Dataset& data, const RegressionSpec& spec, unsigned threads = 1);

struct ProductRegression {
  double upc = 0;
  double category = 0;
  double coefficient = 0;
  double se = 0;
  std::int64_t n_stores = 0;
};

struct CategoryRollup {
  double category = 0;
  double avg_coefficient = 0;
  std::int64_t n_coefficients = 0;
  double pct_positive = 0;
  std::int64_t n_significant = 0;
  double pct_positive_among_significant = 0;
};

struct ProductRegressions {
  std::vector<ProductRegression> products;
  std::vector<CategoryRollup> categories;
};

/// For every upc present in at least min_stores stores (with a defined share
/// of small changes): OLS of share_small on avg_volume with an intercept and
/// HC1 errors. Needs columns upc, category, avg_volume, share_small.
ProductRegressions per_product_regressions(const Dataset& stats, std::int64_t min_stores = 30);

}  // namespace menucost

#include "menucost/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "menucost/panel.hpp"
#include "menucost/parallel.hpp"

namespace menucost {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

void Dataset::add_column(const std::string& name, std::vector<double> values) {
  if (columns_.empty() && rows_ == 0) rows_ = values.size();
  if (values.size() != rows_) throw DataError("column '" + name + "' has the wrong number of rows");
  columns_[name] = std::move(values);
}

const std::vector<double>& Dataset::column(const std::string& name) const {
  const auto it = columns_.find(name);
  if (it == columns_.end()) throw DataError("unknown column '" + name + "'");
  return it->second;
}

std::vector<std::string> Dataset::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : columns_) out.push_back(k);
  return out;
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
  Dataset out(rows.size());
  for (const auto& [name, col] : columns_) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (std::size_t r : rows) v.push_back(col[r]);
    out.columns_[name] = std::move(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Terms and predicates

std::string Term::name() const {
  std::string base;
  switch (transform) {
    case Transform::identity: base = column; break;
    case Transform::ln: base = "ln(" + column + ")"; break;
    case Transform::ln1p: base = "ln1p(" + column + ")"; break;
  }
  for (const auto& i : interactions) base += "*" + i;
  return base;
}

Term Term::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == '*') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(trim(cur));
  Term t;
  const std::string& head = parts.front();
  auto unwrap = [&](const std::string& prefix, Transform tr) {
    if (head.rfind(prefix, 0) == 0 && head.back() == ')') {
      t.column = trim(head.substr(prefix.size(), head.size() - prefix.size() - 1));
      t.transform = tr;
      return true;
    }
    return false;
  };
  if (!unwrap("ln1p(", Transform::ln1p) && !unwrap("ln(", Transform::ln)) t.column = head;
  for (std::size_t i = 1; i < parts.size(); ++i) t.interactions.push_back(parts[i]);
  if (t.column.empty()) throw std::invalid_argument("empty regressor term in '" + text + "'");
  for (const auto& i : t.interactions)
    if (i.empty()) throw std::invalid_argument("empty interaction in '" + text + "'");
  return t;
}

bool Predicate::holds(double x) const {
  switch (op) {
    case Op::eq: return x == value;
    case Op::ne: return x != value;
    case Op::lt: return x < value;
    case Op::le: return x <= value;
    case Op::gt: return x > value;
    case Op::ge: return x >= value;
  }
  return false;
}

std::string Predicate::text() const {
  static const char* ops[] = {"==", "!=", "<", "<=", ">", ">="};
  std::ostringstream os;
  os << column << ' ' << ops[static_cast<int>(op)] << ' ' << value;
  return os.str();
}

Predicate Predicate::parse(const std::string& text) {
  static const std::pair<const char*, Op> ops[] = {{"==", Op::eq}, {"!=", Op::ne}, {"<=", Op::le},
                                                   {">=", Op::ge}, {"<", Op::lt},  {">", Op::gt}};
  for (const auto& [sym, op] : ops) {
    const auto pos = text.find(sym);
    if (pos == std::string::npos) continue;
    Predicate p;
    p.column = trim(text.substr(0, pos));
    p.op = op;
    const std::string rhs = trim(text.substr(pos + std::char_traits<char>::length(sym)));
    try {
      std::size_t used = 0;
      p.value = std::stod(rhs, &used);
      if (used != rhs.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::invalid_argument("filter value must be numeric in '" + text + "'");
    }
    if (p.column.empty()) throw std::invalid_argument("filter without a column in '" + text + "'");
    return p;
  }
  throw std::invalid_argument("filter needs one of == != < <= > >= in '" + text + "'");
}

// ---------------------------------------------------------------------------
// Specs

void RegressionSpec::validate() const {
  if (dependent.empty()) throw std::invalid_argument("regression spec '" + name + "' has no dependent variable");
  if (regressors.empty()) throw std::invalid_argument("regression spec '" + name + "' has no regressors");
  for (const auto& t : regressors) {
    if (t.transform == Transform::identity && t.interactions.empty() && t.column == dependent)
      throw std::invalid_argument("dependent variable '" + dependent + "' also appears as a regressor");
  }
  if (se_kind == fe::SeKind::clustered && !cluster)
    throw std::invalid_argument("regression spec '" + name + "' asks for clustered errors without a cluster");
  if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be > 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
}

RegressionSpec parse_spec(const std::string& text) {
  RegressionSpec spec;
  spec.fixed_effects.clear();
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool se_given = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("spec line " + std::to_string(line_no) + ": expected 'key: value'");
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (key == "name") {
      spec.name = value;
    } else if (key == "table") {
      spec.table = value;
    } else if (key == "dependent") {
      spec.dependent = value;
    } else if (key == "regressors") {
      for (const auto& t : split_list(value)) spec.regressors.push_back(Term::parse(t));
    } else if (key == "fixed_effects") {
      spec.fixed_effects = split_list(value);
    } else if (key == "cluster") {
      if (!value.empty() && value != "none") spec.cluster = value;
    } else if (key == "se") {
      spec.se_kind = fe::parse_se_kind(value);
      se_given = true;
    } else if (key == "filter") {
      for (const auto& f : split_list(value)) spec.sample_filter.push_back(Predicate::parse(f));
    } else if (key == "by") {
      if (!value.empty() && value != "none") spec.by = value;
    } else if (key == "tolerance") {
      spec.tolerance = std::stod(value);
    } else if (key == "max_iter") {
      spec.max_iter = std::stoi(value);
    } else {
      throw std::invalid_argument("spec line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!se_given) spec.se_kind = spec.cluster ? fe::SeKind::clustered : fe::SeKind::hc1;
  spec.validate();
  return spec;
}

std::string format_spec(const RegressionSpec& spec) {
  auto join = [](const auto& items, auto fn) {
    std::string s;
    for (const auto& it : items) s += (s.empty() ? "" : ", ") + fn(it);
    return s;
  };
  std::ostringstream os;
  os << "name: " << spec.name << '\n'
     << "table: " << spec.table << '\n'
     << "dependent: " << spec.dependent << '\n'
     << "regressors: " << join(spec.regressors, [](const Term& t) { return t.name(); }) << '\n'
     << "fixed_effects: " << join(spec.fixed_effects, [](const std::string& s) { return s; }) << '\n'
     << "cluster: " << spec.cluster.value_or("none") << '\n'
     << "se: " << fe::se_kind_name(spec.se_kind) << '\n';
  if (!spec.sample_filter.empty())
    os << "filter: " << join(spec.sample_filter, [](const Predicate& p) { return p.text(); }) << '\n';
  if (spec.by) os << "by: " << *spec.by << '\n';
  return os.str();
}

namespace {

RegressionSpec event_spec(std::string name, std::vector<std::string> terms, bool by_category = false) {
  RegressionSpec s;
  s.name = std::move(name);
  s.dependent = "small";
  for (const auto& t : terms) s.regressors.push_back(Term::parse(t));
  s.fixed_effects = {"month", "year", "store", "product"};
  s.cluster = "product";
  s.se_kind = fe::SeKind::clustered;
  if (by_category) s.by = "category";
  return s;
}

const std::vector<std::string> kControls = {"ln(avg_volume)", "ln(avg_price)", "ln1p(abs_dwholesale)", "sale_bb"};
const std::vector<std::string> kControlsNine = {"ln(avg_volume)", "ln(avg_price)", "ln1p(abs_dwholesale)", "sale_bb",
                                                "nine_ending"};
const std::vector<std::string> kRegular = {"ln(avg_volume)", "ln(avg_price)", "ln1p(abs_dwholesale)", "nine_ending"};

std::map<std::string, RegressionSpec> build_presets() {
  std::map<std::string, RegressionSpec> m;
  auto add = [&](RegressionSpec s) { m[s.name] = std::move(s); };

  add(event_spec("baseline", {"ln(avg_volume)"}));
  add(event_spec("controls", kControls));
  add(event_spec("controls_nine", kControlsNine));
  {
    auto s = event_spec("regular_only", kRegular);
    s.sample_filter.push_back(Predicate::parse("sale_bb == 0"));
    add(s);
  }
  add(event_spec("category_baseline", {"ln(avg_volume)"}, true));
  add(event_spec("category_controls", kControls, true));
  add(event_spec("category_controls_nine", kControlsNine, true));
  {
    auto s = event_spec("category_regular_only", kRegular, true);
    s.sample_filter.push_back(Predicate::parse("sale_bb == 0"));
    add(s);
  }
  add(event_spec("revenue", {"ln(avg_revenue)"}, true));
  add(event_spec("volume_revenue", {"ln(avg_volume)", "ln(avg_revenue)"}, true));
  add(event_spec("volume_revenue_pooled", {"ln(avg_volume)", "ln(avg_revenue)"}));
  add(event_spec("revenue_vxp", {"ln(avg_volume)", "ln(revenue_vxp)"}, true));
  add(event_spec("producer_size", {"ln(avg_volume)", "producer_size"}, true));
  add(event_spec("sync_share", {"ln(avg_volume)", "producer_size", "share_others"}, true));
  add(event_spec("sync_size", {"ln(avg_volume)", "producer_size", "share_others", "mean_abs_others"}, true));
  add(event_spec("sync_producer",
                 {"ln(avg_volume)", "producer_size", "share_others", "mean_abs_others", "share_same_producer"}, true));
  add(event_spec("peak", {"ln(avg_volume)", "peak"}, true));
  {
    auto s = event_spec("any_change", {"ln(avg_volume)"}, true);
    s.table = "weeks";
    s.dependent = "changed";
    add(s);
  }
  {
    auto s = event_spec("increases", {"ln(avg_volume)"}, true);
    s.sample_filter.push_back(Predicate::parse("direction > 0"));
    add(s);
  }
  {
    auto s = event_spec("decreases", {"ln(avg_volume)"}, true);
    s.sample_filter.push_back(Predicate::parse("direction < 0"));
    add(s);
  }
  add(event_spec("storable", {"ln(avg_volume)", "ln(avg_volume)*non_storable"}, true));
  add(event_spec("markup", {"ln(avg_volume)", "margin"}, true));
  {
    auto s = event_spec("zone", {"ln(avg_volume)"}, true);
    s.fixed_effects = {"month", "year", "zone", "product"};
    add(s);
  }
  add(event_spec("rolling52", {"ln(volume_52w)"}, true));
  {
    auto s = event_spec("national", {"ln(avg_volume)"}, true);
    s.sample_filter.push_back(Predicate::parse("private_label == 0"));
    add(s);
  }
  {
    auto s = event_spec("private_label", {"ln(avg_volume)"}, true);
    s.sample_filter.push_back(Predicate::parse("private_label == 1"));
    add(s);
  }
  {
    auto s = event_spec("holiday", {"ln(avg_volume)"}, true);
    s.sample_filter.push_back(Predicate::parse("holiday == 1"));
    add(s);
  }
  {
    auto s = event_spec("producer_quartile", {"ln(avg_volume)"});
    s.by = "producer_quartile";
    add(s);
  }
  {
    auto s = event_spec("demographics", {"ln(avg_volume)", "median_income", "pct_minority", "pct_unemployed"}, true);
    s.fixed_effects = {"month", "year", "product"};
    add(s);
  }
  {
    RegressionSpec s;
    s.name = "category_ols";
    s.table = "categories";
    s.dependent = "share_small";
    s.regressors = {Term::parse("ln(avg_volume)")};
    s.se_kind = fe::SeKind::hc1;
    add(s);
  }
  {
    RegressionSpec s;
    s.name = "upc_count";
    s.table = "categories";
    s.dependent = "share_small";
    s.regressors = {Term::parse("n_upcs")};
    s.se_kind = fe::SeKind::hc1;
    add(s);
  }
  return m;
}

const std::map<std::string, RegressionSpec>& presets() {
  static const auto m = build_presets();
  return m;
}

}  // namespace

RegressionSpec preset(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw std::invalid_argument("unknown regression preset '" + name + "'");
  return it->second;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : presets()) out.push_back(k);
  out.push_back("per_product");
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Design

std::string resolve_column(const std::string& name) { return name == "product" ? "upc" : name; }

Design build_design(const Dataset& data, const RegressionSpec& spec) {
  spec.validate();
  const std::size_t n = data.rows();

  // Resolve every referenced column first so a missing one is reported by name.
  const auto& dep = data.column(spec.dependent);
  std::vector<const std::vector<double>*> base, fe_cols;
  std::vector<std::vector<const std::vector<double>*>> inter;
  for (const auto& t : spec.regressors) {
    base.push_back(&data.column(t.column));
    inter.emplace_back();
    for (const auto& i : t.interactions) inter.back().push_back(&data.column(i));
  }
  for (const auto& f : spec.fixed_effects) fe_cols.push_back(&data.column(resolve_column(f)));
  const std::vector<double>* cl = spec.cluster ? &data.column(resolve_column(*spec.cluster)) : nullptr;
  std::vector<const std::vector<double>*> filt;
  for (const auto& p : spec.sample_filter) filt.push_back(&data.column(p.column));

  Design d;
  std::vector<std::size_t> rows;
  std::vector<double> values;
  std::vector<double> buffer;
  rows.reserve(n);
  buffer.reserve(n * spec.regressors.size());
  for (std::size_t r = 0; r < n; ++r) {
    bool keep = true;
    for (std::size_t f = 0; f < filt.size() && keep; ++f) keep = spec.sample_filter[f].holds((*filt[f])[r]);
    if (!keep) {
      ++d.rows_filtered;
      continue;
    }
    bool missing = std::isnan(dep[r]);
    for (const auto* c : fe_cols) missing = missing || std::isnan((*c)[r]);
    if (cl) missing = missing || std::isnan((*cl)[r]);
    bool nonpositive = false;
    values.clear();
    for (std::size_t j = 0; j < spec.regressors.size(); ++j) {
      const auto& t = spec.regressors[j];
      double v = (*base[j])[r];
      if (std::isnan(v)) missing = true;
      switch (t.transform) {
        case Transform::identity: break;
        case Transform::ln:
          if (!(v > 0)) nonpositive = nonpositive || !std::isnan(v);
          v = v > 0 ? std::log(v) : kNaN;
          break;
        case Transform::ln1p:
          if (!(v > -1)) nonpositive = nonpositive || !std::isnan(v);
          v = v > -1 ? std::log1p(v) : kNaN;
          break;
      }
      for (const auto* ic : inter[j]) {
        if (std::isnan((*ic)[r])) missing = true;
        v *= (*ic)[r];
      }
      values.push_back(v);
    }
    if (missing) {
      ++d.rows_dropped_missing;
      continue;
    }
    if (nonpositive) {
      ++d.rows_dropped_nonpositive;
      continue;
    }
    rows.push_back(r);
    buffer.insert(buffer.end(), values.begin(), values.end());
  }
  if (rows.empty()) throw DataError("regression '" + spec.name + "': every row was dropped");

  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(spec.regressors.size());
  d.x.resize(m, k);
  d.y.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    d.y(i) = dep[rows[static_cast<std::size_t>(i)]];
    for (Eigen::Index j = 0; j < k; ++j) d.x(i, j) = buffer[static_cast<std::size_t>(i * k + j)];
  }
  for (const auto& t : spec.regressors) d.names.push_back(t.name());

  std::vector<double> tmp(rows.size());
  for (std::size_t f = 0; f < fe_cols.size(); ++f) {
    for (std::size_t i = 0; i < rows.size(); ++i) tmp[i] = (*fe_cols[f])[rows[i]];
    d.fes.push_back(fe::make_fe_index(spec.fixed_effects[f], tmp));
  }
  if (cl) {
    for (std::size_t i = 0; i < rows.size(); ++i) tmp[i] = (*cl)[rows[i]];
    auto idx = fe::make_fe_index(*spec.cluster, tmp);
    d.clusters = std::move(idx.codes);
    d.n_clusters = idx.n_groups;
  }
  return d;
}

std::optional<std::size_t> RegressionResult::index_of(const std::string& term) const {
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i] == term) return i;
  return std::nullopt;
}

RegressionResult fit_design(Design d, const RegressionSpec& spec) {
  RegressionResult res;
  res.label = spec.name;
  res.rows_dropped = d.rows_dropped_missing + d.rows_dropped_nonpositive;
  const Eigen::Index n = d.x.rows();

  std::vector<double> ref_norms;
  std::vector<std::string> names = d.names;
  fe::Matrix x;
  fe::Vector y;
  std::int64_t df_fe = 0;
  if (d.fes.empty()) {
    x.resize(n, d.x.cols() + 1);
    x.col(0).setOnes();
    x.rightCols(d.x.cols()) = d.x;
    names.insert(names.begin(), "const");
    y = d.y;
    for (Eigen::Index j = 0; j < x.cols(); ++j) ref_norms.push_back(x.col(j).norm());
  } else {
    fe::Matrix both(n, d.x.cols() + 1);
    both.leftCols(d.x.cols()) = d.x;
    both.col(d.x.cols()) = d.y;
    for (Eigen::Index j = 0; j < d.x.cols(); ++j) ref_norms.push_back(d.x.col(j).norm());
    const auto report = fe::absorb_fe(both, d.fes, {spec.tolerance, spec.max_iter});
    res.iterations = report.iterations;
    res.final_change = report.max_change;
    x = both.leftCols(d.x.cols());
    y = both.col(d.x.cols());
    df_fe = fe::fe_degrees_of_freedom(d.fes);
  }

  const fe::OlsFit fit = fe::ols_fit(x, y, ref_norms);
  for (int j : fit.dropped) res.dropped_terms.push_back(names[static_cast<std::size_t>(j)]);

  fe::Matrix xk(n, static_cast<Eigen::Index>(fit.kept.size()));
  for (std::size_t c = 0; c < fit.kept.size(); ++c) {
    xk.col(static_cast<Eigen::Index>(c)) = x.col(fit.kept[c]);
    res.terms.push_back(names[static_cast<std::size_t>(fit.kept[c])]);
  }
  res.coef.resize(static_cast<Eigen::Index>(fit.kept.size()));
  for (std::size_t c = 0; c < fit.kept.size(); ++c) res.coef(static_cast<Eigen::Index>(c)) = fit.coef(fit.kept[c]);

  res.n_obs = n;
  res.n_clusters = d.n_clusters;
  res.dof_k = static_cast<std::int64_t>(fit.kept.size()) + df_fe;
  res.se = fe::standard_errors(xk, fit.residuals, fit.xtx_inv, d.clusters, spec.se_kind, res.dof_k);

  double tss = 0;
  if (d.fes.empty()) {
    const double mean = y.mean();
    tss = (y.array() - mean).square().sum();
  } else {
    tss = y.squaredNorm();
  }
  res.r2_within = tss > 0 ? 1.0 - fit.residuals.squaredNorm() / tss : 0.0;
  return res;
}

RegressionResult run_spec(const Dataset& data, const RegressionSpec& spec) {
  return fit_design(build_design(data, spec), spec);
}

std::vector<GroupResult> run_spec_by(const Dataset& data, const RegressionSpec& spec, unsigned threads) {
  if (!spec.by) return {GroupResult{0, run_spec(data, spec), {}}};
  const auto& by = data.column(*spec.by);
  std::map<double, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < by.size(); ++r)
    if (!std::isnan(by[r])) groups[by[r]].push_back(r);

  std::vector<std::pair<double, std::vector<std::size_t>>> items(groups.begin(), groups.end());
  std::vector<GroupResult> out(items.size());
  RegressionSpec sub = spec;
  sub.by.reset();
  parallel_for(items.size(), threads, [&](std::size_t i) {
    out[i].group = items[i].first;
    try {
      RegressionSpec s = sub;
      std::ostringstream label;
      label << spec.name << '[' << *spec.by << '=' << items[i].first << ']';
      s.name = label.str();
      out[i].result = run_spec(data.select_rows(items[i].second), s);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Per-product regressions

ProductRegressions per_product_regressions(const Dataset& stats, std::int64_t min_stores) {
  const auto& upc = stats.column("upc");
  const auto& cat = stats.column("category");
  const auto& vol = stats.column("avg_volume");
  const auto& share = stats.column("share_small");

  std::map<double, std::vector<std::size_t>> by_upc;
  for (std::size_t r = 0; r < stats.rows(); ++r)
    if (!std::isnan(share[r]) && !std::isnan(vol[r])) by_upc[upc[r]].push_back(r);

  ProductRegressions out;
  for (const auto& [u, rows] : by_upc) {
    if (static_cast<std::int64_t>(rows.size()) < min_stores) continue;
    const auto m = static_cast<Eigen::Index>(rows.size());
    fe::Matrix x(m, 2);
    fe::Vector y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      x(i, 0) = 1.0;
      x(i, 1) = vol[rows[static_cast<std::size_t>(i)]];
      y(i) = share[rows[static_cast<std::size_t>(i)]];
    }
    ProductRegression pr;
    pr.upc = u;
    pr.category = cat[rows.front()];
    pr.n_stores = m;
    try {
      const auto fit = fe::ols_fit(x, y);
      if (fit.kept.size() < 2) continue;
      const auto se = fe::standard_errors(x, fit.residuals, fit.xtx_inv, {}, fe::SeKind::hc1, 2);
      pr.coefficient = fit.coef(1);
      pr.se = se(1);
    } catch (const std::exception&) {
      continue;
    }
    out.products.push_back(pr);
  }

  std::map<double, std::vector<const ProductRegression*>> by_cat;
  for (const auto& p : out.products) by_cat[p.category].push_back(&p);
  for (const auto& [c, items] : by_cat) {
    CategoryRollup r;
    r.category = c;
    r.n_coefficients = static_cast<std::int64_t>(items.size());
    std::int64_t positive = 0, sig_positive = 0;
    double sum = 0;
    for (const auto* p : items) {
      sum += p->coefficient;
      if (p->coefficient > 0) ++positive;
      const double t = p->se > 0 ? p->coefficient / p->se : 0.0;
      if (std::abs(t) >= 1.959963984540054) {
        ++r.n_significant;
        if (p->coefficient > 0) ++sig_positive;
      }
    }
    r.avg_coefficient = sum / static_cast<double>(items.size());
    r.pct_positive = 100.0 * static_cast<double>(positive) / static_cast<double>(items.size());
    r.pct_positive_among_significant =
        r.n_significant > 0 ? 100.0 * static_cast<double>(sig_positive) / static_cast<double>(r.n_significant) : 0.0;
    out.categories.push_back(r);
  }
  return out;
}

}  // namespace menucost

#include "menucost/price_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace menucost {

// ---------------------------------------------------------------------------
// Sales volume

double average_sales_volume(std::span<const WeekUnits> series) {
  if (series.empty()) throw std::invalid_argument("average_sales_volume: empty series");
  std::int64_t total = 0;
  for (const auto& w : series) total += w.units;
  const int span_weeks = series.back().week - series.front().week;
  return static_cast<double>(total) / static_cast<double>(span_weeks == 0 ? 1 : span_weeks);
}

bool volume_guard_applied(std::span<const WeekUnits> series) {
  return !series.empty() && series.back().week == series.front().week;
}

std::optional<double> rolling_volume(std::span<const WeekUnits> series, int t, int window) {
  const auto lo = std::lower_bound(series.begin(), series.end(), t - window,
                                   [](const WeekUnits& w, int week) { return w.week < week; });
  const auto hi = std::lower_bound(lo, series.end(), t, [](const WeekUnits& w, int week) { return w.week < week; });
  if (lo == hi) return std::nullopt;
  return average_sales_volume(std::span<const WeekUnits>(&*lo, static_cast<std::size_t>(hi - lo)));
}

// ---------------------------------------------------------------------------
// Sale filter

SalesFilterResult sales_filter(std::span<const int> weeks, std::span<const Cents> prices,
                               const SalesFilterParams& params) {
  if (weeks.size() != prices.size()) throw std::invalid_argument("sales_filter: weeks and prices differ in length");
  const std::size_t n = prices.size();
  SalesFilterResult out;
  out.flags.assign(n, WeekFlag::regular);
  out.regular_price.assign(n, 0);
  if (n == 0) return out;

  const std::int64_t depth_bp = std::llround(params.depth_pct * 100.0);
  Cents regular = prices[0];
  out.regular_price[0] = regular;

  std::size_t i = 1;
  while (i < n) {
    const Cents p = prices[i];
    const bool deep_drop = p * 10000 <= regular * (10000 - depth_bp);
    if (deep_drop) {
      std::size_t j = i + 1;
      bool returned = false;
      for (; j < n && weeks[j] - weeks[i] <= params.window_weeks; ++j) {
        if (prices[j] >= regular - params.return_tolerance) {
          returned = true;
          break;
        }
      }
      if (returned) {
        for (std::size_t k = i; k < j; ++k) {
          out.flags[k] = WeekFlag::sale;
          out.regular_price[k] = regular;
        }
        out.flags[j] = WeekFlag::bounce_back;
        regular = prices[j];
        out.regular_price[j] = regular;
        i = j + 1;
        continue;
      }
    }
    regular = p;
    out.regular_price[i] = regular;
    ++i;
  }
  return out;
}

SalesFilterResult sales_filter(std::span<const Cents> prices, const SalesFilterParams& params) {
  std::vector<int> weeks(prices.size());
  std::iota(weeks.begin(), weeks.end(), 0);
  return sales_filter(weeks, prices, params);
}

// ---------------------------------------------------------------------------
// Detection

bool nine_ending(Cents price) { return price % 10 == 9; }

namespace {
double wholesale(Cents price, double margin_pct) { return static_cast<double>(price) * (1.0 - margin_pct / 100.0); }
}  // namespace

std::vector<PriceChangeEvent> detect_price_changes(std::int64_t store, std::int64_t upc,
                                                   std::span<const SeriesRow> series, DetectMode mode,
                                                   const ChangeFilters& filters, const SalesFilterParams& sales) {
  std::vector<PriceChangeEvent> events;
  const std::size_t n = series.size();
  if (n < 2) return events;

  std::vector<int> weeks(n);
  std::vector<Cents> posted(n);
  for (std::size_t i = 0; i < n; ++i) {
    weeks[i] = series[i].week;
    posted[i] = series[i].price;
  }
  const SalesFilterResult sf = sales_filter(weeks, posted, sales);
  const std::vector<Cents>& price = filters.regular_only ? sf.regular_price : posted;

  for (std::size_t i = 1; i < n; ++i) {
    if (weeks[i] != weeks[i - 1] + 1) continue;
    if (price[i] == price[i - 1]) continue;

    PriceChangeEvent e;
    e.store = store;
    e.upc = upc;
    e.week = weeks[i];
    e.pre_price = price[i - 1];
    e.post_price = price[i];
    e.delta_cents = price[i] - price[i - 1];
    e.delta_pct = static_cast<double>(e.delta_cents) / static_cast<double>(e.pre_price);
    e.direction = e.delta_cents > 0 ? Direction::increase : Direction::decrease;
    e.survived_two_weeks = i + 1 < n && weeks[i + 1] == weeks[i] + 1 && price[i + 1] == price[i];
    e.nine_ending_pre = nine_ending(e.pre_price);
    e.on_sale_or_bounceback = sf.flags[i] != WeekFlag::regular || sf.flags[i - 1] == WeekFlag::sale;
    e.coupon_adjacent = series[i].flag == SaleFlag::coupon || series[i - 1].flag == SaleFlag::coupon;
    e.margin_pct = series[i].margin_pct;
    e.abs_wholesale_change =
        std::abs(wholesale(price[i], series[i].margin_pct) - wholesale(price[i - 1], series[i - 1].margin_pct));

    if (mode == DetectMode::survived_2w && !e.survived_two_weeks) continue;
    if (filters.exclude_leq_2c && e.abs_delta() <= 2) continue;
    if (filters.exclude_coupon_adjacent && e.coupon_adjacent) continue;
    if (filters.exclude_sale_bounceback && e.on_sale_or_bounceback) continue;
    events.push_back(e);
  }
  return events;
}

std::vector<PriceChangeEvent> detect_price_changes(std::span<const PanelObservation> panel, DetectMode mode,
                                                   const ChangeFilters& filters, const SalesFilterParams& sales) {
  std::vector<PriceChangeEvent> events;
  std::vector<SeriesRow> series;
  std::size_t begin = 0;
  while (begin < panel.size()) {
    std::size_t end = begin + 1;
    while (end < panel.size() && panel[end].same_series(panel[begin])) ++end;
    series.clear();
    for (std::size_t i = begin; i < end; ++i) {
      const auto& o = panel[i];
      series.push_back({o.week, o.price, o.units, o.sale_flag, o.margin_pct});
    }
    auto part = detect_price_changes(panel[begin].store, panel[begin].upc, series, mode, filters, sales);
    events.insert(events.end(), part.begin(), part.end());
    begin = end;
  }
  return events;
}

// ---------------------------------------------------------------------------
// Small-change rules

SmallChangeRule SmallChangeRule::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("small-change rule must look like kind:value, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  double value = 0;
  try {
    std::size_t used = 0;
    value = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad small-change threshold in '" + text + "'");
  }
  SmallChangeRule rule;
  if (kind == "abs" || kind == "cents") {
    rule = abs_cents(value);
  } else if (kind == "pct") {
    rule = pct(value);
  } else if (kind == "kappa" || kind == "rel") {
    rule = relative(value);
  } else {
    throw std::invalid_argument("unknown small-change rule kind '" + kind + "'");
  }
  rule.validate();
  return rule;
}

std::string SmallChangeRule::label() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::abs_cents: os << "abs:"; break;
    case Kind::pct: os << "pct:"; break;
    case Kind::relative_kappa: os << "kappa:"; break;
  }
  os << threshold;
  return os.str();
}

void SmallChangeRule::validate() const {
  if (kind == Kind::relative_kappa) {
    if (!(threshold > 0 && threshold <= 1)) throw std::invalid_argument("kappa must lie in (0, 1]");
  } else if (!(threshold > 0)) {
    throw std::invalid_argument("small-change threshold must be > 0");
  }
}

bool classify_small(const PriceChangeEvent& event, const SmallChangeRule& rule, const ProductStoreStats& stats) {
  const Cents size = event.abs_delta();
  switch (rule.kind) {
    case SmallChangeRule::Kind::abs_cents:
      return static_cast<double>(size) <= rule.threshold;
    case SmallChangeRule::Kind::pct: {
      const std::int64_t bp = std::llround(rule.threshold * 100.0);
      return size * 10000 <= bp * event.pre_price;
    }
    case SmallChangeRule::Kind::relative_kappa:
      if (!(stats.mean_abs_change > 0))
        throw std::invalid_argument("relative small-change rule needs a positive mean absolute change");
      return static_cast<double>(size) <= rule.threshold * stats.mean_abs_change;
  }
  return false;
}

ProductStoreStats series_stats(std::int64_t store, std::int64_t upc, std::span<const SeriesRow> series,
                               int rolling_window) {
  if (series.empty()) throw std::invalid_argument("series_stats: empty series");
  ProductStoreStats s;
  s.store = store;
  s.upc = upc;
  std::vector<WeekUnits> wu;
  wu.reserve(series.size());
  double price_sum = 0;
  double revenue = 0;
  for (const auto& r : series) {
    wu.push_back({r.week, r.units});
    price_sum += static_cast<double>(r.price);
    revenue += static_cast<double>(r.price) * static_cast<double>(r.units);
  }
  s.avg_volume = average_sales_volume(wu);
  s.volume_guard = volume_guard_applied(wu);
  s.avg_volume_52w = rolling_volume(wu, series.back().week + 1, rolling_window);
  s.n_weeks = static_cast<std::int64_t>(series.size());
  s.first_week = series.front().week;
  s.last_week = series.back().week;
  s.avg_price = price_sum / static_cast<double>(series.size());
  const int span_weeks = s.last_week - s.first_week;
  s.avg_revenue = revenue / static_cast<double>(span_weeks == 0 ? 1 : span_weeks);
  return s;
}

// ---------------------------------------------------------------------------
// Deciles and histograms

namespace {
std::vector<std::size_t> volume_rank(std::span<const ProductStoreStats> stats) {
  std::vector<std::size_t> order(stats.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    const auto& a = stats[l];
    const auto& b = stats[r];
    if (a.avg_volume != b.avg_volume) return a.avg_volume < b.avg_volume;
    if (a.store != b.store) return a.store < b.store;
    return a.upc < b.upc;
  });
  return order;
}
}  // namespace

std::map<std::pair<std::int64_t, std::int64_t>, int> volume_groups(std::span<const ProductStoreStats> stats,
                                                                   int n_groups) {
  std::map<std::pair<std::int64_t, std::int64_t>, int> out;
  const auto order = volume_rank(stats);
  const std::size_t n = order.size();
  for (std::size_t r = 0; r < n; ++r) {
    const auto& s = stats[order[r]];
    out[{s.store, s.upc}] = static_cast<int>(r * static_cast<std::size_t>(n_groups) / n);
  }
  return out;
}

std::vector<DecileRow> decile_table(std::span<const ProductStoreStats> stats, DecileWeighting weighting,
                                    std::span<const PriceChangeEvent> events,
                                    std::span<const std::uint8_t> small_flags) {
  if (stats.size() < 10) throw std::invalid_argument("decile_table: need at least 10 product-stores");
  std::vector<DecileRow> rows(10);
  for (int d = 0; d < 10; ++d) {
    rows[static_cast<std::size_t>(d)].decile = d + 1;
    rows[static_cast<std::size_t>(d)].min_volume = std::numeric_limits<double>::infinity();
    rows[static_cast<std::size_t>(d)].max_volume = -std::numeric_limits<double>::infinity();
  }

  if (weighting == DecileWeighting::product_store) {
    const auto order = volume_rank(stats);
    const std::size_t n = order.size();
    for (std::size_t r = 0; r < n; ++r) {
      const auto& s = stats[order[r]];
      auto& row = rows[r * 10 / n];
      ++row.n_groups;
      row.n_changes += s.n_changes;
      row.n_small += s.n_small;
      row.min_volume = std::min(row.min_volume, s.avg_volume);
      row.max_volume = std::max(row.max_volume, s.avg_volume);
    }
  } else {
    if (events.size() != small_flags.size())
      throw std::invalid_argument("decile_table: event weighting needs one small flag per event");
    std::map<std::pair<std::int64_t, std::int64_t>, double> volume;
    for (const auto& s : stats) volume[{s.store, s.upc}] = s.avg_volume;
    struct Item {
      double volume;
      std::int64_t store, upc;
      int week;
      bool small;
    };
    std::vector<Item> items;
    items.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& e = events[i];
      const auto it = volume.find({e.store, e.upc});
      if (it == volume.end()) throw std::invalid_argument("decile_table: event without product-store stats");
      items.push_back({it->second, e.store, e.upc, e.week, small_flags[i] != 0});
    }
    std::sort(items.begin(), items.end(), [](const Item& l, const Item& r) {
      return std::tie(l.volume, l.store, l.upc, l.week) < std::tie(r.volume, r.store, r.upc, r.week);
    });
    const std::size_t n = items.size();
    std::pair<std::int64_t, std::int64_t> last{-1, -1};
    std::size_t last_decile = 11;
    for (std::size_t r = 0; r < n; ++r) {
      const auto& it = items[r];
      const std::size_t d = r * 10 / n;
      auto& row = rows[d];
      if (std::make_pair(it.store, it.upc) != last || d != last_decile) ++row.n_groups;
      last = {it.store, it.upc};
      last_decile = d;
      ++row.n_changes;
      row.n_small += it.small ? 1 : 0;
      row.min_volume = std::min(row.min_volume, it.volume);
      row.max_volume = std::max(row.max_volume, it.volume);
    }
  }
  for (auto& row : rows) {
    row.share_small = row.n_changes > 0 ? static_cast<double>(row.n_small) / static_cast<double>(row.n_changes) : 0;
    if (row.n_groups == 0 && row.n_changes == 0) row.min_volume = row.max_volume = 0;
  }
  return rows;
}

const char* tercile_name(int group) {
  switch (group) {
    case 0: return "low";
    case 1: return "mid";
    default: return "high";
  }
}

SizeHistogram::SizeHistogram(SizeBins bins) : bins_(bins) {
  for (auto& c : counts_) c.assign(static_cast<std::size_t>(max_bin()) + 1, 0);
}

int SizeHistogram::bin_of(const PriceChangeEvent& event, SizeBins bins) {
  if (bins == SizeBins::cents) return static_cast<int>(event.abs_delta());
  return static_cast<int>(std::lround(std::abs(event.delta_pct) * 100.0));
}

void SizeHistogram::add(const PriceChangeEvent& event, int tercile) {
  const auto g = static_cast<std::size_t>(std::clamp(tercile, 0, 2));
  ++totals_[g];
  const int b = bin_of(event, bins_);
  if (b >= 1 && b <= max_bin()) ++counts_[g][static_cast<std::size_t>(b)];
}

std::vector<HistogramRow> SizeHistogram::rows() const {
  std::vector<HistogramRow> out;
  for (int g = 0; g < 3; ++g) {
    const auto gi = static_cast<std::size_t>(g);
    for (int b = 1; b <= max_bin(); ++b) {
      const std::int64_t c = counts_[gi][static_cast<std::size_t>(b)];
      const double f = totals_[gi] > 0 ? static_cast<double>(c) / static_cast<double>(totals_[gi]) : 0.0;
      out.push_back({tercile_name(g), b, c, f});
    }
  }
  return out;
}

std::vector<HistogramRow> size_histogram(std::span<const PriceChangeEvent> events,
                                         std::span<const ProductStoreStats> stats, SizeBins bins) {
  const auto groups = volume_groups(stats, 3);
  SizeHistogram h(bins);
  for (const auto& e : events) {
    const auto it = groups.find({e.store, e.upc});
    if (it == groups.end()) throw std::invalid_argument("size_histogram: event without product-store stats");
    h.add(e, it->second);
  }
  return h.rows();
}

// ---------------------------------------------------------------------------
// Synchronization

namespace {
constexpr int kCategoryCell = 0;
constexpr int kProducerCell = 1;
}  // namespace

std::size_t SyncIndex::KeyHash::operator()(const Key& k) const {
  std::uint64_t h = static_cast<std::uint64_t>(k.store) * 0x9E3779B97F4A7C15ull;
  h ^= static_cast<std::uint64_t>(k.group) + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2);
  h ^= static_cast<std::uint64_t>(k.week) * 0xBF58476D1CE4E5B9ull + (h << 6) + (h >> 2);
  h ^= static_cast<std::uint64_t>(k.kind);
  return static_cast<std::size_t>(h);
}

void SyncIndex::add_presence(std::int64_t store, int week, std::int64_t category, std::int64_t producer) {
  ++cells_[{store, category, week, kCategoryCell}].present;
  ++cells_[{store, producer, week, kProducerCell}].present;
}

void SyncIndex::add_change(std::int64_t store, int week, std::int64_t category, std::int64_t producer,
                           Cents abs_delta) {
  auto& c = cells_[{store, category, week, kCategoryCell}];
  ++c.changed;
  c.sum_abs += abs_delta;
  auto& p = cells_[{store, producer, week, kProducerCell}];
  ++p.changed;
  p.sum_abs += abs_delta;
}

const SyncIndex::Cell* SyncIndex::find(const Key& k) const {
  const auto it = cells_.find(k);
  return it == cells_.end() ? nullptr : &it->second;
}

SyncFeatures SyncIndex::features(std::int64_t store, int week, std::int64_t category, std::int64_t producer,
                                 Cents abs_delta, SyncLevel level, bool self_changed) const {
  SyncFeatures f;
  const std::int64_t self = self_changed ? 1 : 0;
  if (!self_changed) abs_delta = 0;
  const Key level_key = level == SyncLevel::category ? Key{store, category, week, kCategoryCell}
                                                     : Key{store, producer, week, kProducerCell};
  if (const Cell* c = find(level_key); c && c->present > 1) {
    const std::int64_t others_changed = c->changed - self;
    f.share_others_changing = static_cast<double>(others_changed) / static_cast<double>(c->present - 1);
    if (others_changed > 0)
      f.mean_abs_others = static_cast<double>(c->sum_abs - abs_delta) / static_cast<double>(others_changed);
  }
  if (const Cell* c = find({store, producer, week, kProducerCell}); c && c->present > 1) {
    f.share_same_producer_changing = static_cast<double>(c->changed - self) / static_cast<double>(c->present - 1);
  }
  return f;
}

std::vector<SyncFeatures> synchronization_features(std::span<const PriceChangeEvent> events,
                                                   std::span<const PanelObservation> panel, SyncLevel level) {
  SyncIndex index;
  std::map<std::pair<std::int64_t, std::int64_t>, std::pair<std::int64_t, std::int64_t>> groups;
  for (std::size_t i = 0; i < panel.size(); ++i) {
    const auto& o = panel[i];
    index.add_presence(o.store, o.week, o.category, o.producer);
    groups[{o.store, o.upc}] = {o.category, o.producer};
    if (i > 0 && panel[i - 1].same_series(o) && panel[i - 1].week + 1 == o.week && panel[i - 1].price != o.price) {
      const Cents d = o.price - panel[i - 1].price;
      index.add_change(o.store, o.week, o.category, o.producer, d < 0 ? -d : d);
    }
  }
  std::vector<SyncFeatures> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    const auto it = groups.find({e.store, e.upc});
    if (it == groups.end()) {
      out.emplace_back();
      continue;
    }
    out.push_back(index.features(e.store, e.week, it->second.first, it->second.second, e.abs_delta(), level));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Producer size

void ProducerSizeAccumulator::add(std::int64_t producer, std::int64_t category, std::int64_t upc, int week) {
  if (week < 0) throw std::invalid_argument("producer size: negative week index");
  auto& bits = units_[{producer, category}].weeks_by_upc[upc];
  if (bits.size() <= static_cast<std::size_t>(week)) bits.resize(static_cast<std::size_t>(week) + 1, false);
  bits[static_cast<std::size_t>(week)] = true;
  if (!any_) {
    first_week_ = last_week_ = week;
    any_ = true;
  } else {
    first_week_ = std::min(first_week_, week);
    last_week_ = std::max(last_week_, week);
  }
}

std::vector<ProducerSizeRow> ProducerSizeAccumulator::finish() const {
  return any_ ? finish(first_week_, last_week_) : std::vector<ProducerSizeRow>{};
}

std::vector<ProducerSizeRow> ProducerSizeAccumulator::finish(int first_week, int last_week) const {
  std::vector<ProducerSizeRow> rows;
  const int n_weeks = last_week - first_week + 1;
  if (n_weeks <= 0) return rows;
  for (const auto& [key, unit] : units_) {
    std::int64_t product_weeks = 0;
    for (const auto& [upc, bits] : unit.weeks_by_upc) {
      for (int w = first_week; w <= last_week && static_cast<std::size_t>(w) < bits.size(); ++w)
        product_weeks += bits[static_cast<std::size_t>(w)] ? 1 : 0;
    }
    rows.push_back({key.first, key.second, static_cast<double>(product_weeks) / n_weeks, 0});
  }
  std::map<std::int64_t, std::vector<std::size_t>> by_category;
  for (std::size_t i = 0; i < rows.size(); ++i) by_category[rows[i].category].push_back(i);
  for (auto& [cat, idx] : by_category) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) {
      if (rows[l].avg_products != rows[r].avg_products) return rows[l].avg_products < rows[r].avg_products;
      return rows[l].producer < rows[r].producer;
    });
    for (std::size_t r = 0; r < idx.size(); ++r) rows[idx[r]].quartile = static_cast<int>(r * 4 / idx.size()) + 1;
  }
  return rows;
}

std::vector<ProducerSizeRow> producer_size(std::span<const PanelObservation> panel) {
  ProducerSizeAccumulator acc;
  for (const auto& o : panel) acc.add(o.producer, o.category, o.upc, o.week);
  return acc.finish();
}

// ---------------------------------------------------------------------------
// Peak weeks

std::vector<int> peak_weeks(const std::map<int, std::int64_t>& counts_by_week) {
  std::vector<std::pair<int, std::int64_t>> weeks(counts_by_week.begin(), counts_by_week.end());
  std::int64_t total = 0;
  for (const auto& w : weeks) total += w.second;
  if (total <= 0) return {};
  std::stable_sort(weeks.begin(), weeks.end(), [](const auto& l, const auto& r) { return l.second > r.second; });
  std::vector<int> peak;
  std::int64_t cum = 0;
  for (const auto& [week, count] : weeks) {
    if (2 * cum >= total) break;
    peak.push_back(week);
    cum += count;
  }
  return peak;
}

// ---------------------------------------------------------------------------
// Category summary

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<CategorySummaryRow> category_summary(std::span<const ProductStoreStats> stats) {
  struct Acc {
    CategorySummaryRow row;
    std::vector<std::int64_t> upcs;
    std::vector<double> vol, rev, ln_vol, ln_rev;
    double price_sum = 0;
    std::int64_t n = 0;
  };
  std::map<std::int64_t, Acc> by_cat;
  for (const auto& s : stats) {
    auto& a = by_cat[s.category];
    a.row.category = s.category;
    a.row.n_changes += s.n_changes;
    a.row.n_small += s.n_small;
    a.upcs.push_back(s.upc);
    a.vol.push_back(s.avg_volume);
    a.rev.push_back(s.avg_revenue);
    if (s.avg_volume > 0 && s.avg_revenue > 0) {
      a.ln_vol.push_back(std::log(s.avg_volume));
      a.ln_rev.push_back(std::log(s.avg_revenue));
    }
    a.price_sum += s.avg_price;
    ++a.n;
  }
  std::vector<CategorySummaryRow> out;
  for (auto& [cat, a] : by_cat) {
    std::sort(a.upcs.begin(), a.upcs.end());
    a.row.n_upcs = std::unique(a.upcs.begin(), a.upcs.end()) - a.upcs.begin();
    a.row.share_small =
        a.row.n_changes > 0 ? static_cast<double>(a.row.n_small) / static_cast<double>(a.row.n_changes) : 0;
    a.row.avg_volume = std::accumulate(a.vol.begin(), a.vol.end(), 0.0) / static_cast<double>(a.n);
    a.row.avg_price = a.price_sum / static_cast<double>(a.n);
    a.row.corr_volume_revenue = pearson(a.vol, a.rev);
    a.row.corr_ln_volume_revenue = pearson(a.ln_vol, a.ln_rev);
    out.push_back(a.row);
  }
  return out;
}

}  // namespace menucost

// Empirical procedures over a scanner panel: volume averaging, price-change
// detection, small-change classification, sale flagging, decile and
// histogram tables, synchronization features, producer size, peak weeks and
// category summaries.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "menucost/panel.hpp"

namespace menucost {

// ---------------------------------------------------------------------------
// Sales volume

struct WeekUnits {
  int week = 0;
  std::int64_t units = 0;
};

/// Total units over (last observed week - first observed week). Missing weeks
/// therefore count as zero-sale weeks. A single observed week divides by 1.
/// `series` must be sorted by week.
double average_sales_volume(std::span<const WeekUnits> series);

/// True when the series spans a single week and the divide-by-1 guard applied.
bool volume_guard_applied(std::span<const WeekUnits> series);

/// The same rule restricted to observations in [t - window, t - 1].
std::optional<double> rolling_volume(std::span<const WeekUnits> series, int t, int window = 52);

// ---------------------------------------------------------------------------
// Sale / bounce-back filter

struct SalesFilterParams {
  double depth_pct = 5.0;
  Cents return_tolerance = 0;
  int window_weeks = 8;
};

enum class WeekFlag : std::uint8_t { regular, sale, bounce_back };

struct SalesFilterResult {
  std::vector<WeekFlag> flags;
  std::vector<Cents> regular_price;
};

/// V-shape sale detector. A week is a sale when its price is at least
/// depth_pct below the prevailing regular price and the price comes back to
/// within return_tolerance of that regular level within window_weeks; the
/// first week back is the bounce-back. Otherwise the lower price becomes the
/// new regular price. `weeks` must be increasing and match `prices`.
SalesFilterResult sales_filter(std::span<const int> weeks, std::span<const Cents> prices,
                               const SalesFilterParams& params = {});

/// Convenience overload for consecutive weeks.
SalesFilterResult sales_filter(std::span<const Cents> prices, const SalesFilterParams& params = {});

// ---------------------------------------------------------------------------
// Price-change detection

enum class DetectMode { all_adjacent, survived_2w };

struct ChangeFilters {
  bool exclude_leq_2c = false;
  bool exclude_coupon_adjacent = false;
  /// Drop events flagged on_sale_or_bounceback.
  bool exclude_sale_bounceback = false;
  /// Detect changes on the regular-price series (sale weeks carry the regular
  /// price) instead of the posted price.
  bool regular_only = false;
};

struct SeriesRow {
  int week = 0;
  Cents price = 0;
  std::int64_t units = 0;
  SaleFlag flag = SaleFlag::none;
  double margin_pct = 0;
};

bool nine_ending(Cents price);

/// Events for one product-store series sorted by week. A change at t needs
/// both t-1 and t observed with different prices; survived_2w also needs t+1
/// observed at the new price.
std::vector<PriceChangeEvent> detect_price_changes(std::int64_t store, std::int64_t upc,
                                                   std::span<const SeriesRow> series, DetectMode mode,
                                                   const ChangeFilters& filters = {},
                                                   const SalesFilterParams& sales = {});

/// Panel form; the panel must be sorted by (store, upc, week).
std::vector<PriceChangeEvent> detect_price_changes(std::span<const PanelObservation> panel, DetectMode mode,
                                                   const ChangeFilters& filters = {},
                                                   const SalesFilterParams& sales = {});

// ---------------------------------------------------------------------------
// Product-store aggregates and small-change rules

struct ProductStoreStats {
  std::int64_t store = 0;
  std::int64_t upc = 0;
  std::int64_t category = -1;
  std::int64_t producer = -1;
  double avg_volume = 0;
  std::optional<double> avg_volume_52w;
  double avg_price = 0;
  double avg_revenue = 0;
  double mean_abs_change = 0;
  std::int64_t n_changes = 0;
  std::int64_t n_small = 0;
  std::int64_t n_weeks = 0;
  int first_week = 0;
  int last_week = 0;
  bool volume_guard = false;

  std::optional<double> share_small() const {
    if (n_changes == 0) return std::nullopt;
    return static_cast<double>(n_small) / static_cast<double>(n_changes);
  }
};

struct SmallChangeRule {
  enum class Kind { abs_cents, pct, relative_kappa };
  Kind kind = Kind::abs_cents;
  double threshold = 10;

  static SmallChangeRule abs_cents(double cents) { return {Kind::abs_cents, cents}; }
  static SmallChangeRule pct(double percent) { return {Kind::pct, percent}; }
  static SmallChangeRule relative(double kappa) { return {Kind::relative_kappa, kappa}; }

  /// "abs:10", "pct:2", "kappa:0.5".
  static SmallChangeRule parse(const std::string& text);
  std::string label() const;
  void validate() const;
};

/// All thresholds are inclusive. Percent thresholds compare exactly at
/// basis-point resolution: |delta|*10000 <= bp * pre_price.
bool classify_small(const PriceChangeEvent& event, const SmallChangeRule& rule, const ProductStoreStats& stats);

/// Fills avg_volume, avg_volume_52w, avg_price, avg_revenue, n_weeks and the
/// week range from a sorted series. Change counts are left to the caller.
ProductStoreStats series_stats(std::int64_t store, std::int64_t upc, std::span<const SeriesRow> series,
                               int rolling_window = 52);

// ---------------------------------------------------------------------------
// Tables

struct DecileRow {
  int decile = 0;
  std::int64_t n_groups = 0;
  std::int64_t n_changes = 0;
  std::int64_t n_small = 0;
  double share_small = 0;
  double min_volume = 0;
  double max_volume = 0;
};

enum class DecileWeighting { product_store, event };

/// Product-stores ranked by avg_volume (ties by (store, upc)), split into ten
/// equal-count groups; events pooled within a decile. The event-weighted
/// variant ranks the events themselves by their product-store volume and
/// needs `events` plus `small_flags` aligned with it.
std::vector<DecileRow> decile_table(std::span<const ProductStoreStats> stats,
                                    DecileWeighting weighting = DecileWeighting::product_store,
                                    std::span<const PriceChangeEvent> events = {},
                                    std::span<const std::uint8_t> small_flags = {});

/// Rank-based groups over product-stores: group = floor(rank * n_groups / N).
/// Returns (store, upc) -> group, ranking by avg_volume with id tie-break.
std::map<std::pair<std::int64_t, std::int64_t>, int> volume_groups(std::span<const ProductStoreStats> stats,
                                                                   int n_groups);

enum class SizeBins { cents, percent };

struct HistogramRow {
  std::string volume_group;
  int bin = 0;
  std::int64_t count = 0;
  double frequency = 0;
};

const char* tercile_name(int group);

/// Accumulates change-size counts per volume tercile. Frequencies are counts
/// divided by the total number of events in the group (all sizes).
class SizeHistogram {
 public:
  explicit SizeHistogram(SizeBins bins);
  void add(const PriceChangeEvent& event, int tercile);
  std::vector<HistogramRow> rows() const;
  static int bin_of(const PriceChangeEvent& event, SizeBins bins);
  int max_bin() const { return bins_ == SizeBins::cents ? 50 : 30; }

 private:
  SizeBins bins_;
  std::array<std::vector<std::int64_t>, 3> counts_;
  std::array<std::int64_t, 3> totals_{};
};

std::vector<HistogramRow> size_histogram(std::span<const PriceChangeEvent> events,
                                         std::span<const ProductStoreStats> stats, SizeBins bins);

// ---------------------------------------------------------------------------
// Synchronization

enum class SyncLevel { category, producer };

struct SyncFeatures {
  std::optional<double> share_others_changing;
  std::optional<double> mean_abs_others;
  std::optional<double> share_same_producer_changing;
};

/// Store x week x group counts of products observed and of products whose
/// price changed, used to compute peer features that exclude the event's own
/// product.
class SyncIndex {
 public:
  /// Product observed in (store, week).
  void add_presence(std::int64_t store, int week, std::int64_t category, std::int64_t producer);
  /// Product's price changed in (store, week) by abs_delta cents.
  void add_change(std::int64_t store, int week, std::int64_t category, std::int64_t producer, Cents abs_delta);
  /// Features for a product observed at (store, week). When self_changed its
  /// own posted-price change of abs_delta is among the recorded changes and is
  /// taken out again.
  SyncFeatures features(std::int64_t store, int week, std::int64_t category, std::int64_t producer,
                        Cents abs_delta, SyncLevel level, bool self_changed = true) const;

 private:
  struct Cell {
    std::int64_t present = 0;
    std::int64_t changed = 0;
    std::int64_t sum_abs = 0;
  };
  struct Key {
    std::int64_t store;
    std::int64_t group;
    int week;
    int kind;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  const Cell* find(const Key& k) const;
  std::unordered_map<Key, Cell, KeyHash> cells_;
};

/// `panel` sorted by (store, upc, week) and carrying category/producer ids.
/// Peers are the other products of the same store and group observed at t;
/// peer changes are all adjacent-week price changes.
std::vector<SyncFeatures> synchronization_features(std::span<const PriceChangeEvent> events,
                                                   std::span<const PanelObservation> panel, SyncLevel level);

// ---------------------------------------------------------------------------
// Producer size

struct ProducerSizeRow {
  std::int64_t producer = 0;
  std::int64_t category = 0;
  double avg_products = 0;
  int quartile = 0;
};

/// Weekly distinct-product counts per producer within a category, averaged
/// over every panel week. Quartiles are assigned within each category by rank.
class ProducerSizeAccumulator {
 public:
  void add(std::int64_t producer, std::int64_t category, std::int64_t upc, int week);
  std::vector<ProducerSizeRow> finish() const;
  std::vector<ProducerSizeRow> finish(int first_week, int last_week) const;

 private:
  struct Unit {
    std::map<std::int64_t, std::vector<bool>> weeks_by_upc;
  };
  std::map<std::pair<std::int64_t, std::int64_t>, Unit> units_;
  int first_week_ = 0;
  int last_week_ = -1;
  bool any_ = false;
};

std::vector<ProducerSizeRow> producer_size(std::span<const PanelObservation> panel);

// ---------------------------------------------------------------------------
// Peak weeks

/// Weeks sorted by count descending (earlier week first on ties); the shortest
/// prefix whose cumulative count reaches half of the total.
std::vector<int> peak_weeks(const std::map<int, std::int64_t>& counts_by_week);

// ---------------------------------------------------------------------------
// Category summary

struct CategorySummaryRow {
  std::int64_t category = 0;
  std::int64_t n_changes = 0;
  std::int64_t n_small = 0;
  double share_small = 0;
  double avg_volume = 0;
  std::int64_t n_upcs = 0;
  double avg_price = 0;
  std::optional<double> corr_volume_revenue;
  std::optional<double> corr_ln_volume_revenue;
};

std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

std::vector<CategorySummaryRow> category_summary(std::span<const ProductStoreStats> stats);

}  // namespace menucost

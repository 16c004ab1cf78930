#include "menucost/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <unordered_map>

namespace menucost {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct EventRecord {
  PriceChangeEvent event;
  double volume_52w = kNaN;
  std::int64_t category = -1;
  std::int64_t producer = -1;
  Cents posted_abs_delta = 0;
  std::uint8_t small = 0;
  std::uint8_t posted_changed = 0;
};

std::string id_or_empty(std::int64_t id) { return id < 0 ? std::string{} : std::to_string(id); }
std::string flag(bool b) { return b ? "1" : "0"; }
using io::format_number;

const std::vector<std::string> kEventHeader = {
    "store", "upc", "week", "month", "year", "category", "producer", "zone", "private_label", "storable",
    "non_storable", "pack_qty", "pre_price", "post_price", "delta_cents", "delta_pct", "direction", "abs_delta",
    "survived_two_weeks", "nine_ending", "sale_bb", "coupon_adjacent", "small", "abs_dwholesale", "margin",
    "avg_volume", "volume_52w", "avg_price", "avg_revenue", "revenue_vxp", "share_others", "mean_abs_others",
    "share_same_producer", "producer_size", "producer_quartile", "peak", "holiday", "median_income", "pct_minority",
    "pct_unemployed"};

}  // namespace

std::string table_file(const std::string& stem, io::Format format) {
  return stem + (format == io::Format::tsv ? ".tsv" : ".csv");
}

AnalyzeSummary analyze(const AnalyzeOptions& opt, const std::function<void(const std::string&)>& warn) {
  opt.rule.validate();
  fs::create_directories(opt.out);
  const auto out_path = [&](const std::string& stem) { return opt.out / table_file(stem, opt.format); };

  std::unordered_map<std::int64_t, ProductMeta> meta;
  if (!opt.meta.empty())
    for (const auto& m : io::read_meta(opt.meta)) meta[m.upc] = m;
  std::unordered_map<std::int64_t, StoreInfo> stores;
  if (!opt.stores.empty())
    for (const auto& s : io::read_stores(opt.stores)) stores[s.store] = s;
  const io::Calendar calendar = opt.calendar.empty() ? io::Calendar{} : io::Calendar::from_file(opt.calendar);

  io::SortOptions sort;
  if (!opt.aliases.empty()) sort.aliases = io::read_upc_aliases(opt.aliases);
  sort.chunk_rows = opt.sort_chunk_rows;
  sort.temp_dir = opt.temp_dir.empty() ? opt.out : opt.temp_dir;
  io::SortedMovementStream stream(opt.input, sort);

  AnalyzeSummary summary;
  summary.external_sort = stream.external_sort_used();

  // ---- pass 1: per series -------------------------------------------------
  std::random_device rd;
  const fs::path event_tmp = sort.temp_dir / ("menucost-events-" + std::to_string(rd()) + ".bin");
  std::ofstream event_out(event_tmp, std::ios::binary);
  if (!event_out) throw DataError("cannot write temporary file '" + event_tmp.string() + "'");
  struct TmpGuard {
    fs::path p;
    ~TmpGuard() {
      std::error_code ec;
      fs::remove(p, ec);
    }
  } guard{event_tmp};

  std::unique_ptr<io::TableWriter> weeks_out;
  if (opt.weeks_table)
    weeks_out = std::make_unique<io::TableWriter>(
        out_path("weeks"),
        std::vector<std::string>{"store", "upc", "week", "month", "year", "category", "producer", "changed",
                                 "avg_volume", "avg_price", "avg_revenue"},
        opt.format);

  std::vector<ProductStoreStats> stats;
  SyncIndex sync;
  ProducerSizeAccumulator producers;
  std::map<std::pair<std::int64_t, std::int64_t>, std::map<int, std::int64_t>> peak_counts;
  std::unordered_map<std::int64_t, bool> missing_meta;
  int first_week = std::numeric_limits<int>::max();
  int last_week = std::numeric_limits<int>::min();

  std::vector<SeriesRow> series;
  std::vector<WeekUnits> units;
  std::int64_t cur_store = 0, cur_upc = 0;

  auto flush = [&] {
    if (series.empty()) return;
    std::int64_t category = -1, producer = -1;
    if (const auto it = meta.find(cur_upc); it != meta.end()) {
      category = it->second.category;
      producer = it->second.producer;
    } else if (!meta.empty() || !opt.meta.empty()) {
      missing_meta.emplace(cur_upc, true);
    }

    ProductStoreStats st = series_stats(cur_store, cur_upc, series, opt.rolling_window);
    st.category = category;
    st.producer = producer;
    auto events = detect_price_changes(cur_store, cur_upc, series, opt.mode, opt.filters, opt.sales);
    if (!events.empty()) {
      double sum = 0;
      for (const auto& e : events) sum += static_cast<double>(e.abs_delta());
      st.mean_abs_change = sum / static_cast<double>(events.size());
    }

    units.clear();
    for (const auto& r : series) units.push_back({r.week, r.units});

    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto& r = series[i];
      sync.add_presence(cur_store, r.week, category, producer);
      producers.add(producer, category, cur_upc, r.week);
      if (i > 0 && series[i - 1].week + 1 == r.week && series[i - 1].price != r.price) {
        const Cents d = r.price - series[i - 1].price;
        sync.add_change(cur_store, r.week, category, producer, d < 0 ? -d : d);
      }
    }
    first_week = std::min(first_week, series.front().week);
    last_week = std::max(last_week, series.back().week);

    std::size_t row = 0;
    auto& peaks = peak_counts[{cur_store, category}];
    for (const auto& e : events) {
      EventRecord rec;
      rec.event = e;
      rec.small = classify_small(e, opt.rule, st) ? 1 : 0;
      rec.category = category;
      rec.producer = producer;
      rec.volume_52w = rolling_volume(units, e.week, opt.rolling_window).value_or(kNaN);
      while (series[row].week < e.week) ++row;
      rec.posted_changed = row > 0 && series[row - 1].week + 1 == e.week && series[row - 1].price != series[row].price;
      rec.posted_abs_delta = rec.posted_changed ? std::abs(series[row].price - series[row - 1].price) : 0;
      event_out.write(reinterpret_cast<const char*>(&rec), sizeof rec);
      st.n_small += rec.small;
      ++peaks[e.week];
    }
    st.n_changes = static_cast<std::int64_t>(events.size());
    summary.events += st.n_changes;
    summary.small += st.n_small;

    if (weeks_out) {
      std::size_t k = 0;
      for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i].week != series[i - 1].week + 1) continue;
        while (k < events.size() && events[k].week < series[i].week) ++k;
        const bool changed = k < events.size() && events[k].week == series[i].week;
        const auto w = calendar.at(series[i].week);
        weeks_out->row({std::to_string(cur_store), std::to_string(cur_upc), std::to_string(series[i].week),
                        std::to_string(w.month), std::to_string(w.year), id_or_empty(category), id_or_empty(producer),
                        flag(changed), format_number(st.avg_volume), format_number(st.avg_price),
                        format_number(st.avg_revenue)});
      }
    }
    stats.push_back(st);
    ++summary.series;
    series.clear();
  };

  // A pack is flagged either on the row or in the product metadata.
  auto is_pack = [&](const PanelObservation& row) {
    if (row.pack_qty > 1) return true;
    const auto it = meta.find(row.upc);
    return it != meta.end() && it->second.pack_qty > 1;
  };
  PanelObservation o;
  while (stream.next(o)) {
    if (o.store != cur_store || o.upc != cur_upc) {
      flush();
      cur_store = o.store;
      cur_upc = o.upc;
    }
    ++summary.rows;
    if (opt.single_units_only && is_pack(o)) {
      ++summary.rows_dropped_packs;
      continue;
    }
    series.push_back({o.week, o.price, o.units, o.sale_flag, o.margin_pct});
  }
  flush();
  event_out.close();
  if (event_out.fail()) throw DataError("failed writing temporary event file");
  if (weeks_out) weeks_out->close();
  summary.alias_merges = stream.alias_merges();
  summary.upcs_without_meta = static_cast<std::int64_t>(missing_meta.size());
  if (warn && !missing_meta.empty())
    warn(std::to_string(missing_meta.size()) + " upc(s) have no metadata row; kept with unknown category/producer");

  // ---- panel-wide aggregates ---------------------------------------------
  std::map<std::pair<std::int64_t, std::int64_t>, std::pair<double, int>> producer_size_of;
  std::vector<ProducerSizeRow> producer_rows;
  if (!stats.empty()) producer_rows = producers.finish(first_week, last_week);
  for (const auto& r : producer_rows) producer_size_of[{r.producer, r.category}] = {r.avg_products, r.quartile};

  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<int>> peak_sets;
  {
    io::TableWriter w(out_path("peak_weeks"), {"store", "category", "week", "count"}, opt.format);
    for (const auto& [key, counts] : peak_counts) {
      auto weeks = peak_weeks(counts);
      std::sort(weeks.begin(), weeks.end());
      for (int wk : weeks)
        w.row({std::to_string(key.first), id_or_empty(key.second), std::to_string(wk),
               std::to_string(counts.at(wk))});
      peak_sets[key] = std::move(weeks);
    }
    w.close();
  }

  const auto terciles = stats.size() >= 3 ? volume_groups(stats, 3)
                                          : std::map<std::pair<std::int64_t, std::int64_t>, int>{};
  SizeHistogram hist_cents(SizeBins::cents), hist_pct(SizeBins::percent);

  // ---- pass 2: joins -----------------------------------------------------
  io::TableWriter events_w(out_path("events"), kEventHeader, opt.format);
  io::TableWriter sync_w(out_path("sync_features"),
                         {"store", "upc", "week", "share_others", "mean_abs_others", "share_same_producer"},
                         opt.format);
  std::vector<PriceChangeEvent> kept_events;
  std::vector<std::uint8_t> kept_small;
  const bool keep_events = opt.decile_weighting == DecileWeighting::event;

  std::ifstream event_in(event_tmp, std::ios::binary);
  EventRecord rec;
  std::size_t si = 0;
  while (event_in.read(reinterpret_cast<char*>(&rec), sizeof rec)) {
    const auto& e = rec.event;
    while (si < stats.size() && (stats[si].store != e.store || stats[si].upc != e.upc)) ++si;
    if (si == stats.size()) throw std::logic_error("analyze: event without product-store stats");
    const auto& st = stats[si];

    const SyncFeatures sf = sync.features(e.store, e.week, rec.category, rec.producer, rec.posted_abs_delta,
                                          SyncLevel::category, rec.posted_changed != 0);
    const auto w = calendar.at(e.week);
    const auto mit = meta.find(e.upc);
    const ProductMeta* pm = mit == meta.end() ? nullptr : &mit->second;
    const auto sit = stores.find(e.store);
    const StoreInfo* sinfo = sit == stores.end() ? nullptr : &sit->second;
    const auto pit = producer_size_of.find({rec.producer, rec.category});
    bool peak = false;
    if (const auto it = peak_sets.find({e.store, rec.category}); it != peak_sets.end())
      peak = std::binary_search(it->second.begin(), it->second.end(), e.week);

    if (const auto t = terciles.find({e.store, e.upc}); t != terciles.end()) {
      hist_cents.add(e, t->second);
      hist_pct.add(e, t->second);
    }
    if (keep_events) {
      kept_events.push_back(e);
      kept_small.push_back(rec.small);
    }

    const bool has_producer = pit != producer_size_of.end() && rec.producer >= 0;
    events_w.row({
        std::to_string(e.store), std::to_string(e.upc), std::to_string(e.week), std::to_string(w.month),
        std::to_string(w.year), id_or_empty(rec.category), id_or_empty(rec.producer),
        sinfo && sinfo->zone >= 0 ? std::to_string(sinfo->zone) : std::string{},
        pm ? flag(pm->brand == Brand::private_label) : std::string{}, pm ? flag(pm->storable) : std::string{},
        pm ? flag(!pm->storable) : std::string{}, pm ? std::to_string(pm->pack_qty) : std::string{},
        std::to_string(e.pre_price), std::to_string(e.post_price), std::to_string(e.delta_cents),
        format_number(e.delta_pct), std::to_string(static_cast<int>(e.direction)), std::to_string(e.abs_delta()),
        flag(e.survived_two_weeks), flag(e.nine_ending_pre), flag(e.on_sale_or_bounceback),
        flag(e.coupon_adjacent), flag(rec.small != 0), format_number(e.abs_wholesale_change),
        format_number(e.margin_pct), format_number(st.avg_volume), format_number(rec.volume_52w),
        format_number(st.avg_price), format_number(st.avg_revenue), format_number(st.avg_volume * st.avg_price),
        format_number(sf.share_others_changing), format_number(sf.mean_abs_others),
        format_number(sf.share_same_producer_changing), has_producer ? format_number(pit->second.first) : "",
        has_producer ? std::to_string(pit->second.second) : "", flag(peak), flag(w.holiday),
        sinfo ? format_number(sinfo->median_income) : "", sinfo ? format_number(sinfo->pct_minority) : "",
        sinfo ? format_number(sinfo->pct_unemployed) : ""});
    sync_w.row({std::to_string(e.store), std::to_string(e.upc), std::to_string(e.week),
                format_number(sf.share_others_changing), format_number(sf.mean_abs_others),
                format_number(sf.share_same_producer_changing)});
  }
  events_w.close();
  sync_w.close();

  // ---- tables --------------------------------------------------------------
  {
    io::TableWriter w(out_path("product_store_stats"),
                      {"store", "upc", "category", "producer", "avg_volume", "avg_volume_52w", "avg_price",
                       "avg_revenue", "revenue_vxp", "mean_abs_change", "n_changes", "n_small", "share_small",
                       "n_weeks", "first_week", "last_week", "volume_guard"},
                      opt.format);
    for (const auto& s : stats)
      w.row({std::to_string(s.store), std::to_string(s.upc), id_or_empty(s.category), id_or_empty(s.producer),
             format_number(s.avg_volume), format_number(s.avg_volume_52w), format_number(s.avg_price),
             format_number(s.avg_revenue), format_number(s.avg_volume * s.avg_price),
             format_number(s.mean_abs_change), std::to_string(s.n_changes), std::to_string(s.n_small),
             format_number(s.share_small()), std::to_string(s.n_weeks), std::to_string(s.first_week),
             std::to_string(s.last_week), flag(s.volume_guard)});
    w.close();
  }
  {
    io::TableWriter w(out_path("deciles"),
                      {"decile", "n_groups", "n_changes", "n_small", "share_small", "min_volume", "max_volume"},
                      opt.format);
    if (stats.size() >= 10) {
      for (const auto& d : decile_table(stats, opt.decile_weighting, kept_events, kept_small))
        w.row({std::to_string(d.decile), std::to_string(d.n_groups), std::to_string(d.n_changes),
               std::to_string(d.n_small), format_number(d.share_small), format_number(d.min_volume),
               format_number(d.max_volume)});
    } else if (warn) {
      warn("fewer than 10 product-stores; deciles.csv left empty");
    }
    w.close();
  }
  for (auto [stem, hist] : {std::pair{"histogram_cents", &hist_cents}, std::pair{"histogram_pct", &hist_pct}}) {
    io::TableWriter w(out_path(stem), {"volume_group", "bin", "count", "frequency"}, opt.format);
    for (const auto& r : hist->rows())
      w.row({r.volume_group, std::to_string(r.bin), std::to_string(r.count), format_number(r.frequency)});
    w.close();
  }
  {
    io::TableWriter w(out_path("category_summary"),
                      {"category", "n_changes", "n_small", "share_small", "avg_volume", "n_upcs", "avg_price",
                       "corr_volume_revenue", "corr_ln_volume_revenue"},
                      opt.format);
    for (const auto& c : category_summary(stats))
      w.row({id_or_empty(c.category), std::to_string(c.n_changes), std::to_string(c.n_small),
             format_number(c.share_small), format_number(c.avg_volume), std::to_string(c.n_upcs),
             format_number(c.avg_price), format_number(c.corr_volume_revenue),
             format_number(c.corr_ln_volume_revenue)});
    w.close();
  }
  {
    io::TableWriter w(out_path("producer_size"), {"producer", "category", "avg_products", "quartile"}, opt.format);
    for (const auto& r : producer_rows)
      w.row({id_or_empty(r.producer), id_or_empty(r.category), format_number(r.avg_products),
             std::to_string(r.quartile)});
    w.close();
  }
  {
    io::TableWriter w(out_path("summary"), {"key", "value"}, opt.format);
    w.row({"rows", std::to_string(summary.rows)});
    w.row({"rows_dropped_packs", std::to_string(summary.rows_dropped_packs)});
    w.row({"product_stores", std::to_string(summary.series)});
    w.row({"events", std::to_string(summary.events)});
    w.row({"small", std::to_string(summary.small)});
    w.row({"rule", opt.rule.label()});
    w.row({"upcs_without_meta", std::to_string(summary.upcs_without_meta)});
    w.row({"alias_merges", std::to_string(summary.alias_merges)});
    w.row({"external_sort", flag(summary.external_sort)});
    w.close();
  }
  return summary;
}

}  // namespace menucost

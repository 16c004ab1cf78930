#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "menucost/price_stats.hpp"

using namespace menucost;

namespace {

std::vector<SeriesRow> series_of(const std::vector<Cents>& prices, int first_week = 1) {
  std::vector<SeriesRow> s;
  for (std::size_t i = 0; i < prices.size(); ++i) s.push_back({first_week + static_cast<int>(i), prices[i], 1});
  return s;
}

PriceChangeEvent event_with(Cents pre, Cents post) {
  PriceChangeEvent e;
  e.pre_price = pre;
  e.post_price = post;
  e.delta_cents = post - pre;
  e.delta_pct = static_cast<double>(e.delta_cents) / static_cast<double>(pre);
  return e;
}

PanelObservation obs(std::int64_t store, std::int64_t upc, int week, Cents price, std::int64_t category,
                     std::int64_t producer = 0) {
  PanelObservation o;
  o.store = store;
  o.upc = upc;
  o.week = week;
  o.price = price;
  o.units = 1;
  o.category = category;
  o.producer = producer;
  return o;
}

}  // namespace

TEST_CASE("average sales volume over the first-to-last week span") {
  const std::vector<WeekUnits> gap{{1, 5}, {3, 7}};
  CHECK(average_sales_volume(gap) == 6.0);
  const std::vector<WeekUnits> single{{4, 10}};
  CHECK(average_sales_volume(single) == 10.0);
  CHECK(volume_guard_applied(single));
  CHECK_FALSE(volume_guard_applied(gap));
  const std::vector<WeekUnits> contiguous{{1, 2}, {2, 2}, {3, 2}};
  CHECK(average_sales_volume(contiguous) == 3.0);
  CHECK_THROWS(average_sales_volume(std::span<const WeekUnits>{}));
}

TEST_CASE("rolling volume") {
  const std::vector<WeekUnits> s{{1, 5}, {3, 7}, {60, 4}};
  CHECK(rolling_volume(s, 4, 52).value() == 6.0);
  CHECK_FALSE(rolling_volume(s, 1, 52).has_value());
  CHECK_FALSE(rolling_volume(s, 59, 5).has_value());
  const std::vector<WeekUnits> all{{1, 5}, {3, 7}};
  CHECK(rolling_volume(all, 100, 1000).value() == average_sales_volume(all));
}

TEST_CASE("volume rule versus the per-observed-week mean") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<WeekUnits> s;
    int week = static_cast<int>(rng() % 5);
    const int n = 2 + static_cast<int>(rng() % 20);
    bool gaps = false;
    for (int i = 0; i < n; ++i) {
      s.push_back({week, static_cast<std::int64_t>(rng() % 30)});
      const int step = (rng() % 4 == 0) ? 2 + static_cast<int>(rng() % 3) : 1;
      gaps = gaps || (step > 1 && i + 1 < n);
      week += step;
    }
    double total = 0;
    for (const auto& w : s) total += static_cast<double>(w.units);
    const double mean = total / n;
    const double v = average_sales_volume(s);
    // The span is last - first; gapless series have span n - 1 < n.
    const int span = s.back().week - s.front().week;
    CHECK(v == doctest::Approx(total / span));
    if (!gaps) CHECK(v >= mean);
    if (span >= n) CHECK(v <= mean);
  }
}

TEST_CASE("price-change detection") {
  SUBCASE("one surviving decrease") {
    const auto s = series_of({199, 199, 189, 189});
    const auto ev = detect_price_changes(1, 2, s, DetectMode::survived_2w);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].week == 3);
    CHECK(ev[0].delta_cents == -10);
    CHECK(ev[0].survived_two_weeks);
    CHECK(ev[0].direction == Direction::decrease);
    CHECK(ev[0].nine_ending_pre);
    CHECK(ev[0].delta_pct == doctest::Approx(-10.0 / 199));
  }
  SUBCASE("two-cent changes excluded") {
    const auto s = series_of({199, 197, 199});
    ChangeFilters f;
    f.exclude_leq_2c = true;
    CHECK(detect_price_changes(1, 2, s, DetectMode::all_adjacent, f).empty());
    CHECK(detect_price_changes(1, 2, s, DetectMode::all_adjacent).size() == 2);
  }
  SUBCASE("missing week hides the change") {
    std::vector<SeriesRow> s{{1, 199, 1}, {3, 189, 1}, {4, 189, 1}};
    CHECK(detect_price_changes(1, 2, s, DetectMode::all_adjacent).empty());
    std::vector<SeriesRow> same{{1, 199, 1}, {3, 199, 1}};
    CHECK(detect_price_changes(1, 2, same, DetectMode::all_adjacent).empty());
  }
  SUBCASE("survival needs the next week observed at the new price") {
    std::vector<SeriesRow> s{{1, 199, 1}, {2, 189, 1}, {4, 189, 1}};
    CHECK(detect_price_changes(1, 2, s, DetectMode::survived_2w).empty());
    CHECK(detect_price_changes(1, 2, s, DetectMode::all_adjacent).size() == 1);
  }
  SUBCASE("coupon adjacency") {
    auto s = series_of({199, 189, 189, 179, 179});
    s[0].flag = SaleFlag::coupon;
    ChangeFilters f;
    f.exclude_coupon_adjacent = true;
    const auto all = detect_price_changes(1, 2, s, DetectMode::survived_2w);
    REQUIRE(all.size() == 2);
    CHECK(all[0].coupon_adjacent);
    CHECK_FALSE(all[1].coupon_adjacent);
    const auto kept = detect_price_changes(1, 2, s, DetectMode::survived_2w, f);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].week == 4);
    s[0].flag = SaleFlag::none;
    s[1].flag = SaleFlag::coupon;
    CHECK(detect_price_changes(1, 2, s, DetectMode::survived_2w, f).size() == 1);
  }
  SUBCASE("sale and bounce-back flags") {
    const auto s = series_of({199, 199, 149, 199, 199});
    const auto ev = detect_price_changes(1, 2, s, DetectMode::all_adjacent);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].on_sale_or_bounceback);
    CHECK(ev[1].on_sale_or_bounceback);
    ChangeFilters f;
    f.exclude_sale_bounceback = true;
    CHECK(detect_price_changes(1, 2, s, DetectMode::all_adjacent, f).empty());
    ChangeFilters reg;
    reg.regular_only = true;
    CHECK(detect_price_changes(1, 2, s, DetectMode::all_adjacent, reg).empty());
  }
  SUBCASE("wholesale change from margins") {
    auto s = series_of({200, 300, 300});
    s[0].margin_pct = 25;
    s[1].margin_pct = 50;
    const auto ev = detect_price_changes(1, 2, s, DetectMode::survived_2w);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].abs_wholesale_change == doctest::Approx(0.0));
  }
}

TEST_CASE("filters only ever remove events") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<SeriesRow> s;
    Cents price = 150 + static_cast<Cents>(rng() % 200);
    int week = 0;
    for (int i = 0; i < 40; ++i) {
      week += (rng() % 10 == 0) ? 2 : 1;
      if (rng() % 4 == 0) price = std::max<Cents>(10, price + static_cast<Cents>(rng() % 41) - 20);
      SeriesRow r{week, price, static_cast<std::int64_t>(rng() % 9)};
      if (rng() % 15 == 0) r.flag = SaleFlag::coupon;
      s.push_back(r);
    }
    auto key = [](const PriceChangeEvent& e) { return e.week; };
    auto weeks = [&](const std::vector<PriceChangeEvent>& ev) {
      std::set<int> out;
      for (const auto& e : ev) out.insert(key(e));
      return out;
    };
    const auto all = weeks(detect_price_changes(1, 1, s, DetectMode::all_adjacent));
    const auto surv = weeks(detect_price_changes(1, 1, s, DetectMode::survived_2w));
    CHECK(std::includes(all.begin(), all.end(), surv.begin(), surv.end()));
    ChangeFilters f;
    std::set<int> prev = surv;
    for (int step = 0; step < 3; ++step) {
      if (step == 0) f.exclude_leq_2c = true;
      if (step == 1) f.exclude_coupon_adjacent = true;
      if (step == 2) f.exclude_sale_bounceback = true;
      const auto now = weeks(detect_price_changes(1, 1, s, DetectMode::survived_2w, f));
      CHECK(std::includes(prev.begin(), prev.end(), now.begin(), now.end()));
      prev = now;
    }
  }
}

TEST_CASE("small-change rules are inclusive") {
  ProductStoreStats stats;
  CHECK(classify_small(event_with(199, 189), SmallChangeRule::abs_cents(10), stats));
  CHECK_FALSE(classify_small(event_with(199, 188), SmallChangeRule::abs_cents(10), stats));
  CHECK(classify_small(event_with(200, 204), SmallChangeRule::pct(2), stats));
  CHECK_FALSE(classify_small(event_with(200, 205), SmallChangeRule::pct(2), stats));
  CHECK(classify_small(event_with(200, 196), SmallChangeRule::pct(2), stats));
  stats.mean_abs_change = 30;
  CHECK(classify_small(event_with(100, 115), SmallChangeRule::relative(0.5), stats));
  CHECK_FALSE(classify_small(event_with(100, 116), SmallChangeRule::relative(0.5), stats));
  stats.mean_abs_change = 0;
  CHECK_THROWS(classify_small(event_with(100, 116), SmallChangeRule::relative(0.5), stats));

  CHECK(SmallChangeRule::parse("abs:10").kind == SmallChangeRule::Kind::abs_cents);
  CHECK(SmallChangeRule::parse("pct:2").threshold == 2.0);
  CHECK(SmallChangeRule::parse("kappa:0.33").kind == SmallChangeRule::Kind::relative_kappa);
  CHECK_THROWS(SmallChangeRule::parse("kappa:1.5"));
  CHECK_THROWS(SmallChangeRule::parse("abs:0"));
  CHECK_THROWS(SmallChangeRule::parse("abs10"));
  CHECK_THROWS(SmallChangeRule::parse("foo:3"));
}

TEST_CASE("classification brute-force recheck") {
  std::mt19937_64 rng(5);
  ProductStoreStats stats;
  stats.mean_abs_change = 23;
  for (int i = 0; i < 10000; ++i) {
    const Cents pre = 50 + static_cast<Cents>(rng() % 1000);
    Cents delta = static_cast<Cents>(rng() % 61) - 30;
    if (delta == 0) delta = 1;
    const auto e = event_with(pre, pre + delta);
    const bool abs10 = classify_small(e, SmallChangeRule::abs_cents(10), stats);
    REQUIRE(abs10 == (std::abs(delta) <= 10));
    const bool pct2 = classify_small(e, SmallChangeRule::pct(2), stats);
    REQUIRE(pct2 == (std::abs(delta) * 50 <= pre));
    const bool rel = classify_small(e, SmallChangeRule::relative(0.5), stats);
    REQUIRE(rel == (std::abs(delta) * 2 <= 23));
  }
}

TEST_CASE("sale filter") {
  const std::vector<Cents> v{199, 149, 199};
  const auto r = sales_filter(v, {5.0, 0, 8});
  CHECK(r.flags == std::vector<WeekFlag>{WeekFlag::regular, WeekFlag::sale, WeekFlag::bounce_back});
  CHECK(r.regular_price == std::vector<Cents>{199, 199, 199});

  const std::vector<Cents> mono{199, 189, 179};
  const auto m = sales_filter(mono);
  CHECK(m.flags == std::vector<WeekFlag>(3, WeekFlag::regular));

  const std::vector<Cents> flat(6, 250);
  CHECK(sales_filter(flat).flags == std::vector<WeekFlag>(6, WeekFlag::regular));

  // the return must come within the window
  std::vector<Cents> late{200, 150, 150, 150, 200};
  CHECK(sales_filter(late, {5.0, 0, 2}).flags[1] == WeekFlag::regular);
  CHECK(sales_filter(late, {5.0, 0, 3}).flags[1] == WeekFlag::sale);

  // a shallow dip is not a sale
  std::vector<Cents> shallow{200, 195, 200};
  CHECK(sales_filter(shallow).flags[1] == WeekFlag::regular);
}

TEST_CASE("sale filter is idempotent on its regular-price output") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Cents> prices;
    Cents regular = 150 + static_cast<Cents>(rng() % 200);
    for (int i = 0; i < 60; ++i) {
      const auto roll = rng() % 20;
      if (roll == 0) regular += static_cast<Cents>(rng() % 31) - 15;
      if (roll == 1) {
        prices.push_back(regular * (70 + static_cast<Cents>(rng() % 20)) / 100);
        continue;
      }
      prices.push_back(regular);
    }
    const auto first = sales_filter(prices);
    const auto second = sales_filter(first.regular_price);
    for (auto f : second.flags) REQUIRE(f == WeekFlag::regular);
  }
}

TEST_CASE("nine-ending") {
  CHECK(nine_ending(199));
  CHECK_FALSE(nine_ending(200));
  CHECK(nine_ending(1099));
}

TEST_CASE("decile table") {
  std::vector<ProductStoreStats> stats;
  for (int v = 20; v >= 1; --v) {
    ProductStoreStats s;
    s.store = 1;
    s.upc = v;
    s.avg_volume = v;
    s.n_changes = 2;
    s.n_small = v > 10 ? 2 : 0;
    stats.push_back(s);
  }
  const auto rows = decile_table(stats);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0].min_volume == 1);
  CHECK(rows[0].max_volume == 2);
  CHECK(rows[9].min_volume == 19);
  CHECK(rows[9].max_volume == 20);
  CHECK(rows[0].share_small == 0.0);
  CHECK(rows[9].share_small == 1.0);
  std::vector<ProductStoreStats> few(stats.begin(), stats.begin() + 9);
  CHECK_THROWS(decile_table(few));
}

TEST_CASE("deciles partition the product-stores") {
  std::mt19937_64 rng(23);
  for (int n = 10; n < 140; n += 7) {
    std::vector<ProductStoreStats> stats;
    for (int i = 0; i < n; ++i) {
      ProductStoreStats s;
      s.store = i % 5;
      s.upc = i;
      s.avg_volume = static_cast<double>(rng() % 7);  // plenty of ties
      s.n_changes = 1;
      stats.push_back(s);
    }
    const auto rows = decile_table(stats);
    std::int64_t total = 0, lo = n, hi = 0;
    for (const auto& r : rows) {
      total += r.n_groups;
      lo = std::min(lo, r.n_groups);
      hi = std::max(hi, r.n_groups);
    }
    CHECK(total == n);
    CHECK(hi - lo <= 1);
    for (std::size_t d = 1; d < rows.size(); ++d) CHECK(rows[d].min_volume >= rows[d - 1].max_volume);
  }
}

TEST_CASE("event-weighted deciles") {
  std::vector<ProductStoreStats> stats;
  std::vector<PriceChangeEvent> events;
  std::vector<std::uint8_t> small;
  for (int v = 1; v <= 10; ++v) {
    ProductStoreStats s;
    s.store = 1;
    s.upc = v;
    s.avg_volume = v;
    stats.push_back(s);
    PriceChangeEvent e;
    e.store = 1;
    e.upc = v;
    events.push_back(e);
    small.push_back(v > 5 ? 1 : 0);
  }
  const auto rows = decile_table(stats, DecileWeighting::event, events, small);
  for (const auto& r : rows) CHECK(r.n_changes == 1);
  CHECK(rows[9].share_small == 1.0);
  CHECK(rows[0].share_small == 0.0);
}

TEST_CASE("size histogram") {
  std::vector<ProductStoreStats> stats;
  std::vector<PriceChangeEvent> events;
  for (int i = 0; i < 9; ++i) {
    ProductStoreStats s;
    s.store = 1;
    s.upc = i;
    s.avg_volume = i;
    stats.push_back(s);
    auto e = event_with(100, 110);
    e.store = 1;
    e.upc = i;
    events.push_back(e);
  }
  const auto rows = size_histogram(events, stats, SizeBins::cents);
  CHECK(rows.size() == 150);
  for (const auto& r : rows) CHECK(r.frequency == (r.bin == 10 ? 1.0 : 0.0));
  const auto pct = size_histogram(events, stats, SizeBins::percent);
  CHECK(pct.size() == 90);
  for (const auto& r : pct) CHECK(r.frequency == (r.bin == 10 ? 1.0 : 0.0));

  SizeHistogram empty(SizeBins::cents);
  for (const auto& r : empty.rows()) {
    CHECK(r.count == 0);
    CHECK(r.frequency == 0.0);
  }
}

TEST_CASE("synchronization excludes the event itself") {
  // four products in category 7 at store 1; three change at week 2
  std::vector<PanelObservation> panel;
  const Cents before[4] = {100, 100, 100, 100};
  const Cents after[4] = {110, 120, 60, 100};
  for (int u = 0; u < 4; ++u) {
    panel.push_back(obs(1, u, 1, before[u], 7, u < 2 ? 1 : 2));
    panel.push_back(obs(1, u, 2, after[u], 7, u < 2 ? 1 : 2));
  }
  std::sort(panel.begin(), panel.end(), key_less);
  const auto events = detect_price_changes(panel, DetectMode::all_adjacent);
  REQUIRE(events.size() == 3);
  const auto f = synchronization_features(events, panel, SyncLevel::category);
  // event for upc 0 (+10): others are upc 1 (+20), upc 2 (-40), upc 3 (none)
  CHECK(f[0].share_others_changing.value() == doctest::Approx(2.0 / 3));
  CHECK(f[0].mean_abs_others.value() == doctest::Approx(30.0));
  CHECK(f[0].share_same_producer_changing.value() == doctest::Approx(1.0));
  // upc 2's producer peer (upc 3) did not change
  CHECK(f[2].share_same_producer_changing.value() == doctest::Approx(0.0));

  const auto by_producer = synchronization_features(events, panel, SyncLevel::producer);
  CHECK(by_producer[0].share_others_changing.value() == doctest::Approx(1.0));
  CHECK(by_producer[0].mean_abs_others.value() == doctest::Approx(20.0));

  std::vector<PanelObservation> lone{obs(1, 9, 1, 100, 3), obs(1, 9, 2, 110, 3)};
  const auto lone_events = detect_price_changes(lone, DetectMode::all_adjacent);
  const auto lf = synchronization_features(lone_events, lone, SyncLevel::category);
  REQUIRE(lf.size() == 1);
  CHECK_FALSE(lf[0].share_others_changing.has_value());
  CHECK_FALSE(lf[0].mean_abs_others.has_value());
}

TEST_CASE("sync index for a product without its own posted change") {
  SyncIndex idx;
  for (int u = 0; u < 3; ++u) idx.add_presence(1, 5, 2, 0);
  idx.add_change(1, 5, 2, 0, 20);
  const auto f = idx.features(1, 5, 2, 0, 0, SyncLevel::category, false);
  CHECK(f.share_others_changing.value() == doctest::Approx(0.5));
  CHECK(f.mean_abs_others.value() == doctest::Approx(20.0));
}

TEST_CASE("producer size") {
  std::vector<PanelObservation> panel;
  for (int w = 1; w <= 4; ++w)
    for (int u = 0; u < 3; ++u) panel.push_back(obs(1, u, w, 100, 0, 5));
  auto rows = producer_size(panel);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].avg_products == 3.0);

  ProducerSizeAccumulator acc;
  for (int w = 1; w <= 2; ++w) {
    acc.add(6, 0, 10, w);
    acc.add(6, 0, 11, w);
  }
  const auto partial = acc.finish(1, 4);
  REQUIRE(partial.size() == 1);
  CHECK(partial[0].avg_products == 1.0);

  ProducerSizeAccumulator eight;
  for (int p = 0; p < 8; ++p)
    for (int u = 0; u <= p; ++u) eight.add(p, 0, 100 * p + u, 1);
  const auto q = eight.finish();
  std::map<int, int> per_quartile;
  for (const auto& r : q) ++per_quartile[r.quartile];
  CHECK(per_quartile == std::map<int, int>{{1, 2}, {2, 2}, {3, 2}, {4, 2}});
  for (const auto& r : q) CHECK(r.quartile == static_cast<int>(r.producer / 2) + 1);
}

TEST_CASE("peak weeks") {
  CHECK(peak_weeks({{1, 10}, {2, 5}, {3, 3}, {4, 2}}) == std::vector<int>{1});
  CHECK(peak_weeks({{1, 1}, {2, 1}, {3, 1}, {4, 1}}) == std::vector<int>{1, 2});
  CHECK(peak_weeks({{9, 4}}) == std::vector<int>{9});
  CHECK(peak_weeks({{1, 2}, {2, 5}, {3, 5}}) == std::vector<int>{2, 3});
}

TEST_CASE("peak-week sets are minimal") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 500; ++trial) {
    std::map<int, std::int64_t> counts;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int w = 0; w < n; ++w) counts[w] = 1 + static_cast<std::int64_t>(rng() % 12);
    std::int64_t total = 0;
    for (const auto& [w, c] : counts) total += c;
    const auto peak = peak_weeks(counts);
    std::int64_t cum = 0, lowest = total;
    for (int w : peak) {
      cum += counts[w];
      lowest = std::min(lowest, counts[w]);
    }
    CHECK(2 * cum >= total);
    CHECK(2 * (cum - lowest) < total);
  }
}

TEST_CASE("category summary and correlation") {
  const std::vector<double> a{1, 2, 3, 4};
  CHECK(pearson(a, a).value() == doctest::Approx(1.0));
  const std::vector<double> v{2, 4}, r{4, 2};
  CHECK(pearson(v, r).value() == doctest::Approx(-1.0));
  const std::vector<double> flat{1, 1, 1};
  CHECK_FALSE(pearson(flat, flat).has_value());

  std::vector<ProductStoreStats> stats;
  for (int i = 0; i < 4; ++i) {
    ProductStoreStats s;
    s.store = i % 2;
    s.upc = i / 2;
    s.category = 3;
    s.avg_volume = 1 + i;
    s.avg_revenue = 100 * (1 + i);
    s.avg_price = 100;
    s.n_changes = 4;
    s.n_small = i;
    stats.push_back(s);
  }
  const auto rows = category_summary(stats);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n_changes == 16);
  CHECK(rows[0].n_small == 6);
  CHECK(rows[0].share_small == doctest::Approx(6.0 / 16));
  CHECK(rows[0].n_upcs == 2);
  CHECK(rows[0].avg_volume == doctest::Approx(2.5));
  CHECK(rows[0].corr_volume_revenue.value() == doctest::Approx(1.0));
  CHECK(rows[0].corr_ln_volume_revenue.value() == doctest::Approx(1.0));
}

TEST_CASE("series statistics") {
  std::vector<SeriesRow> s{{1, 100, 4}, {3, 200, 2}};
  const auto st = series_stats(1, 2, s);
  CHECK(st.avg_volume == 3.0);
  CHECK(st.avg_price == 150.0);
  CHECK(st.avg_revenue == doctest::Approx((400.0 + 400.0) / 2));
  CHECK(st.n_weeks == 2);
  CHECK(st.first_week == 1);
  CHECK(st.last_week == 3);
  CHECK(st.avg_volume_52w.value() == 3.0);
}

// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "menucost/band_sim.hpp"
#include "menucost/fe.hpp"
#include "menucost/io.hpp"
#include "menucost/model.hpp"
#include "menucost/price_stats.hpp"
#include "menucost/regression.hpp"
#include "oracles.hpp"
#include "random_panel.hpp"
#include "run_cli.hpp"
#include "synth_pipeline.hpp"
#include "temp_dir.hpp"

using namespace menucost;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << "failed: " << what;
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ModelParams<double> reference() {
  ModelParams<double> p;
  p.alpha = 10;
  p.beta = 1;
  p.a = 1;
  p.b = 1;
  p.c = 0.5;
  p.gamma = 1;
  p.sigma = 1;
  return p;
}

// Same sample for criteria 1 to 3.
std::vector<std::pair<ModelParams<double>, std::vector<double>>> economy_sample() {
  std::mt19937_64 rng(20240601);
  std::vector<std::pair<ModelParams<double>, std::vector<double>>> out;
  for (int e = 0; e < 200; ++e) {
    const auto p = oracle::random_economy(rng);
    std::uniform_real_distribution<double> ud(p.u_lower(), p.u_upper());
    std::vector<double> us;
    for (int j = 0; j < 10; ++j) us.push_back(ud(rng));
    out.emplace_back(p, us);
  }
  return out;
}

void criterion1(Outcome& o) {
  const auto t0 = Clock::now();
  double worst_price = 0, worst_output = 0;
  for (const auto& [p, us] : economy_sample()) {
    for (double u : us) {
      auto f = [&](double price) { return oracle::profit(p, price, u); };
      const double num = oracle::argmax(f, 0.0, oracle::max_price(p, u));
      const double closed = optimal_price(p, u);
      worst_price = std::max(worst_price, std::abs(num - closed) / (1 + std::abs(closed)));
      const double y_num = p.alpha - p.beta * num + u;
      const double y_closed = optimal_output(p, u);
      worst_output = std::max(worst_output, std::abs(y_num - y_closed) / (1 + std::abs(y_closed)));
    }
  }
  const double secs = seconds_since(t0);
  o.require(worst_price <= 1e-6, "price gap");
  o.require(worst_output <= 1e-6, "output gap");
  o.require(secs < 10, "runtime");
  o.detail << (o.pass ? "" : "; ") << "2000 draws, max rel gap price " << worst_price << ", output " << worst_output
           << ", " << secs << " s";
}

void criterion2(Outcome& o) {
  double worst = 0;
  for (const auto& [p, us] : economy_sample()) {
    const double th = theta(p);
    for (double u : us) {
      const double gap = profit_gain_flexible(p, u) - profit_gain_sticky(p, u) - th * u * u;
      worst = std::max(worst, std::abs(gap) / (1 + th * u * u));
    }
  }
  o.require(worst <= 1e-10, "identity residual");
  o.detail << (o.pass ? "" : "; ") << "max scaled residual " << worst;
}

void criterion3(Outcome& o) {
  double worst = 0;
  int sign_failures = 0;
  for (const auto& [p, us] : economy_sample()) {
    const auto cs = comparative_statics(p);
    const double h = 1e-5 * std::max(1.0, std::abs(p.beta));
    auto rel = [](double fd, double closed) { return std::abs(fd - closed) / std::abs(closed); };
    const double fd_theta = oracle::central_difference([&](double b) { return theta(p.with_beta(b)); }, p.beta, h);
    const double fd_y =
        oracle::central_difference([&](double b) { return disturbance_free_output(p.with_beta(b)); }, p.beta, h);
    const double fd_h =
        oracle::central_difference([&](double b) { return band_halfwidth(p.with_beta(b)); }, p.beta, h);
    const double t0 = theta(p);
    const double fd_ht = oracle::central_difference(
        [&](double t) { return std::sqrt(p.sigma) * std::pow(6 * p.gamma / t, 0.25); }, t0,
        1e-5 * std::max(1.0, t0));
    worst = std::max({worst, rel(fd_theta, cs.dtheta_dbeta), rel(fd_y, cs.dY_dbeta), rel(fd_h, cs.dh_dbeta),
                      rel(fd_ht, cs.dh_dtheta)});
    if (!(cs.dtheta_dbeta < 0 && cs.dh_dtheta < 0 && cs.dY_dbeta < 0 && cs.dh_dbeta > 0)) ++sign_failures;
  }
  const double spot = comparative_statics(reference()).dtheta_dbeta;
  o.require(worst <= 1e-4, "finite-difference agreement");
  o.require(sign_failures == 0, "signs");
  o.require(std::abs(spot + 2.0 / 9) <= 1e-12, "spot value");
  o.detail << (o.pass ? "" : "; ") << "max rel FD gap " << worst << ", sign failures " << sign_failures
           << ", dtheta/dbeta at reference " << spot;
}

void criterion4(Outcome& o) {
  const auto t0 = Clock::now();
  auto p = reference();
  p.sigma = 0.05;
  const double h_hat = band_halfwidth(p);
  const auto grid = auto_grid(p, 21, 0.2, 3.0);
  const auto s = optimize_band_numeric(p, grid, 1000000, 4242, 1);
  const double secs = seconds_since(t0);
  const double off = std::abs(s.best_halfwidth - h_hat) / h_hat;
  o.require(std::abs(theta(p) - 2.0 / 3) < 1e-12, "theta");
  o.require(off <= 0.2, "argmin distance");
  o.require(secs < 60, "runtime");
  o.detail << (o.pass ? "" : "; ") << "h_hat " << h_hat << ", argmin " << s.best_halfwidth << " ("
           << 100 * off << "% off), " << secs << " s";
}

void criterion5(Outcome& o) {
  auto p = reference();
  std::ostringstream parts;
  for (int k : {1, 2, 3, 5}) {
    const auto r = simulate_band(p, {static_cast<double>(k), 1.0}, 1000000, 500 + static_cast<std::uint64_t>(k));
    const double target = expected_hitting_time(k, HittingMethod::enumerate);
    const double dev = std::abs(r.mean_interval - target);
    o.require(dev <= 3 * r.interval_se, "k=" + std::to_string(k));
    parts << " k=" << k << ": " << r.mean_interval << " vs " << target << " (se " << r.interval_se << ")";
  }
  o.detail << (o.pass ? "" : ";") << parts.str();
}

int inversions(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t i = 1; i < v.size(); ++i) n += v[i] < v[i - 1] ? 1 : 0;
  return n;
}

void criterion6(Outcome& o) {
  auto base = reference();
  base.sigma = 0.05;
  // Rows ordered from high to low beta, so output rises down the table.
  const std::vector<double> betas{4.0, 3.0, 2.0, 1.5, 1.0, 0.6, 0.3, 0.1};
  const double threshold = 0.4;
  const auto rows = beta_sweep_experiment(base, betas, 1000000, 77, threshold, SizeUnit::shock, 1);
  std::vector<double> output, h, rate, share;
  for (const auto& r : rows) {
    output.push_back(r.output);
    h.push_back(r.h_hat);
    rate.push_back(r.adjustment_rate);
    share.push_back(r.share_small);
  }
  bool output_up = true, h_down = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    output_up = output_up && output[i] > output[i - 1];
    h_down = h_down && h[i] < h[i - 1];
  }
  o.require(output_up, "output strictly increasing");
  o.require(h_down, "h_hat strictly decreasing");
  o.require(inversions(rate) <= 1, "adjustment rate");
  o.require(inversions(share) <= 1, "share small");
  o.detail << (o.pass ? "" : "; ") << "shock units, threshold " << threshold << ": rate inversions "
           << inversions(rate) << ", share inversions " << inversions(share) << "; rates";
  for (double r : rate) o.detail << ' ' << r;
  o.detail << "; share";
  for (double s : share) o.detail << ' ' << s;

  // Reported only: the same sweep measured in price units.
  const auto price_rows = beta_sweep_experiment(base, betas, 1000000, 77, 0.2, SizeUnit::price, 1);
  std::vector<double> price_share, price_size;
  for (const auto& r : price_rows) {
    price_share.push_back(r.share_small);
    price_size.push_back(r.mean_abs_change);
  }
  std::cout << "info: criterion 6 in price units (threshold 0.2): mean |dP|";
  for (double s : price_size) std::cout << ' ' << s;
  std::cout << "; share small";
  for (double s : price_share) std::cout << ' ' << s;
  std::cout << "; inversions " << inversions(price_share) << '\n';
}

void criterion7(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(777);
  double worst_coef = 0, worst_se = 0;
  int dropped = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = oracle::random_panel(rng);
    const auto r = run_spec(p.data, p.spec);
    if (!r.dropped_terms.empty()) {
      ++dropped;
      continue;
    }
    const auto b = oracle::dummy_ols(p.x, p.dummies, p.y);
    const auto v = oracle::dense_cluster_vcov(p.x, p.dummies, p.y, p.clusters, p.n_clusters);
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      worst_coef = std::max(worst_coef, std::abs(r.coef(j) - b(j)));
      worst_se = std::max(worst_se, std::abs(r.se(j) - std::sqrt(v(j, j))) / std::sqrt(v(j, j)));
    }
  }
  const double secs = seconds_since(t0);
  o.require(dropped == 0, "unexpected dropped terms");
  o.require(worst_coef <= 1e-8, "coefficients");
  o.require(worst_se <= 1e-8, "standard errors");
  o.require(secs < 30, "runtime");
  o.detail << (o.pass ? "" : "; ") << "100 panels, max |coef gap| " << worst_coef << ", max rel SE gap " << worst_se
           << ", " << secs << " s";
}

void criterion8(Outcome& o) {
  const auto t0 = Clock::now();
  testing_util::TempDir dir("menucost-accept8");
  const SynthConfig cfg;
  const auto run = testing_util::synth_and_analyze(cfg, dir.path());
  const auto [b_base, t_base] = testing_util::preset_term(run.analysis, "baseline", "ln(avg_volume)");
  const auto [b_reg, t_reg] = testing_util::preset_term(run.analysis, "regular_only", "ln(avg_volume)");
  const auto deciles = io::read_dataset(run.analysis / "deciles.csv");
  const auto& share = deciles.column("share_small");
  int increasing = 0;
  for (std::size_t i = 1; i < share.size(); ++i) increasing += share[i] >= share[i - 1] ? 1 : 0;
  const double secs = seconds_since(t0);
  o.require(b_base > 0 && t_base > 2, "baseline");
  o.require(b_reg > 0 && t_reg > 2, "regular_only");
  o.require(share.size() == 10 && increasing >= 8, "decile shape");
  o.require(secs < 300, "runtime");
  o.detail << (o.pass ? "" : "; ") << run.summary.rows << " rows, " << run.summary.events << " events ("
           << 100.0 * static_cast<double>(run.summary.small) / static_cast<double>(run.summary.events)
           << "% small); baseline " << b_base << " (t " << t_base << "), regular_only " << b_reg << " (t " << t_reg
           << "); deciles";
  for (double s : share) o.detail << ' ' << s;
  o.detail << " (" << increasing << "/9 pairs); " << secs << " s";
}

void criterion9(Outcome& o) {
  int checks = 0;
  auto expect = [&](bool ok, const std::string& what) {
    ++checks;
    o.require(ok, what);
  };
  auto series = [](std::vector<Cents> prices) {
    std::vector<SeriesRow> s;
    for (std::size_t i = 0; i < prices.size(); ++i) s.push_back({1 + static_cast<int>(i), prices[i], 1});
    return s;
  };
  auto event = [](Cents pre, Cents post) {
    PriceChangeEvent e;
    e.pre_price = pre;
    e.post_price = post;
    e.delta_cents = post - pre;
    return e;
  };

  // volume averaging
  const std::vector<WeekUnits> gap{{1, 5}, {3, 7}}, single{{4, 10}}, contiguous{{1, 2}, {2, 2}, {3, 2}};
  expect(average_sales_volume(gap) == 6.0, "volume {1:5,3:7}");
  expect(average_sales_volume(single) == 10.0, "volume single week");
  expect(average_sales_volume(contiguous) == 3.0, "volume contiguous");
  expect(rolling_volume(gap, 4, 52) == 6.0, "rolling window");
  expect(!rolling_volume(gap, 1, 52).has_value(), "empty rolling window");
  expect(rolling_volume(gap, 100, 1000) == average_sales_volume(gap), "rolling full series");

  // detection and filters
  const auto ev = detect_price_changes(1, 1, series({199, 199, 189, 189}), DetectMode::survived_2w);
  expect(ev.size() == 1 && ev[0].week == 3 && ev[0].delta_cents == -10 && ev[0].survived_two_weeks,
         "survived change");
  ChangeFilters leq2;
  leq2.exclude_leq_2c = true;
  expect(detect_price_changes(1, 1, series({199, 197, 199}), DetectMode::all_adjacent, leq2).empty(), "2c filter");
  std::vector<SeriesRow> holed{{1, 199, 1}, {3, 199, 1}};
  expect(detect_price_changes(1, 1, holed, DetectMode::all_adjacent).empty(), "missing week");
  auto coupon = series({199, 189, 189});
  coupon[0].flag = SaleFlag::coupon;
  ChangeFilters cf;
  cf.exclude_coupon_adjacent = true;
  expect(detect_price_changes(1, 1, coupon, DetectMode::survived_2w, cf).empty(), "coupon at t-1");
  coupon[0].flag = SaleFlag::none;
  coupon[1].flag = SaleFlag::coupon;
  expect(detect_price_changes(1, 1, coupon, DetectMode::survived_2w, cf).empty(), "coupon at t");
  expect(detect_price_changes(1, 1, coupon, DetectMode::survived_2w).size() == 1, "coupon kept without filter");

  // small-change rules
  ProductStoreStats st;
  expect(classify_small(event(199, 189), SmallChangeRule::abs_cents(10), st), "10c inclusive");
  expect(!classify_small(event(199, 188), SmallChangeRule::abs_cents(10), st), "11c not small");
  expect(classify_small(event(200, 204), SmallChangeRule::pct(2), st), "2% inclusive");
  expect(!classify_small(event(200, 205), SmallChangeRule::pct(2), st), "2.5% not small");
  st.mean_abs_change = 30;
  expect(classify_small(event(100, 115), SmallChangeRule::relative(0.5), st), "kappa 15c");
  expect(!classify_small(event(100, 116), SmallChangeRule::relative(0.5), st), "kappa 16c");

  // sales filter
  const std::vector<Cents> v{199, 149, 199}, mono{199, 189, 179}, flat{150, 150, 150};
  expect(sales_filter(v).flags == std::vector<WeekFlag>{WeekFlag::regular, WeekFlag::sale, WeekFlag::bounce_back},
         "V-shaped sale");
  expect(sales_filter(mono).flags == std::vector<WeekFlag>(3, WeekFlag::regular), "monotone series");
  expect(sales_filter(flat).flags == std::vector<WeekFlag>(3, WeekFlag::regular), "flat series");

  // 9-ending
  expect(nine_ending(199) && !nine_ending(200) && nine_ending(1099), "nine-ending");

  // deciles
  std::vector<ProductStoreStats> stats;
  for (int i = 1; i <= 20; ++i) {
    ProductStoreStats s;
    s.upc = i;
    s.avg_volume = i;
    stats.push_back(s);
  }
  const auto dec = decile_table(stats);
  expect(dec[0].min_volume == 1 && dec[0].max_volume == 2 && dec[9].min_volume == 19 && dec[9].max_volume == 20,
         "decile ranks");
  bool threw = false;
  try {
    decile_table(std::span<const ProductStoreStats>(stats.data(), 9));
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  expect(threw, "fewer than 10 groups");

  // histogram
  {
    SizeHistogram hist(SizeBins::cents);
    for (int i = 0; i < 5; ++i) hist.add(event(100, 110), 0);
    bool mass_at_10 = true;
    for (const auto& r : hist.rows())
      if (r.volume_group == "low") mass_at_10 = mass_at_10 && r.frequency == (r.bin == 10 ? 1.0 : 0.0);
      else mass_at_10 = mass_at_10 && r.frequency == 0.0;
    expect(mass_at_10, "histogram mass and empty groups");
  }

  // synchronization
  {
    std::vector<PanelObservation> panel;
    const Cents after[4] = {110, 120, 60, 100};
    for (int u = 0; u < 4; ++u)
      for (int w = 1; w <= 2; ++w) {
        PanelObservation ob;
        ob.store = 1;
        ob.upc = u;
        ob.week = w;
        ob.price = w == 1 ? 100 : after[u];
        ob.category = 5;
        ob.producer = 9;
        panel.push_back(ob);
      }
    const auto events = detect_price_changes(panel, DetectMode::all_adjacent);
    const auto f = synchronization_features(events, panel, SyncLevel::category);
    expect(f.size() == 3 && f[0].share_others_changing == 2.0 / 3, "share of others excludes self");
    expect(f.size() == 3 && f[0].mean_abs_others == 30.0, "mean |change| of others");
    std::vector<PanelObservation> lone(panel.begin(), panel.begin() + 2);
    const auto le = detect_price_changes(lone, DetectMode::all_adjacent);
    const auto lf = synchronization_features(le, lone, SyncLevel::category);
    expect(lf.size() == 1 && !lf[0].share_others_changing.has_value(), "single-product category");
  }

  // producer size
  {
    ProducerSizeAccumulator three, partial, eight;
    for (int w = 1; w <= 4; ++w)
      for (int u = 0; u < 3; ++u) three.add(1, 0, u, w);
    expect(three.finish()[0].avg_products == 3.0, "producer with 3 products");
    for (int w = 1; w <= 2; ++w)
      for (int u = 0; u < 2; ++u) partial.add(1, 0, u, w);
    expect(partial.finish(1, 4)[0].avg_products == 1.0, "counts [2,2,0,0]");
    for (int p = 0; p < 8; ++p)
      for (int u = 0; u <= p; ++u) eight.add(p, 0, 100 * p + u, 1);
    std::map<int, int> q;
    for (const auto& r : eight.finish()) ++q[r.quartile];
    expect(q == std::map<int, int>{{1, 2}, {2, 2}, {3, 2}, {4, 2}}, "8 producers in quartiles");
  }

  // peak weeks and minimality
  expect(peak_weeks({{1, 10}, {2, 5}, {3, 3}, {4, 2}}) == std::vector<int>{1}, "peak [10,5,3,2]");
  expect(peak_weeks({{1, 1}, {2, 1}, {3, 1}, {4, 1}}) == std::vector<int>{1, 2}, "peak ties");
  expect(peak_weeks({{7, 3}}) == std::vector<int>{7}, "single week");
  {
    std::mt19937_64 rng(9);
    bool minimal = true;
    for (int t = 0; t < 1000; ++t) {
      std::map<int, std::int64_t> counts;
      const int n = 1 + static_cast<int>(rng() % 25);
      std::int64_t total = 0;
      for (int w = 0; w < n; ++w) total += counts[w] = 1 + static_cast<std::int64_t>(rng() % 9);
      std::int64_t cum = 0, lowest = total;
      for (int w : peak_weeks(counts)) {
        cum += counts[w];
        lowest = std::min(lowest, counts[w]);
      }
      minimal = minimal && 2 * cum >= total && 2 * (cum - lowest) < total;
    }
    expect(minimal, "peak-week minimality");
  }

  // category summary
  {
    const std::vector<double> a{2, 4}, b{4, 2};
    expect(pearson(a, a) == 1.0 && std::abs(*pearson(a, b) + 1.0) < 1e-15, "correlation examples");
  }
  // movement parsing
  {
    const auto row = io::parse_movement_line("1,12345,10,1.99,5,1,,25.0", 2);
    expect(row.price == 199 && row.units == 5, "movement line parse");
  }

  // within estimation
  {
    fe::Matrix m(4, 1);
    m << 1, 2, 3, 5;
    const std::vector<double> groups{0, 0, 1, 1};
    fe::absorb_fe(m, {fe::make_fe_index("g", groups)});
    expect(std::abs(m(0, 0) + 0.5) < 1e-15 && std::abs(m(1, 0) - 0.5) < 1e-15 && std::abs(m(2, 0) + 1) < 1e-15 &&
               std::abs(m(3, 0) - 1) < 1e-15,
           "one-way demeaning");
    Dataset d(4);
    d.add_column("y", {1, 2, 3, 5});
    d.add_column("x", {0, 1, 0, 1});
    d.add_column("g", {0, 0, 1, 1});
    RegressionSpec spec;
    spec.dependent = "y";
    spec.regressors = {Term::parse("x")};
    spec.fixed_effects = {"g"};
    spec.se_kind = fe::SeKind::hc1;
    expect(std::abs(run_spec(d, spec).coef(0) - 1.5) < 1e-12, "within slope 1.5");
    d.add_column("y2", {0, 2, 0, 2});
    spec.dependent = "y2";
    const auto exact = run_spec(d, spec);
    expect(std::abs(exact.coef(0) - 2.0) < 1e-12 && exact.se(0) == 0.0, "zero residuals give zero SE");
  }
  o.detail << (o.pass ? "" : "; ") << checks << " procedure checks";
}

void criterion10(Outcome& o) {
  const auto t0 = Clock::now();
  testing_util::TempDir dir("menucost-accept10");
  testing_util::write_file(dir / "big.txt", "n_stores = 100\nn_products = 450\nn_weeks = 300\nseed = 10\n");
  const auto gen = testing_util::run_cli({"synth", "--config", (dir / "big.txt").string(), "--out",
                                          (dir / "data").string()},
                                         dir.path());
  if (gen.exit_code != 0) {
    o.require(false, "synth: " + gen.err);
    return;
  }
  std::int64_t rows = 0;
  {
    std::ifstream in(dir / "data" / "movement.csv");
    std::string line;
    while (std::getline(in, line)) ++rows;
    --rows;  // header
  }
  const auto size_mb = static_cast<double>(std::filesystem::file_size(dir / "data" / "movement.csv")) / (1 << 20);
  const long budget_kb = 256 * 1024;
  const auto an = testing_util::run_cli(
      {"analyze", "--input", (dir / "data" / "movement.csv").string(), "--meta", (dir / "data" / "meta.csv").string(),
       "--stores", (dir / "data" / "stores.csv").string(), "--out", (dir / "out").string(), "--tmp",
       dir.path().string()},
      dir.path());
  o.require(an.exit_code == 0, "analyze exit " + std::to_string(an.exit_code) + " " + an.err);
  o.require(rows >= 10000000, "row count");
  o.require(an.max_rss_kb <= budget_kb, "memory budget");
  o.require(an.seconds < 600, "runtime");
  o.detail << (o.pass ? "" : "; ") << rows << " rows (" << static_cast<long>(size_mb) << " MB), analyze peak RSS "
           << an.max_rss_kb / 1024 << " MB of " << budget_kb / 1024 << " MB budget, " << an.seconds << " s (total "
           << seconds_since(t0) << " s)";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"closed-form optimum vs numeric maximization", criterion1},
      {"loss identity", criterion2},
      {"comparative statics vs finite differences", criterion3},
      {"simulated band optimum near closed form", criterion4},
      {"first-passage times", criterion5},
      {"beta sweep mechanism", criterion6},
      {"fixed-effects oracle", criterion7},
      {"synthetic end-to-end sign and decile shape", criterion8},
      {"procedure unit suite", criterion9},
      {"streaming scale check", criterion10},
  };
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!chosen.empty() && !chosen.count(n)) continue;
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << n << ' ' << (o.pass ? "PASS" : "FAIL") << " [" << criteria[i].first
              << "]: " << o.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

#include "menucost/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "menucost/band_sim.hpp"
#include "menucost/io.hpp"
#include "menucost/parallel.hpp"

namespace menucost {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

enum Stream : std::uint64_t { kProduct = 1, kStore = 2, kSeriesBeta = 3, kSeries = 4, kProductBeta = 5 };

std::uint64_t substream(std::uint64_t seed, Stream kind, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(seed ^ (kind * 0x632be59bd9b4e019ULL)) ^ a) ^ (b * 0x9e3779b97f4a7c15ULL));
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

struct ProductDraw {
  ProductMeta meta;
  Cents base_price = 0;
  double wholesale_share = 0.7;
};

struct StoreDraw {
  StoreInfo info;
};

std::int64_t upc_of(std::int64_t product) { return 1000000 + product; }
std::int64_t store_of(std::int64_t store) { return 1 + store; }

ProductDraw draw_product(const SynthConfig& cfg, std::int64_t i) {
  std::mt19937_64 rng(substream(cfg.seed, kProduct, static_cast<std::uint64_t>(i)));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  ProductDraw d;
  d.meta.upc = upc_of(i);
  d.meta.category = static_cast<std::int64_t>(u01(rng) * static_cast<double>(cfg.categories));
  d.meta.category = std::min(d.meta.category, cfg.categories - 1);
  const std::int64_t per_cat = std::max<std::int64_t>(1, cfg.producers / cfg.categories);
  if (u01(rng) < cfg.share_private_label) {
    d.meta.brand = Brand::private_label;
    d.meta.producer = 0;  // the retailer's own label
  } else {
    d.meta.brand = Brand::national;
    d.meta.producer = 1 + d.meta.category * per_cat + std::min<std::int64_t>(per_cat - 1, static_cast<std::int64_t>(u01(rng) * static_cast<double>(per_cat)));
  }
  d.meta.storable = static_cast<double>(d.meta.category) < cfg.share_storable * static_cast<double>(cfg.categories);
  d.meta.pack_qty = u01(rng) < cfg.share_multipack ? 2 + static_cast<int>(u01(rng) * 5) : 1;
  // Regular prices roughly 1.49 to 4.99 dollars.
  const double level = std::exp(std::log(149.0) + u01(rng) * (std::log(499.0) - std::log(149.0)));
  d.base_price = static_cast<Cents>(std::lround(level));
  d.wholesale_share = 0.6 + 0.2 * u01(rng);
  return d;
}

StoreInfo draw_store(const SynthConfig& cfg, std::int64_t s) {
  std::mt19937_64 rng(substream(cfg.seed, kStore, static_cast<std::uint64_t>(s)));
  std::normal_distribution<double> income(52000.0, 14000.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  StoreInfo info;
  info.store = store_of(s);
  info.zone = 1 + s % cfg.zones;
  info.median_income = std::max(15000.0, std::round(income(rng)));
  info.pct_minority = std::round(1000.0 * (0.05 + 0.55 * u01(rng))) / 10.0;
  info.pct_unemployed = std::round(1000.0 * (0.02 + 0.10 * u01(rng))) / 10.0;
  return info;
}

double series_beta(const SynthConfig& cfg, std::int64_t s, std::int64_t i) {
  const double up = unit_uniform(substream(cfg.seed, kProductBeta, static_cast<std::uint64_t>(i)));
  const double us = unit_uniform(substream(cfg.seed, kSeriesBeta, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(i)));
  const double w = cfg.beta_product_weight;
  const double mix = w * up + (1.0 - w) * us;
  return std::exp(std::log(cfg.beta_min) + mix * (std::log(cfg.beta_max) - std::log(cfg.beta_min)));
}

struct SeriesOut {
  std::vector<PanelObservation> rows;
  SeriesTruth truth;
};

void generate_series(const SynthConfig& cfg, std::int64_t s, std::int64_t i, const ProductDraw& product,
                     double volume_scale, SeriesOut& out) {
  std::mt19937_64 rng(substream(cfg.seed, kSeries, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(i)));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> n01(0.0, 1.0);

  const double beta = series_beta(cfg, s, i);
  ModelParams<double> p = cfg.base.with_beta(beta);
  p.sigma = cfg.base.sigma * std::exp(cfg.sigma_dispersion * n01(rng));
  const double output = optimal_output(p, 0.0);
  const double h = band_halfwidth(p);
  const auto m = static_cast<std::int64_t>(std::max<std::uint64_t>(1, trigger_steps(h, p.sigma)));

  out.rows.clear();
  out.truth = {store_of(s), product.meta.upc, beta, output, h, p.sigma, static_cast<int>(m)};

  std::int64_t first = 0;
  std::int64_t last = cfg.n_weeks - 1;
  if (u01(rng) < cfg.share_partial) {
    const auto span = static_cast<double>(cfg.n_weeks) / 3.0;
    if (u01(rng) < 0.5) {
      first = static_cast<std::int64_t>(u01(rng) * span);
    } else {
      last = cfg.n_weeks - 1 - static_cast<std::int64_t>(u01(rng) * span);
    }
  }

  // Start the gap anywhere inside the band so series are not phase-locked.
  std::int64_t gap = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(2 * m - 1)) - (m - 1);
  Cents regular = product.base_price;
  if (cfg.nine_ending) regular = regular - regular % 10 + 9;
  const Cents floor_price = std::max<Cents>(10, product.base_price / 3);
  const double step_cents = static_cast<double>(m) * p.sigma * cfg.price_unit;
  const Cents size = std::max<Cents>(1, std::llround(step_cents));
  const double mean_units = output * volume_scale;
  const double noise_shift = 0.5 * cfg.demand_noise * cfg.demand_noise;

  int sale_left = 0;
  Cents sale_price = 0;
  std::uint64_t bits = 0;
  int bits_left = 0;
  out.rows.reserve(static_cast<std::size_t>(last - first + 1));
  for (std::int64_t week = first; week <= last; ++week) {
    if (bits_left == 0) {
      bits = rng();
      bits_left = 64;
    }
    gap += (bits & 1U) ? 1 : -1;
    bits >>= 1;
    --bits_left;
    if (gap >= m || gap <= -m) {
      Cents delta = gap > 0 ? size : -size;
      gap = 0;
      if (regular + delta < floor_price) delta = -delta;
      regular += delta;
      if (cfg.nine_ending) regular = std::max<Cents>(9, regular - regular % 10 + 9);
    }

    Cents price = regular;
    SaleFlag flag = SaleFlag::none;
    if (sale_left > 0) {
      --sale_left;
      price = std::min(sale_price, regular - 1);
      flag = SaleFlag::sale;
    } else if (u01(rng) < cfg.sale_prob) {
      const double depth = cfg.sale_depth_min + (cfg.sale_depth_max - cfg.sale_depth_min) * u01(rng);
      sale_price = std::max<Cents>(1, std::llround(static_cast<double>(regular) * (1.0 - depth)));
      sale_left = u01(rng) < 0.5 ? 0 : 1;
      price = sale_price;
      flag = SaleFlag::sale;
    }
    if (flag == SaleFlag::none && u01(rng) < cfg.coupon_prob) flag = SaleFlag::coupon;

    const double draw = mean_units * std::exp(cfg.demand_noise * n01(rng) - noise_shift);
    const auto units = static_cast<std::int64_t>(std::floor(draw + u01(rng)));
    const double wholesale =
        product.wholesale_share * static_cast<double>(product.base_price) * std::exp(cfg.wholesale_noise * n01(rng));
    const bool zero_week = u01(rng) < cfg.zero_sale_prob;
    if (zero_week || units <= 0) continue;

    PanelObservation o;
    o.store = store_of(s);
    o.upc = product.meta.upc;
    o.week = static_cast<int>(week);
    o.price = price;
    o.units = units;
    o.pack_qty = product.meta.pack_qty;
    o.sale_flag = flag;
    o.margin_pct = std::round(10000.0 * (1.0 - wholesale / static_cast<double>(price))) / 100.0;
    o.category = product.meta.category;
    o.producer = product.meta.producer;
    o.brand = product.meta.brand;
    out.rows.push_back(o);
  }
}

}  // namespace

void SynthConfig::validate() const {
  auto bad = [](const std::string& what) { throw ParameterError("synth config: " + what); };
  if (n_stores < 1 || n_products < 1 || n_weeks < 1) bad("n_stores, n_products and n_weeks must be >= 1");
  if (categories < 1 || producers < 1 || zones < 1) bad("categories, producers and zones must be >= 1");
  if (!(beta_min > 0) || !(beta_max >= beta_min)) bad("beta range must satisfy 0 < beta_min <= beta_max");
  if (!(price_unit > 0)) bad("price_unit must be > 0");
  if (!(target_volume > 0)) bad("target_volume must be > 0");
  if (!(demand_noise >= 0) || !(sigma_dispersion >= 0) || !(wholesale_noise >= 0)) bad("noise scales must be >= 0");
  for (double prob : {zero_sale_prob, sale_prob, coupon_prob, share_private_label, share_storable, share_multipack,
                      share_partial, beta_product_weight})
    if (!(prob >= 0 && prob <= 1)) bad("probabilities and shares must lie in [0, 1]");
  if (zero_sale_prob >= 1) bad("zero_sale_prob must be < 1");
  if (!(sale_depth_min > 0 && sale_depth_max >= sale_depth_min && sale_depth_max < 1)) bad("sale depths must satisfy 0 < min <= max < 1");
  if (!(base.sigma > 0)) bad("sigma must be > 0");
  try {
    menucost::validate(base.with_beta(beta_min));
    menucost::validate(base.with_beta(beta_max));
  } catch (const ParameterError& e) {
    bad(std::string("beta range infeasible: ") + e.what());
  }
}

SynthPanel synth_panel(const SynthConfig& cfg, const RowSink& sink, unsigned threads) {
  cfg.validate();
  SynthPanel panel;
  std::vector<ProductDraw> products;
  products.reserve(static_cast<std::size_t>(cfg.n_products));
  for (std::int64_t i = 0; i < cfg.n_products; ++i) {
    products.push_back(draw_product(cfg, i));
    panel.meta.push_back(products.back().meta);
  }
  for (std::int64_t s = 0; s < cfg.n_stores; ++s) panel.stores.push_back(draw_store(cfg, s));

  // Scale outputs so the average series sells target_volume units a week.
  double sum_output = 0;
  for (std::int64_t s = 0; s < cfg.n_stores; ++s)
    for (std::int64_t i = 0; i < cfg.n_products; ++i)
      sum_output += optimal_output(cfg.base.with_beta(series_beta(cfg, s, i)), 0.0);
  const double mean_output = sum_output / static_cast<double>(cfg.n_stores * cfg.n_products);
  const double volume_scale = cfg.target_volume / mean_output;

  std::vector<SeriesOut> buffers(static_cast<std::size_t>(cfg.n_products));
  for (std::int64_t s = 0; s < cfg.n_stores; ++s) {
    parallel_for(buffers.size(), threads, [&](std::size_t i) {
      generate_series(cfg, s, static_cast<std::int64_t>(i), products[i], volume_scale, buffers[i]);
    });
    for (auto& b : buffers) {
      panel.truth.push_back(b.truth);
      for (const auto& row : b.rows) sink(row);
      panel.rows += static_cast<std::int64_t>(b.rows.size());
    }
  }
  return panel;
}

std::vector<PanelObservation> synth_rows(const SynthConfig& cfg, SynthPanel* info, unsigned threads) {
  std::vector<PanelObservation> rows;
  auto panel = synth_panel(cfg, [&](const PanelObservation& o) { rows.push_back(o); }, threads);
  if (info) *info = std::move(panel);
  return rows;
}

SynthPanel write_synth_panel(const SynthConfig& cfg, const std::filesystem::path& dir, unsigned threads) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "movement.csv", std::ios::binary);
  if (!out) throw DataError("cannot write '" + (dir / "movement.csv").string() + "'");
  out << io::kMovementHeader << '\n';
  std::string line;
  auto panel = synth_panel(cfg, [&](const PanelObservation& o) {
    line = io::format_movement_line(o);
    line += '\n';
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }, threads);
  out.close();
  if (out.fail()) throw DataError("failed writing movement.csv");
  io::write_meta(panel.meta, dir / "meta.csv");
  io::write_stores(panel.stores, dir / "stores.csv");

  io::TableWriter truth(dir / "truth.csv", {"store", "upc", "beta", "output", "band_halfwidth", "sigma", "trigger_steps"});
  for (const auto& t : panel.truth)
    truth.row({std::to_string(t.store), std::to_string(t.upc), io::format_number(t.beta), io::format_number(t.output),
               io::format_number(t.band_halfwidth), io::format_number(t.sigma), std::to_string(t.trigger_steps)});
  truth.close();
  return panel;
}

}  // namespace menucost

// Synthetic movement panel: every product-store series is a firm running the
// optimal inaction band for its own demand slope, observed weekly in cents.
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "menucost/model.hpp"
#include "menucost/panel.hpp"

namespace menucost {

struct SynthConfig {
  std::int64_t n_stores = 50;
  std::int64_t n_products = 200;
  std::int64_t n_weeks = 300;
  double beta_min = 0.2;
  double beta_max = 2.4;
  /// Share of the log-beta draw common to a product across stores.
  double beta_product_weight = 0.3;
  /// alpha, b, c, gamma and sigma are used; beta is drawn per series.
  ModelParams<double> base = default_base();
  /// Log-sd of the per-series shock step around base.sigma.
  double sigma_dispersion = 0.35;
  /// Log-sd of weekly multiplicative sales noise.
  double demand_noise = 0.4;
  double target_volume = 10.0;
  double zero_sale_prob = 0.05;
  /// Cents per model price unit.
  double price_unit = 25.0;
  std::int64_t categories = 10;
  std::int64_t producers = 40;
  double share_private_label = 0.2;
  double share_storable = 0.7;
  double share_multipack = 0.05;
  std::int64_t zones = 16;
  /// Weekly probability that a temporary sale starts.
  double sale_prob = 0.015;
  double sale_depth_min = 0.10;
  double sale_depth_max = 0.30;
  double coupon_prob = 0.01;
  bool nine_ending = false;
  /// Share of series entering late or leaving early.
  double share_partial = 0.3;
  /// Weekly wholesale cost noise (log-sd) around a fixed share of the base price.
  double wholesale_noise = 0.05;
  std::uint64_t seed = 20240601;

  static ModelParams<double> default_base() {
    ModelParams<double> p;
    p.alpha = 10;
    p.beta = 1;
    p.a = 0;
    p.b = 4;
    p.c = 0.1;
    p.gamma = 0.176;
    p.sigma = 0.1;
    return p;
  }

  /// Throws ParameterError on bad counts or a beta range outside the region
  /// where output is positive.
  void validate() const;
};

/// Per-series ground truth.
struct SeriesTruth {
  std::int64_t store = 0;
  std::int64_t upc = 0;
  double beta = 0;
  double output = 0;
  double band_halfwidth = 0;
  double sigma = 0;
  int trigger_steps = 0;
};

struct SynthPanel {
  std::vector<ProductMeta> meta;
  std::vector<StoreInfo> stores;
  std::vector<SeriesTruth> truth;
  std::int64_t rows = 0;
};

using RowSink = std::function<void(const PanelObservation&)>;

/// Streams rows to `sink` in (store, upc, week) order. Output is identical for
/// any thread count.
SynthPanel synth_panel(const SynthConfig& cfg, const RowSink& sink, unsigned threads = 1);

/// Materialized variant for small panels.
std::vector<PanelObservation> synth_rows(const SynthConfig& cfg, SynthPanel* info = nullptr, unsigned threads = 1);

/// Writes movement.csv, meta.csv, stores.csv and truth.csv into `dir`.
SynthPanel write_synth_panel(const SynthConfig& cfg, const std::filesystem::path& dir, unsigned threads = 1);

/// 64-bit mixer used to derive independent substreams from the seed.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace menucost

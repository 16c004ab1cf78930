// Two-pass streaming analysis of a movement file: per-series statistics and
// events first, then panel-wide joins (peers, peaks, producer size, stores,
// calendar) and the summary tables.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "menucost/io.hpp"
#include "menucost/price_stats.hpp"

namespace menucost {

struct AnalyzeOptions {
  std::filesystem::path input;
  std::filesystem::path meta;
  std::filesystem::path stores;
  std::filesystem::path calendar;
  std::filesystem::path aliases;
  std::filesystem::path out;
  std::filesystem::path temp_dir;
  SmallChangeRule rule;
  DetectMode mode = DetectMode::survived_2w;
  ChangeFilters filters;
  SalesFilterParams sales;
  DecileWeighting decile_weighting = DecileWeighting::product_store;
  bool single_units_only = false;
  /// Also write weeks.csv: one row per product-store-week with a previous week.
  bool weeks_table = false;
  int rolling_window = 52;
  std::size_t sort_chunk_rows = 1 << 20;
  io::Format format = io::Format::csv;
};

struct AnalyzeSummary {
  std::int64_t rows = 0;
  std::int64_t rows_dropped_packs = 0;
  std::int64_t series = 0;
  std::int64_t events = 0;
  std::int64_t small = 0;
  std::int64_t upcs_without_meta = 0;
  std::int64_t alias_merges = 0;
  bool external_sort = false;
};

/// Writes events, product_store_stats, deciles, histogram_cents,
/// histogram_pct, sync_features, category_summary, peak_weeks,
/// producer_size, summary (and optionally weeks) into options.out. Missing
/// metadata is reported through `warn` and the rows are kept with empty ids.
AnalyzeSummary analyze(const AnalyzeOptions& options,
                       const std::function<void(const std::string&)>& warn = {});

/// File extension matching the output format.
std::string table_file(const std::string& stem, io::Format format);

}  // namespace menucost

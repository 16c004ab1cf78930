// Runs regression specs against the tables written by analyze and renders
// result rows.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "menucost/io.hpp"
#include "menucost/regression.hpp"

namespace menucost {

/// analyze output file backing a spec table name.
std::filesystem::path table_path(const std::filesystem::path& dir, const std::string& table, io::Format format);

struct ResultRow {
  std::string spec;
  std::string group;
  std::string term;
  double estimate = 0;
  double se = 0;
  std::int64_t n_obs = 0;
  std::int64_t n_clusters = 0;
  double r2_within = 0;
  std::string note;
};

std::vector<ResultRow> result_rows(const std::string& spec_name, const std::vector<GroupResult>& groups,
                                   const std::string& by);

/// Loads the spec's table from `dir` and fits it (per group when spec.by).
std::vector<ResultRow> run_on_directory(const std::filesystem::path& dir, const RegressionSpec& spec,
                                        unsigned threads, io::Format format);

void write_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path, io::Format format);

/// per_product preset: rollup to `path`, per-upc rows next to it.
void write_per_product(const ProductRegressions& pr, const std::filesystem::path& path, io::Format format);

}  // namespace menucost

#include "menucost/runner.hpp"

#include <cmath>

#include "menucost/analyze.hpp"

namespace menucost {

namespace fs = std::filesystem;

fs::path table_path(const fs::path& dir, const std::string& table, io::Format format) {
  if (table == "events") return dir / table_file("events", format);
  if (table == "weeks") return dir / table_file("weeks", format);
  if (table == "stats") return dir / table_file("product_store_stats", format);
  if (table == "categories") return dir / table_file("category_summary", format);
  throw std::invalid_argument("unknown table '" + table + "' (events, weeks, stats, categories)");
}

std::vector<ResultRow> result_rows(const std::string& spec_name, const std::vector<GroupResult>& groups,
                                   const std::string& by) {
  std::vector<ResultRow> rows;
  for (const auto& g : groups) {
    const std::string group = by.empty() ? std::string{} : by + "=" + io::format_number(g.group);
    if (!g.result) {
      rows.push_back({spec_name, group, "", std::nan(""), std::nan(""), 0, 0, std::nan(""), "error: " + g.error});
      continue;
    }
    const auto& r = *g.result;
    for (std::size_t i = 0; i < r.terms.size(); ++i)
      rows.push_back({spec_name, group, r.terms[i], r.coef(static_cast<Eigen::Index>(i)),
                      r.se(static_cast<Eigen::Index>(i)), r.n_obs, r.n_clusters, r.r2_within, ""});
    for (const auto& d : r.dropped_terms)
      rows.push_back({spec_name, group, d, std::nan(""), std::nan(""), r.n_obs, r.n_clusters, r.r2_within,
                      "dropped: collinear"});
  }
  return rows;
}

std::vector<ResultRow> run_on_directory(const fs::path& dir, const RegressionSpec& spec, unsigned threads,
                                        io::Format format) {
  const fs::path path = table_path(dir, spec.table, format);
  if (!fs::exists(path))
    throw DataError("table '" + spec.table + "' needs '" + path.string() + "'" +
                    (spec.table == "weeks" ? " (run analyze with --weeks-table)" : ""));
  const Dataset data = io::read_dataset(path, format);
  return result_rows(spec.name, run_spec_by(data, spec, threads), spec.by.value_or(""));
}

void write_results(const std::vector<ResultRow>& rows, const fs::path& path, io::Format format) {
  io::TableWriter w(path, {"spec", "group", "term", "estimate", "se", "t", "stars", "n_obs", "n_clusters", "r2_within", "note"},
                    format);
  for (const auto& r : rows) {
    const double t = r.estimate / r.se;
    const bool ok = std::isfinite(r.estimate);
    w.row({r.spec, r.group, r.term, io::format_number(r.estimate), io::format_number(r.se),
           ok && std::isfinite(t) ? io::format_number(t) : "", ok ? fe::significance_stars(t) : "",
           std::to_string(r.n_obs), std::to_string(r.n_clusters), io::format_number(r.r2_within), r.note});
  }
  w.close();
}

void write_per_product(const ProductRegressions& pr, const fs::path& path, io::Format format) {
  {
    io::TableWriter w(path, {"category", "avg_coefficient", "n_coefficients", "pct_positive", "n_significant",
                             "pct_positive_among_significant"},
                      format);
    for (const auto& c : pr.categories)
      w.row({io::format_number(c.category), io::format_number(c.avg_coefficient), std::to_string(c.n_coefficients),
             io::format_number(c.pct_positive), std::to_string(c.n_significant),
             io::format_number(c.pct_positive_among_significant)});
    w.close();
  }
  fs::path products = path;
  products.replace_filename(path.stem().string() + "_products" + path.extension().string());
  io::TableWriter w(products, {"upc", "category", "coefficient", "se", "t", "stars", "n_stores"}, format);
  for (const auto& p : pr.products) {
    const double t = p.se > 0 ? p.coefficient / p.se : std::nan("");
    w.row({io::format_number(p.upc), io::format_number(p.category), io::format_number(p.coefficient),
           io::format_number(p.se), io::format_number(t), fe::significance_stars(t), std::to_string(p.n_stores)});
  }
  w.close();
}

}  // namespace menucost

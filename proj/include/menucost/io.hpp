// File boundaries: delimited tables, the movement / meta / store / calendar
// readers, an external sort for unordered movement files, and key = value
// configuration files.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "menucost/panel.hpp"
#include "menucost/regression.hpp"

namespace menucost::io {

enum class Format { csv, tsv };

Format parse_format(const std::string& name);
char delimiter(Format f);

/// Splits one record; double quotes group fields and "" escapes a quote.
std::vector<std::string> split_record(std::string_view line, char delim);
/// Quotes only when the field holds the delimiter, a quote or a newline.
std::string quote_field(std::string_view field, char delim);

/// Shortest text that parses back to the same double; NaN -> "".
std::string format_number(double x);
std::string format_number(std::optional<double> x);
double parse_number(std::string_view text);

/// "1.99" -> 199. Accepts 0-2 decimals; anything else throws.
Cents parse_price_cents(std::string_view dollars);
std::string format_price(Cents cents);

class TableWriter {
 public:
  TableWriter(const std::filesystem::path& path, std::vector<std::string> header, Format format = Format::csv);
  void row(const std::vector<std::string>& fields);
  std::size_t columns() const { return header_.size(); }
  void close();

 private:
  std::ofstream out_;
  std::vector<std::string> header_;
  char delim_;
  std::filesystem::path path_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column_index(const std::string& name) const;
};

Table read_table(const std::filesystem::path& path, Format format = Format::csv);
void write_table(const Table& table, const std::filesystem::path& path, Format format = Format::csv);

/// Numeric table; empty fields become NaN. Non-numeric text throws naming
/// the line and column.
Dataset read_dataset(const std::filesystem::path& path, Format format = Format::csv);

/// Sniffs the delimiter from the header line (tab if present).
Format detect_format(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Movement files

inline constexpr const char* kMovementHeader = "store,upc,week,price,move,qty,sale,profit";

/// Parses one movement record; `line_no` only feeds error messages.
PanelObservation parse_movement_line(std::string_view line, std::int64_t line_no);
std::string format_movement_line(const PanelObservation& o);

/// Rows in file order. Errors carry the line number.
class MovementReader {
 public:
  explicit MovementReader(const std::filesystem::path& path);
  bool next(PanelObservation& out);
  std::int64_t line() const { return line_no_; }

 private:
  std::ifstream in_;
  std::string buf_;
  std::int64_t line_no_ = 1;
};

struct SortOptions {
  /// Old upc -> replacement upc, applied before sorting.
  std::unordered_map<std::int64_t, std::int64_t> aliases;
  std::size_t chunk_rows = 1 << 20;
  std::filesystem::path temp_dir;
};

/// Rows sorted by (store, upc, week). Already-sorted files without aliases
/// are streamed directly; otherwise sorted runs are spilled to temp files and
/// merged. Duplicate keys are a DataError naming the key, except rows that
/// collide only because of an alias: those are merged (units summed, other
/// fields from the row with more units).
class SortedMovementStream {
 public:
  SortedMovementStream(const std::filesystem::path& path, SortOptions options = {});
  ~SortedMovementStream();
  SortedMovementStream(const SortedMovementStream&) = delete;
  SortedMovementStream& operator=(const SortedMovementStream&) = delete;

  bool next(PanelObservation& out);
  bool external_sort_used() const { return merger_ != nullptr; }
  std::int64_t alias_merges() const { return alias_merges_; }

 private:
  struct Merger;
  bool pull(PanelObservation& out);

  std::unique_ptr<MovementReader> direct_;
  std::unique_ptr<Merger> merger_;
  std::optional<PanelObservation> pending_;
  std::int64_t alias_merges_ = 0;
  bool aliased_pending_ = false;
};

/// Quick pre-scan: true when keys are strictly increasing in file order.
bool movement_sorted(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Side files

std::vector<ProductMeta> read_meta(const std::filesystem::path& path);
void write_meta(const std::vector<ProductMeta>& meta, const std::filesystem::path& path);

std::vector<StoreInfo> read_stores(const std::filesystem::path& path);
void write_stores(const std::vector<StoreInfo>& stores, const std::filesystem::path& path);

/// Header old_upc,new_upc.
std::unordered_map<std::int64_t, std::int64_t> read_upc_aliases(const std::filesystem::path& path);

struct WeekInfo {
  int month = 0;
  int year = 0;
  bool holiday = false;
};

/// Week index -> calendar facts. Without a file, week w is the week starting
/// on first_week_date + 7w and the holiday period runs from the week before
/// Thanksgiving through the week holding Christmas.
class Calendar {
 public:
  Calendar();
  /// CSV header week,month,year,holiday (month/year optional).
  static Calendar from_file(const std::filesystem::path& path);
  WeekInfo at(int week) const;

 private:
  std::map<int, WeekInfo> table_;
  bool from_file_ = false;
};

WeekInfo week_from_dates(int week);

// ---------------------------------------------------------------------------
// key = value configuration

class KeyValues {
 public:
  static KeyValues parse(const std::string& text);
  static KeyValues load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::optional<double> number(const std::string& key) const;
  /// Keys never read through the accessors above.
  std::vector<std::string> unused() const;
  const std::map<std::string, std::string>& all() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

}  // namespace menucost::io

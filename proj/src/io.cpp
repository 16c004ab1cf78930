#include "menucost/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

namespace menucost::io {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  s = trim_view(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::string key_text(const PanelObservation& o) {
  return "(store=" + std::to_string(o.store) + ", upc=" + std::to_string(o.upc) + ", week=" +
         std::to_string(o.week) + ")";
}

bool same_key(const PanelObservation& a, const PanelObservation& b) {
  return a.store == b.store && a.upc == b.upc && a.week == b.week;
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "tsv") return Format::tsv;
  throw std::invalid_argument("unknown format '" + name + "' (csv or tsv)");
}

char delimiter(Format f) { return f == Format::tsv ? '\t' : ','; }

std::vector<std::string> split_record(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delim) {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  if (quoted) throw DataError("unterminated quote in record");
  out.push_back(std::move(cur));
  return out;
}

std::string quote_field(std::string_view field, char delim) {
  if (field.find_first_of(std::string{delim, '"', '\n', '\r'}) == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return {};
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string format_number(std::optional<double> x) { return x ? format_number(*x) : std::string{}; }

double parse_number(std::string_view text) {
  text = trim_view(text);
  if (text.empty()) return kNaN;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    throw DataError("not a number: '" + std::string(text) + "'");
  return v;
}

Cents parse_price_cents(std::string_view dollars) {
  const std::string_view s = trim_view(dollars);
  const auto dot = s.find('.');
  const std::string_view whole = s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw DataError("empty price");
  if (frac.size() > 2) throw DataError("price '" + std::string(s) + "' has more than two decimals");
  for (char ch : whole)
    if (ch < '0' || ch > '9') throw DataError("malformed price '" + std::string(s) + "'");
  for (char ch : frac)
    if (ch < '0' || ch > '9') throw DataError("malformed price '" + std::string(s) + "'");
  Cents c = 0;
  if (!whole.empty() && !parse_int(whole, c)) throw DataError("malformed price '" + std::string(s) + "'");
  c *= 100;
  if (frac.size() >= 1) c += 10 * (frac[0] - '0');
  if (frac.size() == 2) c += frac[1] - '0';
  return c;
}

std::string format_price(Cents cents) {
  const char* sign = cents < 0 ? "-" : "";
  const Cents a = cents < 0 ? -cents : cents;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", sign, static_cast<long long>(a / 100),
                static_cast<long long>(a % 100));
  return buf;
}

// ---------------------------------------------------------------------------
// Tables

TableWriter::TableWriter(const fs::path& path, std::vector<std::string> header, Format format)
    : out_(path, std::ios::binary), header_(std::move(header)), delim_(delimiter(format)), path_(path) {
  if (!out_) throw DataError("cannot write '" + path.string() + "'");
  row(header_);
}

void TableWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != header_.size())
    throw std::logic_error("row width " + std::to_string(fields.size()) + " does not match header of '" +
                           path_.string() + "'");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_.put(delim_);
    out_ << quote_field(fields[i], delim_);
  }
  out_.put('\n');
}

void TableWriter::close() {
  out_.close();
  if (out_.fail()) throw DataError("failed writing '" + path_.string() + "'");
}

std::optional<std::size_t> Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

Table read_table(const fs::path& path, Format format) {
  auto in = open_in(path);
  const char delim = delimiter(format);
  Table t;
  std::string line;
  std::int64_t line_no = 0;
  if (!std::getline(in, line)) return t;
  ++line_no;
  t.header = split_record(line, delim);
  while (std::getline(in, line)) {
    ++line_no;
    // Quoted fields may span lines.
    while (std::count(line.begin(), line.end(), '"') % 2 == 1) {
      std::string more;
      if (!std::getline(in, more)) throw DataError(path.string() + ":" + std::to_string(line_no) + ": unterminated quote");
      line += '\n' + more;
      ++line_no;
    }
    if (strip_cr(line).empty()) continue;
    auto fields = split_record(line, delim);
    if (fields.size() != t.header.size())
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(t.header.size()) + " fields, found " + std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  return t;
}

void write_table(const Table& table, const fs::path& path, Format format) {
  TableWriter w(path, table.header, format);
  for (const auto& r : table.rows) w.row(r);
  w.close();
}

Format detect_format(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  return line.find('\t') != std::string::npos ? Format::tsv : Format::csv;
}

Dataset read_dataset(const fs::path& path, Format format) {
  auto in = open_in(path);
  const char delim = delimiter(format);
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' is empty");
  const auto header = split_record(line, delim);
  std::vector<std::vector<double>> cols(header.size());
  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip_cr(line).empty()) continue;
    const auto fields = split_record(line, delim);
    if (fields.size() != header.size())
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      try {
        cols[c].push_back(parse_number(fields[c]));
      } catch (const DataError&) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": column '" + header[c] +
                        "' is not numeric ('" + fields[c] + "')");
      }
    }
  }
  Dataset d(cols.empty() ? 0 : cols.front().size());
  for (std::size_t c = 0; c < header.size(); ++c) d.add_column(header[c], std::move(cols[c]));
  return d;
}

// ---------------------------------------------------------------------------
// Movement

PanelObservation parse_movement_line(std::string_view line, std::int64_t line_no) {
  std::string_view f[8];
  std::size_t n = 0;
  std::vector<std::string> quoted;
  if (line.find('"') != std::string_view::npos) {
    quoted = split_record(line, ',');
    for (const auto& q : quoted) {
      if (n == 8) {
        ++n;
        break;
      }
      f[n++] = q;
    }
    if (quoted.size() != 8) n = quoted.size();
  } else {
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      if (n == 8) {
        n = 9;
        break;
      }
      f[n++] = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  auto fail = [&](const std::string& what) -> DataError {
    return DataError("movement line " + std::to_string(line_no) + ": " + what);
  };
  if (n != 8) throw fail("expected 8 fields");

  PanelObservation o;
  if (!parse_int(f[0], o.store)) throw fail("bad store '" + std::string(f[0]) + "'");
  if (!parse_int(f[1], o.upc)) throw fail("bad upc '" + std::string(f[1]) + "'");
  if (!parse_int(f[2], o.week)) throw fail("bad week '" + std::string(f[2]) + "'");
  try {
    o.price = parse_price_cents(f[3]);
  } catch (const DataError& e) {
    throw fail(e.what());
  }
  if (o.price <= 0) throw fail("price must be positive");
  if (!parse_int(f[4], o.units) || o.units < 0) throw fail("bad move '" + std::string(f[4]) + "'");
  const auto qty = trim_view(f[5]);
  if (qty.empty()) {
    o.pack_qty = 1;
  } else if (!parse_int(qty, o.pack_qty) || o.pack_qty < 1) {
    throw fail("bad qty '" + std::string(f[5]) + "'");
  }
  const auto sale = trim_view(f[6]);
  if (sale.empty()) {
    o.sale_flag = SaleFlag::none;
  } else if (sale == "S") {
    o.sale_flag = SaleFlag::sale;
  } else if (sale == "B") {
    o.sale_flag = SaleFlag::bonus;
  } else if (sale == "C") {
    o.sale_flag = SaleFlag::coupon;
  } else {
    throw fail("bad sale flag '" + std::string(sale) + "'");
  }
  try {
    o.margin_pct = parse_number(f[7]);
  } catch (const DataError&) {
    throw fail("bad profit '" + std::string(f[7]) + "'");
  }
  return o;
}

std::string format_movement_line(const PanelObservation& o) {
  std::string s;
  s.reserve(64);
  s += std::to_string(o.store);
  s += ',';
  s += std::to_string(o.upc);
  s += ',';
  s += std::to_string(o.week);
  s += ',';
  s += format_price(o.price);
  s += ',';
  s += std::to_string(o.units);
  s += ',';
  s += std::to_string(o.pack_qty);
  s += ',';
  if (const char c = sale_flag_code(o.sale_flag)) s += c;
  s += ',';
  s += format_number(o.margin_pct);
  return s;
}

MovementReader::MovementReader(const fs::path& path) : in_(open_in(path)) {
  if (!std::getline(in_, buf_)) return;  // empty file: empty stream
  if (strip_cr(buf_) != kMovementHeader)
    throw DataError("'" + path.string() + "': expected header " + kMovementHeader);
}

bool MovementReader::next(PanelObservation& out) {
  while (std::getline(in_, buf_)) {
    ++line_no_;
    if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
    if (buf_.empty()) continue;
    out = parse_movement_line(buf_, line_no_);
    return true;
  }
  return false;
}

bool movement_sorted(const fs::path& path) {
  MovementReader r(path);
  PanelObservation prev, cur;
  bool first = true;
  while (r.next(cur)) {
    if (!first && !key_less(prev, cur)) return false;
    prev = cur;
    first = false;
  }
  return true;
}

namespace {

struct SortRecord {
  PanelObservation obs;
  std::uint8_t aliased = 0;
};

bool record_less(const SortRecord& a, const SortRecord& b) { return key_less(a.obs, b.obs); }

}  // namespace

struct SortedMovementStream::Merger {
  std::vector<fs::path> runs;
  std::vector<std::ifstream> files;
  struct Head {
    SortRecord rec;
    std::size_t run;
  };
  struct HeadGreater {
    bool operator()(const Head& a, const Head& b) const {
      if (record_less(b.rec, a.rec)) return true;
      if (record_less(a.rec, b.rec)) return false;
      return a.run > b.run;
    }
  };
  std::priority_queue<Head, std::vector<Head>, HeadGreater> heap;

  bool read_one(std::size_t run, SortRecord& rec) {
    return static_cast<bool>(files[run].read(reinterpret_cast<char*>(&rec), sizeof rec));
  }

  void start() {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      files.emplace_back(runs[i], std::ios::binary);
      SortRecord rec;
      if (read_one(i, rec)) heap.push({rec, i});
    }
  }

  bool next(SortRecord& out) {
    if (heap.empty()) return false;
    Head h = heap.top();
    heap.pop();
    out = h.rec;
    SortRecord rec;
    if (read_one(h.run, rec)) heap.push({rec, h.run});
    return true;
  }

  ~Merger() {
    files.clear();
    std::error_code ec;
    for (const auto& r : runs) fs::remove(r, ec);
  }
};

SortedMovementStream::SortedMovementStream(const fs::path& path, SortOptions options) {
  if (options.aliases.empty() && movement_sorted(path)) {
    direct_ = std::make_unique<MovementReader>(path);
    return;
  }
  merger_ = std::make_unique<Merger>();
  fs::path dir = options.temp_dir.empty() ? fs::temp_directory_path() : options.temp_dir;
  std::random_device rd;
  const std::string stem = "menucost-sort-" + std::to_string(rd()) + "-";

  MovementReader reader(path);
  std::vector<SortRecord> chunk;
  const std::size_t cap = std::max<std::size_t>(1, options.chunk_rows);
  chunk.reserve(std::min<std::size_t>(cap, 1 << 16));
  auto spill = [&] {
    if (chunk.empty()) return;
    std::stable_sort(chunk.begin(), chunk.end(), record_less);
    fs::path run = dir / (stem + std::to_string(merger_->runs.size()) + ".bin");
    std::ofstream out(run, std::ios::binary);
    if (!out) throw DataError("cannot write temporary file '" + run.string() + "'");
    out.write(reinterpret_cast<const char*>(chunk.data()), static_cast<std::streamsize>(chunk.size() * sizeof(SortRecord)));
    if (!out) throw DataError("failed writing temporary file '" + run.string() + "'");
    merger_->runs.push_back(run);
    chunk.clear();
  };
  SortRecord rec;
  while (reader.next(rec.obs)) {
    rec.aliased = 0;
    if (const auto it = options.aliases.find(rec.obs.upc); it != options.aliases.end() && it->second != rec.obs.upc) {
      rec.obs.upc = it->second;
      rec.aliased = 1;
    }
    chunk.push_back(rec);
    if (chunk.size() >= cap) spill();
  }
  spill();
  chunk.shrink_to_fit();
  merger_->start();
}

SortedMovementStream::~SortedMovementStream() = default;

bool SortedMovementStream::pull(PanelObservation& out) {
  if (direct_) {
    aliased_pending_ = false;
    return direct_->next(out);
  }
  SortRecord rec;
  if (!merger_->next(rec)) return false;
  out = rec.obs;
  aliased_pending_ = rec.aliased != 0;
  return true;
}

bool SortedMovementStream::next(PanelObservation& out) {
  if (!pending_) {
    PanelObservation first;
    if (!pull(first)) return false;
    pending_ = first;
  }
  bool pending_aliased = aliased_pending_;
  PanelObservation cur = *pending_;
  while (true) {
    PanelObservation nxt;
    if (!pull(nxt)) {
      pending_.reset();
      break;
    }
    if (!same_key(cur, nxt)) {
      pending_ = nxt;
      break;
    }
    if (!pending_aliased && !aliased_pending_) throw DataError("duplicate movement key " + key_text(cur));
    ++alias_merges_;
    const std::int64_t total = cur.units + nxt.units;
    if (nxt.units > cur.units) cur = nxt;
    cur.units = total;
    pending_aliased = true;
  }
  out = cur;
  return true;
}

// ---------------------------------------------------------------------------
// Side files

namespace {

std::size_t require(const Table& t, const std::string& name, const fs::path& path) {
  const auto i = t.column_index(name);
  if (!i) throw DataError("'" + path.string() + "' lacks column '" + name + "'");
  return *i;
}

std::int64_t cell_int(const std::string& s, const fs::path& path, std::size_t row, const char* col) {
  std::int64_t v = 0;
  if (!parse_int(std::string_view(s), v))
    throw DataError(path.string() + ":" + std::to_string(row + 2) + ": bad " + col + " '" + s + "'");
  return v;
}

std::optional<double> cell_opt(const std::string& s, const fs::path& path, std::size_t row, const char* col) {
  try {
    const double v = parse_number(s);
    if (std::isnan(v)) return std::nullopt;
    return v;
  } catch (const DataError&) {
    throw DataError(path.string() + ":" + std::to_string(row + 2) + ": bad " + col + " '" + s + "'");
  }
}

}  // namespace

std::vector<ProductMeta> read_meta(const fs::path& path) {
  const Table t = read_table(path);
  const auto c_upc = require(t, "upc", path), c_cat = require(t, "category", path),
             c_prod = require(t, "producer", path), c_brand = require(t, "brand", path),
             c_pack = require(t, "pack_qty", path), c_stor = require(t, "storable", path);
  std::vector<ProductMeta> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    ProductMeta m;
    m.upc = cell_int(row[c_upc], path, r, "upc");
    m.category = cell_int(row[c_cat], path, r, "category");
    m.producer = cell_int(row[c_prod], path, r, "producer");
    const std::string& b = row[c_brand];
    if (b == "national" || b == "N" || b == "0") {
      m.brand = Brand::national;
    } else if (b == "private" || b == "private_label" || b == "P" || b == "1") {
      m.brand = Brand::private_label;
    } else {
      throw DataError(path.string() + ":" + std::to_string(r + 2) + ": bad brand '" + b + "'");
    }
    m.pack_qty = static_cast<int>(row[c_pack].empty() ? 1 : cell_int(row[c_pack], path, r, "pack_qty"));
    const std::string& s = row[c_stor];
    if (s == "1" || s == "true" || s == "yes") {
      m.storable = true;
    } else if (s == "0" || s == "false" || s == "no") {
      m.storable = false;
    } else {
      throw DataError(path.string() + ":" + std::to_string(r + 2) + ": bad storable '" + s + "'");
    }
    out.push_back(m);
  }
  return out;
}

void write_meta(const std::vector<ProductMeta>& meta, const fs::path& path) {
  TableWriter w(path, {"upc", "category", "producer", "brand", "pack_qty", "storable"});
  for (const auto& m : meta)
    w.row({std::to_string(m.upc), std::to_string(m.category), std::to_string(m.producer),
           m.brand == Brand::private_label ? "private" : "national", std::to_string(m.pack_qty),
           m.storable ? "1" : "0"});
  w.close();
}

std::vector<StoreInfo> read_stores(const fs::path& path) {
  const Table t = read_table(path);
  const auto c_store = require(t, "store", path), c_zone = require(t, "zone", path);
  const auto c_inc = t.column_index("median_income"), c_min = t.column_index("pct_minority"),
             c_unemp = t.column_index("pct_unemployed");
  std::vector<StoreInfo> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    StoreInfo s;
    s.store = cell_int(row[c_store], path, r, "store");
    s.zone = row[c_zone].empty() ? -1 : cell_int(row[c_zone], path, r, "zone");
    if (c_inc) s.median_income = cell_opt(row[*c_inc], path, r, "median_income");
    if (c_min) s.pct_minority = cell_opt(row[*c_min], path, r, "pct_minority");
    if (c_unemp) s.pct_unemployed = cell_opt(row[*c_unemp], path, r, "pct_unemployed");
    out.push_back(s);
  }
  return out;
}

void write_stores(const std::vector<StoreInfo>& stores, const fs::path& path) {
  TableWriter w(path, {"store", "zone", "median_income", "pct_minority", "pct_unemployed"});
  for (const auto& s : stores)
    w.row({std::to_string(s.store), std::to_string(s.zone), format_number(s.median_income),
           format_number(s.pct_minority), format_number(s.pct_unemployed)});
  w.close();
}

std::unordered_map<std::int64_t, std::int64_t> read_upc_aliases(const fs::path& path) {
  const Table t = read_table(path);
  const auto c_old = require(t, "old_upc", path), c_new = require(t, "new_upc", path);
  std::unordered_map<std::int64_t, std::int64_t> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto from = cell_int(t.rows[r][c_old], path, r, "old_upc");
    const auto to = cell_int(t.rows[r][c_new], path, r, "new_upc");
    if (!out.emplace(from, to).second)
      throw DataError(path.string() + ": upc " + std::to_string(from) + " aliased twice");
  }
  // Resolve chains a -> b -> c; a cycle is an error.
  const auto direct = out;
  for (auto& [from, to] : out) {
    std::size_t hops = 0;
    for (auto it = direct.find(to); it != direct.end() && it->second != it->first; it = direct.find(to)) {
      to = it->second;
      if (to == from || ++hops > direct.size())
        throw DataError(path.string() + ": alias cycle through upc " + std::to_string(from));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calendar

WeekInfo week_from_dates(int week) {
  using namespace std::chrono;
  const sys_days epoch = year{1989} / September / 14;
  const sys_days start = epoch + days{7 * static_cast<long>(week)};
  const year_month_day ymd{start};
  WeekInfo w;
  w.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
  w.year = static_cast<int>(ymd.year());

  const sys_days end = start + days{6};
  for (int y : {w.year - 1, w.year, w.year + 1}) {
    const sys_days thanksgiving = year{y} / November / Thursday[4];
    const sys_days christmas = year{y} / December / 25;
    if (start <= christmas && end >= thanksgiving - days{7}) w.holiday = true;
  }
  return w;
}

Calendar::Calendar() = default;

Calendar Calendar::from_file(const fs::path& path) {
  const Table t = read_table(path);
  const auto c_week = require(t, "week", path), c_hol = require(t, "holiday", path);
  const auto c_month = t.column_index("month"), c_year = t.column_index("year");
  Calendar cal;
  cal.from_file_ = true;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const int week = static_cast<int>(cell_int(row[c_week], path, r, "week"));
    WeekInfo w = week_from_dates(week);
    if (c_month && !row[*c_month].empty()) w.month = static_cast<int>(cell_int(row[*c_month], path, r, "month"));
    if (c_year && !row[*c_year].empty()) w.year = static_cast<int>(cell_int(row[*c_year], path, r, "year"));
    w.holiday = cell_int(row[c_hol], path, r, "holiday") != 0;
    cal.table_[week] = w;
  }
  return cal;
}

WeekInfo Calendar::at(int week) const {
  if (from_file_) {
    if (const auto it = table_.find(week); it != table_.end()) return it->second;
    WeekInfo w = week_from_dates(week);
    w.holiday = false;
    return w;
  }
  return week_from_dates(week);
}

// ---------------------------------------------------------------------------
// key = value

KeyValues KeyValues::parse(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string_view body = trim_view(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim_view(body.substr(0, eq)));
    std::string value(trim_view(body.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    if (!kv.values_.emplace(key, value).second)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }
  return kv;
}

KeyValues KeyValues::load(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_[key] = true;
  return it->second;
}

std::optional<double> KeyValues::number(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  try {
    const double x = parse_number(*v);
    if (std::isnan(x)) throw DataError("empty");
    return x;
  } catch (const DataError&) {
    throw std::invalid_argument("config key '" + key + "' is not a number: '" + *v + "'");
  }
}

double KeyValues::number(const std::string& key, double fallback) const { return number(key).value_or(fallback); }

std::int64_t KeyValues::integer(const std::string& key, std::int64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::int64_t x = 0;
  if (!parse_int(std::string_view(*v), x))
    throw std::invalid_argument("config key '" + key + "' is not an integer: '" + *v + "'");
  return x;
}

std::vector<std::string> KeyValues::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

}  // namespace menucost::io

// Scanner-panel records: one store x product x week observation, product
// metadata, and detected price-change events. Prices are integer cents.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace menucost {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SaleFlag : std::uint8_t { none, sale, bonus, coupon };
enum class Brand : std::uint8_t { national, private_label };
enum class Direction : std::int8_t { decrease = -1, increase = 1 };

using Cents = std::int64_t;

struct PanelObservation {
  std::int64_t store = 0;
  std::int64_t upc = 0;
  int week = 0;
  Cents price = 0;
  std::int64_t units = 0;
  int pack_qty = 1;
  SaleFlag sale_flag = SaleFlag::none;
  double margin_pct = 0;
  std::int64_t category = -1;
  std::int64_t producer = -1;
  Brand brand = Brand::national;

  bool same_series(const PanelObservation& o) const { return store == o.store && upc == o.upc; }
};

inline bool key_less(const PanelObservation& l, const PanelObservation& r) {
  if (l.store != r.store) return l.store < r.store;
  if (l.upc != r.upc) return l.upc < r.upc;
  return l.week < r.week;
}

struct ProductMeta {
  std::int64_t upc = 0;
  std::int64_t category = -1;
  std::int64_t producer = -1;
  Brand brand = Brand::national;
  int pack_qty = 1;
  bool storable = true;
};

struct StoreInfo {
  std::int64_t store = 0;
  std::int64_t zone = -1;
  std::optional<double> median_income;
  std::optional<double> pct_minority;
  std::optional<double> pct_unemployed;
};

struct PriceChangeEvent {
  std::int64_t store = 0;
  std::int64_t upc = 0;
  int week = 0;
  Cents pre_price = 0;
  Cents post_price = 0;
  Cents delta_cents = 0;
  double delta_pct = 0;
  Direction direction = Direction::increase;
  bool survived_two_weeks = false;
  bool nine_ending_pre = false;
  bool on_sale_or_bounceback = false;
  bool coupon_adjacent = false;
  /// |w(t) - w(t-1)| with w = price * (1 - margin/100), in cents.
  double abs_wholesale_change = 0;
  double margin_pct = 0;

  Cents abs_delta() const { return delta_cents < 0 ? -delta_cents : delta_cents; }
};

inline char sale_flag_code(SaleFlag f) {
  switch (f) {
    case SaleFlag::sale: return 'S';
    case SaleFlag::bonus: return 'B';
    case SaleFlag::coupon: return 'C';
    default: return '\0';
  }
}

}  // namespace menucost

#include "menucost/band_sim.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "menucost/parallel.hpp"

namespace menucost {

namespace {
constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();
}

std::uint64_t trigger_steps(double halfwidth, double sigma) {
  if (halfwidth < 0) throw ParameterError("band half-width must be >= 0");
  if (sigma == 0) return halfwidth == 0 ? 0 : kNever;
  const double ratio = halfwidth / sigma;
  // absorb rounding in ratios like 0.3/0.1
  const double steps = std::ceil(ratio * (1 - 1e-12));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(steps));
}

SimResult simulate_band(const ModelParams<double>& p, const BandPolicy& policy, std::uint64_t horizon,
                        std::uint64_t seed) {
  validate(p);
  if (horizon == 0) throw std::invalid_argument("simulate_band: horizon must be >= 1");
  if (policy.halfwidth < 0) throw std::invalid_argument("simulate_band: half-width must be >= 0");

  const double th = theta(p);
  const std::uint64_t m = trigger_steps(policy.halfwidth, p.sigma);

  SimResult r;
  r.horizon = horizon;
  r.nominal_halfwidth = policy.halfwidth;
  r.trigger_steps = m;
  r.effective_trigger = m == kNever ? std::numeric_limits<double>::infinity() : static_cast<double>(m) * p.sigma;

  std::mt19937_64 rng(seed);
  std::uint64_t bits = 0;
  int bits_left = 0;

  std::int64_t n = 0;
  std::uint64_t sum_sq_gap = 0;
  std::uint64_t since = 0;
  double sum_interval = 0;
  double sum_interval_sq = 0;
  double sum_change = 0;
  if (m != kNever) r.exit_gap_counts.assign(m + 1, 0);
  const double step_change = policy.passthrough * p.sigma;

  for (std::uint64_t t = 0; t < horizon; ++t) {
    if (bits_left == 0) {
      bits = rng();
      bits_left = 64;
    }
    if (p.sigma != 0) n += (bits & 1u) ? 1 : -1;
    bits >>= 1;
    --bits_left;
    ++since;

    const std::uint64_t gap = static_cast<std::uint64_t>(n < 0 ? -n : n);
    if (gap >= m) {
      ++r.adjustments;
      ++r.exit_gap_counts[gap];
      sum_change += step_change * static_cast<double>(gap);
      const double len = static_cast<double>(since);
      sum_interval += len;
      sum_interval_sq += len * len;
      since = 0;
      n = 0;
    }
    sum_sq_gap += static_cast<std::uint64_t>(n * n);
  }

  const double h = static_cast<double>(horizon);
  r.adjustment_rate = static_cast<double>(r.adjustments) / h;
  r.flow_loss = th * p.sigma * p.sigma * static_cast<double>(sum_sq_gap);
  r.menu_cost_paid = p.gamma * static_cast<double>(r.adjustments);
  r.avg_cost_rate = (r.flow_loss + r.menu_cost_paid) / h;
  if (r.adjustments > 0) {
    const double k = static_cast<double>(r.adjustments);
    r.mean_abs_price_change = sum_change / k;
    r.mean_interval = sum_interval / k;
    if (r.adjustments > 1) {
      const double var = (sum_interval_sq - k * r.mean_interval * r.mean_interval) / (k - 1);
      r.interval_se = std::sqrt(std::max(0.0, var) / k);
    }
  }
  return r;
}

double expected_hitting_time(int k, HittingMethod method) {
  if (k <= 0) throw std::invalid_argument("expected_hitting_time: k must be >= 1");
  if (method == HittingMethod::analytic) return static_cast<double>(k) * k;

  // E(x) = 1 + E(x+1)/2 + E(x-1)/2 on the interior -k < x < k, E(+-k) = 0.
  const int n = 2 * k - 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 1.0;
    if (i > 0) a(i, i - 1) = -0.5;
    if (i + 1 < n) a(i, i + 1) = -0.5;
  }
  const Eigen::VectorXd e = a.partialPivLu().solve(rhs);
  return e(k - 1);
}

BandSearch optimize_band_numeric(const ModelParams<double>& p, const std::vector<double>& grid,
                                 std::uint64_t horizon, std::uint64_t seed, unsigned threads) {
  validate(p);
  if (grid.empty()) throw std::invalid_argument("optimize_band_numeric: grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] < grid[i - 1]) throw std::invalid_argument("optimize_band_numeric: grid must be sorted");

  BandSearch out;
  out.grid = grid;
  out.results.resize(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    out.results[i] = simulate_band(p, BandPolicy{grid[i], passthrough(p)}, horizon, seed);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (out.results[i].avg_cost_rate < out.results[best].avg_cost_rate) best = i;
  out.best_halfwidth = grid[best];
  return out;
}

std::vector<double> auto_grid(const ModelParams<double>& p, int n, double lo_factor, double hi_factor) {
  if (n < 1) throw std::invalid_argument("auto_grid: need at least one point");
  const double h = band_halfwidth(p);
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double f = n == 1 ? lo_factor : lo_factor + (hi_factor - lo_factor) * i / (n - 1);
    grid[static_cast<std::size_t>(i)] = f * h;
  }
  return grid;
}

std::vector<SweepRow> beta_sweep_experiment(const ModelParams<double>& base, const std::vector<double>& betas,
                                            std::uint64_t horizon, std::uint64_t seed, double small_threshold,
                                            SizeUnit unit, unsigned threads) {
  for (double beta : betas) {
    try {
      validate(base.with_beta(beta));
    } catch (const ParameterError& e) {
      std::ostringstream os;
      os << "beta=" << beta << " is invalid for the base economy: " << e.what();
      throw ParameterError(os.str());
    }
  }

  std::vector<SweepRow> rows(betas.size());
  parallel_for(betas.size(), threads, [&](std::size_t i) {
    const auto p = base.with_beta(betas[i]);
    const auto policy = BandPolicy::optimal(p);
    const SimResult sim = simulate_band(p, policy, horizon, seed);

    SweepRow& row = rows[i];
    row.beta = betas[i];
    row.output = disturbance_free_output(p);
    row.theta = theta(p);
    row.h_hat = policy.halfwidth;
    row.effective_trigger = sim.effective_trigger;
    row.adjustment_rate = sim.adjustment_rate;
    row.mean_abs_change = sim.mean_abs_price_change;

    std::uint64_t small = 0;
    double gap_sum = 0;
    for (std::size_t k = 0; k < sim.exit_gap_counts.size(); ++k) {
      const double gap = static_cast<double>(k) * p.sigma;
      const double size = unit == SizeUnit::price ? policy.passthrough * gap : gap;
      gap_sum += gap * static_cast<double>(sim.exit_gap_counts[k]);
      if (size <= small_threshold) small += sim.exit_gap_counts[k];
    }
    if (sim.adjustments > 0) {
      row.mean_abs_gap = gap_sum / static_cast<double>(sim.adjustments);
      row.share_small = static_cast<double>(small) / static_cast<double>(sim.adjustments);
    }
  });
  return rows;
}

}  // namespace menucost

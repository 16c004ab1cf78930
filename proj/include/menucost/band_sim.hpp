// Monte Carlo engine for the symmetric (S,s) policy under a Bernoulli random
// walk of the demand disturbance.
//
// The gap g starts at 0 and moves +/-sigma with probability 1/2 per step. When
// |g| reaches the half-width the firm pays the menu cost, changes its price by
// passthrough*|g| and resets g to 0. Each step then accrues theta*g^2.
//
// Random source: std::mt19937_64 seeded with the caller's seed; each 64-bit
// draw supplies 64 consecutive steps (least significant bit first, 1 = up).
#pragma once

#include <cstdint>
#include <vector>

#include "menucost/model.hpp"

namespace menucost {

struct BandPolicy {
  double halfwidth = 0;
  double passthrough = 0;

  static BandPolicy optimal(const ModelParams<double>& p) {
    return {band_halfwidth(p), menucost::passthrough(p)};
  }
};

struct SimResult {
  std::uint64_t horizon = 0;
  std::uint64_t adjustments = 0;
  double adjustment_rate = 0;
  double mean_abs_price_change = 0;
  double flow_loss = 0;
  double menu_cost_paid = 0;
  double avg_cost_rate = 0;

  double nominal_halfwidth = 0;
  /// Smallest multiple of sigma at or above the half-width; the walk exits there.
  double effective_trigger = 0;
  std::uint64_t trigger_steps = 0;
  /// Mean and standard error of completed inter-adjustment times, in steps.
  double mean_interval = 0;
  double interval_se = 0;
  /// exit_gap_counts[k] = adjustments at |g| = k*sigma.
  std::vector<std::uint64_t> exit_gap_counts;
};

SimResult simulate_band(const ModelParams<double>& p, const BandPolicy& policy, std::uint64_t horizon,
                        std::uint64_t seed);

/// Steps the discrete walk needs before it first triggers a band of half-width h.
std::uint64_t trigger_steps(double halfwidth, double sigma);

enum class HittingMethod { analytic, enumerate };

/// Expected exit time of a simple symmetric walk from 0 out of (-k, k).
double expected_hitting_time(int k, HittingMethod method);

struct BandSearch {
  double best_halfwidth = 0;
  std::vector<double> grid;
  std::vector<SimResult> results;
};

/// Simulates every grid point with the same seed (common random numbers) and
/// returns the minimiser of avg_cost_rate, ties toward the smaller half-width.
BandSearch optimize_band_numeric(const ModelParams<double>& p, const std::vector<double>& grid,
                                 std::uint64_t horizon, std::uint64_t seed, unsigned threads = 1);

/// n points evenly spaced over [lo_factor*h, hi_factor*h] with h from the closed form.
std::vector<double> auto_grid(const ModelParams<double>& p, int n = 21, double lo_factor = 0.2,
                              double hi_factor = 3.0);

enum class SizeUnit { price, shock };

struct SweepRow {
  double beta = 0;
  double output = 0;
  double theta = 0;
  double h_hat = 0;
  double effective_trigger = 0;
  double adjustment_rate = 0;
  double mean_abs_change = 0;
  double mean_abs_gap = 0;
  double share_small = 0;
};

/// One row per beta: closed-form band, simulated dynamics. Every row uses the
/// same seed, so rows with equal trigger steps share the walk exactly.
/// share_small counts changes whose size (price units, or disturbance units
/// for SizeUnit::shock) is at or below small_threshold.
std::vector<SweepRow> beta_sweep_experiment(const ModelParams<double>& base, const std::vector<double>& betas,
                                            std::uint64_t horizon, std::uint64_t seed, double small_threshold,
                                            SizeUnit unit = SizeUnit::price, unsigned threads = 1);

}  // namespace menucost

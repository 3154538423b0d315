#pragma once

#include <cstdint>
#include <vector>

#include "mclab/bridge.hpp"
#include "mclab/chain.hpp"

namespace mclab {

/// SplitMix64 stream; the sole random source of the simulator. Fully
/// specified here so identical seeds give bit-identical output on any build.
struct SplitMix64 {
  std::uint64_t state = 0;
  std::uint64_t next();
  double next_unit();  ///< uniform in [0,1), 53 bits
};

/// Per-path substream derivation: mixes (master, index) through two SplitMix64
/// finalizer rounds. Fixed by contract, so any parallel schedule reproduces
/// the sequential batch.
std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index);

/// Seeded stationary sample paths with per-path statistics. Initial states
/// are drawn from pi; steps use inverse-CDF sampling over the kernel row in
/// state order. `centered` subtracts the exact bridge expectation
/// E(S_n | xi_0, xi_n) per path.
struct TrajectoryBatch {
  std::uint64_t seed = 0;
  int n_steps = 0;
  int n_paths = 0;
  std::vector<int> x0;
  std::vector<int> xn;
  std::vector<double> sums;      ///< S_n per path
  std::vector<double> centered;  ///< S_n - E(S_n | xi_0, xi_n)
};

/// n_workers > 1 distributes paths over threads; per-path substreams and
/// disjoint output slots make the batch bit-identical for any worker count.
TrajectoryBatch simulate(const ChainModel& chain, int n_steps, int n_paths, std::uint64_t seed,
                         int n_workers = 1);

enum class StatisticKind { Raw, Centered };

/// One-sample Kolmogorov-Smirnov comparison of the normalized statistic
/// against N(0, target_variance). When the target is degenerate
/// (< tol.degenerate_variance) the test reduces to max|statistic| <=
/// tol_degenerate and ks_distance reports 0/1 accordingly.
struct CltTestResult {
  StatisticKind kind = StatisticKind::Raw;
  double target_variance = 0.0;
  double ks_distance = 0.0;
  double sample_mean = 0.0;
  double sample_var = 0.0;
  double max_abs = 0.0;
  bool degenerate = false;
};

/// tol_degenerate < 0 selects the default 1/sqrt(n_steps), the natural scale
/// for bounded-increment chains with zero long-run variance.
CltTestResult clt_test(const TrajectoryBatch& batch, StatisticKind kind, double target_variance,
                       double tol_degenerate = -1.0);

/// Groups paths by endpoint pair and compares group means of S_n against the
/// exact bridge expectations. Groups smaller than min_group_size are skipped.
struct BridgeDeviation {
  double max_std_dev = 0.0;
  int n_groups = 0;
  int n_skipped = 0;
  int worst_x0 = -1;
  int worst_xn = -1;
};

BridgeDeviation empirical_bridge_check(const ChainModel& chain, const TrajectoryBatch& batch,
                                       int min_group_size = 16);

double normal_cdf(double z);

/// KS distance of a sample against the centered normal with the given variance.
double ks_distance_vs_normal(std::vector<double> sample, double variance);

/// Calibration helper: KS distances of `reps` batches of true N(0,1) samples
/// of size n_samples; returns the q-quantile. Pins what "close to normal"
/// means at a given sample size.
double ks_calibration_quantile(std::uint64_t seed, int n_samples, int reps, double q);

}  // namespace mclab

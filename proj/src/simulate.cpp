#include "mclab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

namespace mclab {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SplitMix64::next() {
  state += 0x9E3779B97F4A7C15ULL;
  return mix64(state);
}

double SplitMix64::next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
  // substream(seed, i) = mix(mix(seed ^ golden*(i+1)) + golden); two finalizer
  // rounds keep neighbouring indices uncorrelated.
  const std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
  return mix64(mix64(master ^ (golden * (index + 1))) + golden);
}

namespace {

/// First index y with u < cdf[y]; cdf is the running row sum in state order.
int sample_cdf(const std::vector<double>& cdf, double u) {
  for (std::size_t y = 0; y < cdf.size(); ++y) {
    if (u < cdf[y]) return static_cast<int>(y);
  }
  return static_cast<int>(cdf.size()) - 1;
}

}  // namespace

TrajectoryBatch simulate(const ChainModel& chain, int n_steps, int n_paths, std::uint64_t seed,
                         int n_workers) {
  if (n_steps < 1 || n_paths < 1) throw Error("simulate requires n_steps >= 1 and n_paths >= 1");
  const int s = chain.size();

  std::vector<double> init_cdf(s);
  double acc = 0.0;
  for (int x = 0; x < s; ++x) {
    acc += chain.stationary(x);
    init_cdf[x] = acc;
  }
  std::vector<std::vector<double>> row_cdf(s, std::vector<double>(s));
  for (int x = 0; x < s; ++x) {
    acc = 0.0;
    for (int y = 0; y < s; ++y) {
      acc += chain.kernel(x, y);
      row_cdf[x][y] = acc;
    }
  }

  const BridgeTable bridge = bridge_table(chain, n_steps);

  TrajectoryBatch batch;
  batch.seed = seed;
  batch.n_steps = n_steps;
  batch.n_paths = n_paths;
  batch.x0.resize(n_paths);
  batch.xn.resize(n_paths);
  batch.sums.resize(n_paths);
  batch.centered.resize(n_paths);

  // Paths are independent work units with their own substream and their own
  // output slots; the worker count cannot change a single bit of the batch.
  const auto run_range = [&](int lo, int hi) {
    for (int p = lo; p < hi; ++p) {
      SplitMix64 rng{derive_stream(seed, static_cast<std::uint64_t>(p))};
      int x = sample_cdf(init_cdf, rng.next_unit());
      batch.x0[p] = x;
      double sum = 0.0;
      for (int step = 0; step < n_steps; ++step) {
        x = sample_cdf(row_cdf[x], rng.next_unit());
        sum += chain.observable(x);
      }
      batch.xn[p] = x;
      batch.sums[p] = sum;
      batch.centered[p] = sum - bridge.values(batch.x0[p], x);
    }
  };

  n_workers = std::max(1, std::min(n_workers, n_paths));
  if (n_workers == 1) {
    run_range(0, n_paths);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(n_workers);
    const int stride = (n_paths + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
      const int lo = w * stride;
      const int hi = std::min(n_paths, lo + stride);
      if (lo < hi) workers.emplace_back(run_range, lo, hi);
    }
    for (std::thread& t : workers) t.join();
  }
  return batch;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_distance_vs_normal(std::vector<double> sample, double variance) {
  std::sort(sample.begin(), sample.end());
  const double sd = std::sqrt(variance);
  const double n = static_cast<double>(sample.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = normal_cdf(sample[i] / sd);
    ks = std::max(ks, std::abs((i + 1) / n - cdf));
    ks = std::max(ks, std::abs(cdf - i / n));
  }
  return ks;
}

CltTestResult clt_test(const TrajectoryBatch& batch, StatisticKind kind, double target_variance,
                       double tol_degenerate) {
  if (batch.n_paths < 1) throw Error("clt_test requires a nonempty batch");
  if (target_variance < 0.0) throw Error("clt_test target variance must be nonnegative");
  const std::vector<double>& src = kind == StatisticKind::Raw ? batch.sums : batch.centered;

  const double root_n = std::sqrt(static_cast<double>(batch.n_steps));
  std::vector<double> stats(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) stats[i] = src[i] / root_n;

  CltTestResult out;
  out.kind = kind;
  out.target_variance = target_variance;
  double mean = 0.0, max_abs = 0.0;
  for (const double v : stats) {
    mean += v;
    max_abs = std::max(max_abs, std::abs(v));
  }
  mean /= stats.size();
  double m2 = 0.0;
  for (const double v : stats) m2 += (v - mean) * (v - mean);
  out.sample_mean = mean;
  out.sample_var = stats.size() > 1 ? m2 / (stats.size() - 1) : 0.0;
  out.max_abs = max_abs;

  Tolerances tol;
  out.degenerate = target_variance < tol.degenerate_variance;
  if (out.degenerate) {
    if (tol_degenerate < 0.0) tol_degenerate = 1.0 / root_n;
    out.ks_distance = max_abs <= tol_degenerate ? 0.0 : 1.0;
    return out;
  }
  out.ks_distance = ks_distance_vs_normal(std::move(stats), target_variance);
  return out;
}

BridgeDeviation empirical_bridge_check(const ChainModel& chain, const TrajectoryBatch& batch,
                                       int min_group_size) {
  const BridgeTable bridge = bridge_table(chain, batch.n_steps);
  struct Group {
    long count = 0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  std::map<std::pair<int, int>, Group> groups;
  for (int p = 0; p < batch.n_paths; ++p) {
    Group& g = groups[{batch.x0[p], batch.xn[p]}];
    ++g.count;
    const double d = batch.sums[p] - g.mean;
    g.mean += d / g.count;
    g.m2 += d * (batch.sums[p] - g.mean);
  }

  BridgeDeviation out;
  for (const auto& [key, g] : groups) {
    if (g.count < min_group_size) {
      ++out.n_skipped;
      continue;
    }
    ++out.n_groups;
    const double exact = bridge.values(key.first, key.second);
    const double sd = std::sqrt(g.m2 / (g.count - 1));
    double dev;
    if (sd > 0.0) {
      dev = std::abs(g.mean - exact) / (sd / std::sqrt(static_cast<double>(g.count)));
    } else {
      // Deterministic group: the sample mean must hit the table exactly.
      dev = std::abs(g.mean - exact) <= 1e-9 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    if (dev > out.max_std_dev) {
      out.max_std_dev = dev;
      out.worst_x0 = key.first;
      out.worst_xn = key.second;
    }
  }
  return out;
}

double ks_calibration_quantile(std::uint64_t seed, int n_samples, int reps, double q) {
  if (n_samples < 2 || reps < 1) throw Error("ks_calibration_quantile needs samples and reps");
  std::vector<double> distances(reps);
  for (int r = 0; r < reps; ++r) {
    SplitMix64 rng{derive_stream(seed, static_cast<std::uint64_t>(r) + 0x10000000ULL)};
    std::vector<double> sample(n_samples);
    for (int i = 0; i < n_samples; i += 2) {
      // Box-Muller; exact normals so the quantile is a true reference.
      const double u1 = std::max(rng.next_unit(), 1e-300);
      const double u2 = rng.next_unit();
      const double radius = std::sqrt(-2.0 * std::log(u1));
      sample[i] = radius * std::cos(2.0 * M_PI * u2);
      if (i + 1 < n_samples) sample[i + 1] = radius * std::sin(2.0 * M_PI * u2);
    }
    distances[r] = ks_distance_vs_normal(std::move(sample), 1.0);
  }
  std::sort(distances.begin(), distances.end());
  const int idx = std::min(reps - 1, static_cast<int>(std::ceil(q * reps)) - 1);
  return distances[std::max(0, idx)];
}

}  // namespace mclab

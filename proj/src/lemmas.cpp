#include "mclab/lemmas.hpp"

#include <algorithm>
#include <cmath>

#include "mclab/bridge.hpp"
#include "mclab/diagnostics.hpp"
#include "mclab/simulate.hpp"

namespace mclab {

namespace {

/// Random full-support chain for chain-induced sequences; small sizes keep
/// the operator tables cheap at long horizons.
ChainModel random_small_chain(SplitMix64& rng, int max_states) {
  const int s = 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_states - 1));
  Eigen::MatrixXd kernel(s, s);
  for (int x = 0; x < s; ++x) {
    double row_sum = 0.0;
    for (int y = 0; y < s; ++y) {
      kernel(x, y) = 0.05 + rng.next_unit();
      row_sum += kernel(x, y);
    }
    for (int y = 0; y < s; ++y) kernel(x, y) /= row_sum;
  }
  Eigen::VectorXd f(s);
  for (int x = 0; x < s; ++x) f(x) = 2.0 * rng.next_unit() - 1.0;
  return build_chain(kernel, f);
}

}  // namespace

SubadditiveSequence gen_subadditive(std::uint64_t seed, int m, SubadditiveStyle style) {
  if (m < 4) throw Error("gen_subadditive requires m >= 4");
  SplitMix64 rng{seed};
  SubadditiveSequence seq;
  seq.values.resize(m);
  switch (style) {
    case SubadditiveStyle::ConcavePower: {
      const double alpha = 0.05 + 0.95 * rng.next_unit();
      const double c = std::exp(2.0 * rng.next_unit() - 1.0);
      for (int i = 1; i <= m; ++i) seq.values[i - 1] = c * std::pow(i, alpha);
      break;
    }
    case SubadditiveStyle::RandomMin: {
      seq.values[0] = 0.5 + rng.next_unit();
      for (int n = 2; n <= m; ++n) {
        double cap = seq.values[0] + seq.values[n - 2];
        for (int k = 2; 2 * k <= n; ++k) {
          cap = std::min(cap, seq.values[k - 1] + seq.values[n - k - 1]);
        }
        seq.values[n - 1] = cap * (0.35 + 0.65 * rng.next_unit());
      }
      break;
    }
    case SubadditiveStyle::ChainInduced: {
      const ChainModel chain = random_small_chain(rng, 7);
      const OperatorTable table = build_table(chain, m);
      const bool use_past = (rng.next() & 1ULL) != 0;
      for (int n = 1; n <= m; ++n) {
        seq.values[n - 1] = use_past ? cond_norm_past(chain, table, n)
                                     : cond_norm_future(chain, table, n);
      }
      break;
    }
  }
  return seq;
}

bool is_subadditive(const SubadditiveSequence& seq, double tol, int max_sum) {
  const int m = seq.size();
  const int cap = max_sum < 0 ? m : std::min(m, max_sum);
  for (int n = 1; n <= cap; ++n) {
    for (int k = 1; 2 * k <= n; ++k) {
      if (seq.at(n) > seq.at(k) + seq.at(n - k) + tol) return false;
    }
  }
  return true;
}

DyadicBoundCheck check_dyadic_bound(const SubadditiveSequence& seq) {
  const int m = seq.size();
  DyadicBoundCheck out;
  for (int i = 1; (1 << i) <= m / 4; ++i) {
    const double v = seq.at(1 << i);
    out.lhs += v * v / (1 << i);
  }
  double tail = 0.0;
  for (int k = 1; k <= m; ++k) {
    const double v = seq.at(k);
    tail += v * v / (static_cast<double>(k) * k);
  }
  out.rhs = 65.0 * tail;
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : (out.lhs > 0.0 ? 1e300 : 0.0);
  out.pass = out.lhs <= out.rhs * (1.0 + 1e-12) + 1e-12;
  return out;
}

HalfCountCheck check_half_count(const SubadditiveSequence& seq, int n) {
  if (n < 1 || n > seq.size()) throw Error("check_half_count index out of range");
  HalfCountCheck out;
  const double half = seq.at(n) / 2.0;
  for (int i = 1; i <= n; ++i) {
    if (seq.at(i) >= half - 1e-12) ++out.count;
  }
  out.required = n / 2.0;
  out.pass = static_cast<double>(out.count) >= out.required;
  return out;
}

PrefixSquareCheck check_prefix_square_bound(std::span<const double> a, int m) {
  if (m < 1 || m > static_cast<int>(a.size())) throw Error("check_prefix_square_bound bad m");
  PrefixSquareCheck out;
  double prefix = 0.0, sum_sq = 0.0;
  for (int k = 1; k <= m; ++k) {
    prefix += a[k - 1];
    sum_sq += a[k - 1] * a[k - 1];
    out.lhs += prefix * prefix / (static_cast<double>(k) * k);
  }
  out.rhs = 4.0 * sum_sq;
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : (out.lhs > 0.0 ? 1e300 : 0.0);
  out.pass = out.lhs <= out.rhs + 1e-12;
  return out;
}

std::vector<ImplicationRow> check_implications(const ChainModel& chain, const OperatorTable& table,
                                               int horizon, int bridge_horizon) {
  if (horizon > table.k_max) throw HorizonExceeded("implication horizon exceeds table");
  std::vector<ImplicationRow> rows;
  const auto add = [&rows](std::string name, double lhs, double rhs) {
    ImplicationRow row;
    row.name = std::move(name);
    row.lhs = lhs;
    row.rhs = rhs;
    row.pass = lhs <= rhs * (1.0 + 1e-12) + 1e-12;
    rows.push_back(std::move(row));
  };

  SubadditiveSequence past, future;
  past.values.resize(horizon);
  future.values.resize(horizon);
  double past_series = 0.0, future_series = 0.0;
  double mix_past_sq = 0.0, mix_future_sq = 0.0;
  for (int n = 1; n <= horizon; ++n) {
    past.values[n - 1] = cond_norm_past(chain, table, n);
    future.values[n - 1] = cond_norm_future(chain, table, n);
    past_series += past.values[n - 1] * past.values[n - 1] / (static_cast<double>(n) * n);
    future_series += future.values[n - 1] * future.values[n - 1] / (static_cast<double>(n) * n);
    mix_past_sq += std::pow(pi_norm(chain, table.qk_f[n]), 2);
    // The future prefix bound runs over (Q*)^j f for j = 0..n-1.
    mix_future_sq += std::pow(pi_norm(chain, table.qstar_k_f[n - 1]), 2);
  }

  add("single_step_bound_past", past_series, 4.0 * mix_past_sq);
  add("single_step_bound_future", future_series, 4.0 * mix_future_sq);

  const DyadicBoundCheck dy_past = check_dyadic_bound(past);
  add("dyadic_bound_past", dy_past.lhs, dy_past.rhs);
  const DyadicBoundCheck dy_future = check_dyadic_bound(future);
  add("dyadic_bound_future", dy_future.lhs, dy_future.rhs);

  const std::vector<double> bridge = bridge_curve(chain, bridge_horizon).norms;
  double past_trunc = 0.0, future_trunc = 0.0, bridge_series = 0.0;
  for (int n = 1; n <= bridge_horizon; ++n) {
    const double w = 1.0 / (static_cast<double>(n) * n);
    past_trunc += past.values[n - 1] * past.values[n - 1] * w;
    future_trunc += future.values[n - 1] * future.values[n - 1] * w;
    bridge_series += bridge[n - 1] * bridge[n - 1] * w;
  }
  add("pair_refines_past", past_trunc, bridge_series);
  add("pair_refines_future", future_trunc, bridge_series);
  return rows;
}

namespace {

struct WorstTracker {
  CampaignSummary summary;
  void record(std::uint64_t seed, double ratio, bool pass) {
    ++summary.n_cases;
    if (pass) ++summary.n_pass;
    if (ratio > summary.worst_ratio) {
      summary.worst_ratio = ratio;
      summary.worst_seed = seed;
    }
  }
};

std::vector<double> random_signed_sequence(SplitMix64& rng, int len, int style) {
  std::vector<double> a(len);
  for (int i = 0; i < len; ++i) {
    const double u = rng.next_unit();
    switch (style) {
      case 0: {  // gaussian-ish via Box-Muller
        const double u2 = rng.next_unit();
        a[i] = std::sqrt(-2.0 * std::log(std::max(u, 1e-300))) * std::cos(2.0 * M_PI * u2);
        break;
      }
      case 1:  // alternating sign
        a[i] = (i % 2 == 0 ? 1.0 : -1.0) * u;
        break;
      case 2:  // heavy tail
        a[i] = (rng.next() & 1ULL ? 1.0 : -1.0) * std::pow(std::max(u, 1e-12), -0.75);
        break;
      default:  // sparse
        a[i] = (rng.next() % 10 == 0) ? 2.0 * u - 1.0 : 0.0;
        break;
    }
  }
  return a;
}

}  // namespace

std::vector<CampaignSummary> run_lemma_campaigns(const LemmaCampaignOptions& opts) {
  WorstTracker dyadic, half_count, prefix, subadd;
  dyadic.summary.lemma_id = "dyadic_bound";
  half_count.summary.lemma_id = "half_count";
  prefix.summary.lemma_id = "prefix_square_bound";
  subadd.summary.lemma_id = "subadditivity";

  const SubadditiveStyle styles[] = {SubadditiveStyle::ConcavePower, SubadditiveStyle::RandomMin,
                                     SubadditiveStyle::ChainInduced};
  for (int si = 0; si < 3; ++si) {
    for (long c = 0; c < opts.cases_dyadic; ++c) {
      const std::uint64_t case_seed =
          derive_stream(opts.seed, 0x1000ULL * (si + 1) + static_cast<std::uint64_t>(c));
      const SubadditiveSequence seq = gen_subadditive(case_seed, opts.m_dyadic, styles[si]);
      const DyadicBoundCheck check = check_dyadic_bound(seq);
      dyadic.record(case_seed, check.ratio, check.pass);

      SplitMix64 rng{derive_stream(case_seed, 7)};
      const int n_probe[] = {opts.m_dyadic, opts.m_dyadic / 2,
                             1 + static_cast<int>(rng.next() % opts.m_dyadic)};
      for (const int n : n_probe) {
        const HalfCountCheck hc = check_half_count(seq, n);
        const double ratio = hc.count > 0 ? hc.required / hc.count : (hc.required > 0 ? 1e300 : 0);
        half_count.record(case_seed, ratio, hc.pass);
      }
    }
  }

  for (long c = 0; c < opts.cases_prefix; ++c) {
    const std::uint64_t case_seed = derive_stream(opts.seed, 0x8000ULL + static_cast<std::uint64_t>(c));
    SplitMix64 rng{case_seed};
    const int m = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(opts.m_prefix));
    const std::vector<double> a = random_signed_sequence(rng, m, static_cast<int>(c % 4));
    const PrefixSquareCheck check = check_prefix_square_bound(a, m);
    prefix.record(case_seed, check.ratio, check.pass);
  }

  for (long c = 0; c < opts.cases_subadd; ++c) {
    const std::uint64_t case_seed = derive_stream(opts.seed, 0x40000ULL + static_cast<std::uint64_t>(c));
    const SubadditiveSequence seq = gen_subadditive(case_seed, opts.m_subadd,
                                                    SubadditiveStyle::ChainInduced);
    const bool ok = is_subadditive(seq, 1e-10);
    const DyadicBoundCheck check = check_dyadic_bound(seq);
    subadd.record(case_seed, check.ratio, ok && check.pass);
  }

  return {dyadic.summary, half_count.summary, prefix.summary, subadd.summary};
}

}  // namespace mclab

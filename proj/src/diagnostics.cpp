#include "mclab/diagnostics.hpp"

#include <cmath>

namespace mclab {

double cond_norm_past(const ChainModel& chain, const OperatorTable& table, int n) {
  if (n < 1 || n > table.k_max) {
    throw HorizonExceeded("past norm at n = " + std::to_string(n) + " exceeds table horizon " +
                          std::to_string(table.k_max));
  }
  return pi_norm(chain, table.vn_f[n] - chain.observable);
}

double cond_norm_future(const ChainModel& chain, const OperatorTable& table, int n) {
  if (n < 1 || n - 1 > table.k_max) {
    throw HorizonExceeded("future norm at n = " + std::to_string(n) + " exceeds table horizon " +
                          std::to_string(table.k_max));
  }
  return pi_norm(chain, table.vnstar_f[n - 1]);
}

double cond_norm_bridge(const ChainModel& chain, int n) {
  return bridge_curve(chain, n).norms.back();
}

ConditionalNorms conditional_norms(const ChainModel& chain, const OperatorTable& table,
                                   int bridge_n_max, int mix_bridge_k_max) {
  ConditionalNorms out;
  out.past.reserve(table.k_max);
  out.future.reserve(table.k_max);
  out.mix_past.reserve(table.k_max);
  out.mix_future.reserve(table.k_max);
  for (int n = 1; n <= table.k_max; ++n) {
    out.past.push_back(cond_norm_past(chain, table, n));
    out.future.push_back(cond_norm_future(chain, table, n));
    out.mix_past.push_back(pi_norm(chain, table.qk_f[n]));
    out.mix_future.push_back(pi_norm(chain, table.qstar_k_f[n]));
  }
  if (bridge_n_max > 0) out.bridge = bridge_curve(chain, bridge_n_max).norms;
  if (mix_bridge_k_max > 0) out.mix_bridge = mixingale_norms(chain, mix_bridge_k_max);
  return out;
}

namespace {

std::vector<double> squared(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * v[i];
  return out;
}

ConditionRow series_row(const std::string& id, const std::vector<double>& terms,
                        SeriesWeight weight, const Tolerances& tol, double floor_scale) {
  const SeriesVerdict v = evaluate_condition(terms, weight, tol, floor_scale);
  ConditionRow row;
  row.id = id;
  row.n_terms = static_cast<int>(terms.size());
  row.partial_sum = v.partial_sums.back();
  row.tail_exponent = v.tail_exponent;
  row.verdict = v.verdict;
  return row;
}

ConditionRow membership_row(const std::string& id, const ChainModel& chain, OperatorSide side,
                            int n_max) {
  const RangeMembership m = sqrt_range_membership(chain, side, n_max);
  ConditionRow row;
  row.id = id;
  row.n_terms = n_max;
  row.partial_sum = m.partial_sum_norms.back();
  row.tail_exponent = m.tail_exponent;
  row.verdict = m.verdict;
  row.finite_rank_member = m.finite_rank_member;
  row.finite_rank_residual = m.finite_rank_residual;
  return row;
}

}  // namespace

std::vector<ConditionRow> condition_report(const ChainModel& chain, const OperatorTable& table,
                                           const DiagnosticsOptions& opts) {
  if (opts.horizon > table.k_max) throw HorizonExceeded("condition horizon exceeds table");
  if (opts.horizon < 64 || opts.bridge_horizon < 64 || opts.mix_bridge_horizon < 64) {
    throw TooFewTerms("condition horizons must be at least 64");
  }
  const ConditionalNorms norms =
      conditional_norms(chain, table, opts.bridge_horizon, opts.mix_bridge_horizon);
  const Tolerances& tol = chain.tol;
  const double fnorm = pi_norm(chain, chain.observable);
  const double fnorm2 = fnorm * fnorm;

  std::vector<double> past(norms.past.begin(), norms.past.begin() + opts.horizon);
  std::vector<double> future(norms.future.begin(), norms.future.begin() + opts.horizon);
  std::vector<double> mix_p(norms.mix_past.begin(), norms.mix_past.begin() + opts.horizon);
  std::vector<double> mix_f(norms.mix_future.begin(), norms.mix_future.begin() + opts.horizon);

  std::vector<ConditionRow> rows;
  rows.push_back(series_row("MW", past, SeriesWeight::InvThreeHalves, tol, fnorm));
  rows.push_back(series_row("C1", squared(past), SeriesWeight::InvSquare, tol, fnorm2));
  rows.push_back(series_row("C2", squared(future), SeriesWeight::InvSquare, tol, fnorm2));
  rows.push_back(series_row("TWO_MIX_P", squared(mix_p), SeriesWeight::None, tol, fnorm2));
  rows.push_back(series_row("TWO_MIX_F", squared(mix_f), SeriesWeight::None, tol, fnorm2));
  rows.push_back(membership_row("SQRT_P", chain, OperatorSide::Forward, opts.horizon));
  rows.push_back(membership_row("SQRT_F", chain, OperatorSide::Adjoint, opts.horizon));
  rows.push_back(series_row("BAD", squared(norms.bridge), SeriesWeight::InvSquare, tol, fnorm2));
  rows.push_back(series_row("MIXINGALE", squared(norms.mix_bridge), SeriesWeight::None, tol, fnorm2));
  return rows;
}

}  // namespace mclab

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mclab/bridge.hpp"
#include "mclab/chain.hpp"
#include "mclab/conditions.hpp"
#include "mclab/operators.hpp"

namespace mclab {

/// Exact conditional-expectation norms entering the summability conditions.
/// All sequences are indexed from n = 1 (entry i holds n = i + 1 - 1 = i+1).
struct ConditionalNorms {
  std::vector<double> past;        ///< ||E(S_n | xi_0)||
  std::vector<double> future;      ///< ||E(S_n | xi_n)||
  std::vector<double> bridge;      ///< ||E(S_n | xi_0, xi_n)||
  std::vector<double> mix_past;    ///< ||E(X_k | xi_0)|| = ||Q^k f||
  std::vector<double> mix_future;  ///< ||E(X_{-k} | xi_0)|| = ||(Q*)^k f||
  std::vector<double> mix_bridge;  ///< ||E(X_0 | xi_{-k}, xi_k)||
};

/// E(S_n | xi_0) = sum_{k=1..n} Q^k f(xi_0), so the norm is
/// pi_norm(V_n f - f). Throws HorizonExceeded past the table horizon.
double cond_norm_past(const ChainModel& chain, const OperatorTable& table, int n);

/// E(S_n | xi_n) = sum_{j=0..n-1} (Q*)^j f(xi_n); returns pi_norm(V*_{n-1} f).
double cond_norm_future(const ChainModel& chain, const OperatorTable& table, int n);

/// Bridge norm at a single n (dense powers; see bridge_curve for bulk use).
double cond_norm_bridge(const ChainModel& chain, int n);

ConditionalNorms conditional_norms(const ChainModel& chain, const OperatorTable& table,
                                   int bridge_n_max, int mix_bridge_k_max);

struct DiagnosticsOptions {
  int horizon = 4096;            ///< past/future/mix horizons (also sqrt series length)
  int bridge_horizon = 256;      ///< pair-conditioned series horizon (dense powers)
  int mix_bridge_horizon = 256;
};

/// One row per summability condition, in the report wire format.
struct ConditionRow {
  std::string id;  ///< MW, C1, C2, TWO_MIX_P, TWO_MIX_F, SQRT_P, SQRT_F, BAD, MIXINGALE
  int n_terms = 0;
  double partial_sum = 0.0;
  double tail_exponent = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<bool> finite_rank_member;      ///< SQRT rows only
  std::optional<double> finite_rank_residual;  ///< SQRT rows only
};

std::vector<ConditionRow> condition_report(const ChainModel& chain, const OperatorTable& table,
                                           const DiagnosticsOptions& opts);

}  // namespace mclab

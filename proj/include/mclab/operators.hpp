#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mclab/chain.hpp"
#include "mclab/conditions.hpp"

namespace mclab {

/// Iterated operator images of the observable: Q^k f, (Q*)^k f and the
/// partial-sum operators V_n f = (I + Q + ... + Q^n) f, V_n* f. Built by
/// repeated matrix-vector products; no matrix power is materialized.
/// Immutable after construction and shareable between threads.
struct OperatorTable {
  int k_max = 0;
  std::vector<Eigen::VectorXd> qk_f;       ///< index k = 0..k_max, qk_f[0] = f
  std::vector<Eigen::VectorXd> qstar_k_f;
  std::vector<Eigen::VectorXd> vn_f;       ///< vn_f[n] = vn_f[n-1] + qk_f[n]
  std::vector<Eigen::VectorXd> vnstar_f;
};

OperatorTable build_table(const ChainModel& chain, int k_max);

/// Coefficients of the power series 1 - sqrt(1-x) = sum_{n>=1} delta_n x^n.
/// delta_1 = 1/2 and delta_{n+1} = delta_n (2n-1)/(2n+2); all positive and
/// summing to 1.
struct SqrtSeries {
  int n_trunc = 0;
  std::vector<double> delta;  ///< delta[n] = delta_n for n = 1..n_trunc; delta[0] unused
  double partial_mass = 0.0;  ///< sum of the stored coefficients, < 1
};

SqrtSeries sqrt_coefficients(int n_trunc);

struct SqrtApplyResult {
  Eigen::VectorXd value;
  /// Truncation residual bound (1 - partial_mass) * pi_norm(g); the dropped
  /// tail applies contractions to g, so its norm is at most this.
  double residual_bound = 0.0;
};

/// Truncated series for sqrt(I - Q) applied to g:
/// g - sum_{n<=n_trunc} delta_n Q^n g.
SqrtApplyResult apply_sqrt(const ChainModel& chain, const Eigen::VectorXd& g, int n_trunc);

enum class OperatorSide { Forward, Adjoint };

/// Diagnostic for membership of f in the range of sqrt(I - Q) (or of
/// sqrt(I - Q*)), via convergence of s_n = sum_{k<=n} k^{-1/2} Q^k f.
///
/// Two separately-labeled answers are reported. The truncation diagnostic
/// classifies the dyadic Cauchy increments ||s_{2n} - s_n||: polynomial decay
/// means the octave sums are geometrically summable (convergent), growth
/// means the partial sums are not Cauchy (divergent); the critical slope is
/// 0. The exact finite-state answer solves (I - Q) g = f by rank-revealing
/// least squares: at finite S the range of the square root coincides with the
/// range of I - Q on the zero-mean subspace.
struct RangeMembership {
  OperatorSide side = OperatorSide::Forward;
  int n_max = 0;
  std::vector<double> partial_sum_norms;  ///< ||s_{2^j}||, j = 0..J
  std::vector<double> cauchy_increments;  ///< ||s_{2^{j+1}} - s_{2^j}||
  double tail_exponent = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  bool finite_rank_member = false;
  double finite_rank_residual = 0.0;      ///< relative residual of the solve
};

RangeMembership sqrt_range_membership(const ChainModel& chain, OperatorSide side, int n_max);

}  // namespace mclab

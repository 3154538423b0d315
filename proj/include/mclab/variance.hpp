#pragma once

#include <optional>
#include <vector>

#include "mclab/chain.hpp"
#include "mclab/operators.hpp"

namespace mclab {

/// Autocovariances gamma(k) = <f, Q^k f>_pi for k = 0..k_max.
std::vector<double> autocovariance(const ChainModel& chain, const OperatorTable& table, int k_max);

/// Exact E(S_n^2)/n via the stationary covariance expansion
/// (1/n)[n <f,f> + 2 sum_{k<n} (n-k) <f, Q^k f>].
double exact_variance(const ChainModel& chain, const OperatorTable& table, int n);

/// E(S_n^2)/n for every n = 1..n_max (prefix sums, O(n_max) after the table).
std::vector<double> variance_curve(const ChainModel& chain, const OperatorTable& table, int n_max);

/// Long-run variance in closed form: solve (I - Q) g = f on the zero-mean
/// subspace (pinned by <g, 1>_pi = 0) and return 2 <f,g>_pi - <f,f>_pi.
/// Throws SingularSystem when I - Q is singular there.
double sigma2_closed_form(const ChainModel& chain);

/// The cross term E[E(S_m | xi_m) E(Sbar_m | xi_m)] with
/// Sbar_m = X_{m+1} + ... + X_{2m}, evaluated on the state space as
/// <V*_{m-1} f, (V_m - I) f>_pi.
double cross_term_operator(const ChainModel& chain, const OperatorTable& table, int m);

/// Same cross term from the covariance expansion (lag sums); an independent
/// evaluation route used as an oracle.
double cross_term_covariance(const ChainModel& chain, const OperatorTable& table, int m);

/// Doubling recursion for the variance along n = 2^r:
/// E(S_{2m}^2) = 2 E(S_m^2) + 2 E[E(S_m|xi_m) E(Sbar_m|xi_m)],
/// together with the weighted product curve
/// Delta_{2^r} = sum_{i<r} ||E(S_{2^i}|xi_0)|| ||E(S_{2^i}|xi_{2^i})|| / 2^i
/// and the dyadic bound E(S_{2^r}^2) <= 2^r [E(X_0^2) + Delta_{2^r}].
struct DyadicRecursion {
  int r_max = 0;
  std::vector<double> var_over_n;    ///< E(S_{2^r}^2)/2^r, r = 0..r_max
  std::vector<double> delta_curve;   ///< Delta_{2^r}, r = 0..r_max
  std::vector<double> bound_slack;   ///< 2^r [E(X_0^2)+Delta] - E(S_{2^r}^2)
  double sigma2_dyadic = 0.0;        ///< last value of var_over_n
  bool bound_holds = true;
};

DyadicRecursion dyadic_recursion(const ChainModel& chain, const OperatorTable& table, int r_max);

/// Limits eta^2 = lim (1/n) ||E(S_n|xi_0,xi_n)||^2 and
/// theta^2 = lim (1/n) ||S_n - E(S_n|xi_0,xi_n)||^2, estimated by Richardson
/// extrapolation over the last three points of a dyadic grid. The two curves
/// decompose E(S_n^2)/n orthogonally, so theta2_curve = var - eta2_curve.
/// Point estimates are refused (nullopt) when the chain is not totally
/// ergodic; curves are still emitted.
struct EtaTheta {
  std::vector<int> grid;
  std::vector<double> eta2_curve;
  std::vector<double> theta2_curve;
  std::optional<double> eta2;
  std::optional<double> theta2;
  double eta2_spread = 0.0;   ///< difference of successive extrapolants
  double theta2_spread = 0.0;
  bool refused = false;
};

EtaTheta eta2_theta2(const ChainModel& chain, const OperatorTable& table, std::vector<int> grid);

/// Reassembly of E(S_n^2) from the binary expansion of n: blocks
/// U_{2^i} of consecutive variables sized by the set bits of n, diagonal part
/// I_n = sum_i E(U_{2^i}^2) and cross part J_n. Each cross term carries its
/// conditioning bound ||E(S_{2^i}|xi_{2^i})|| ||E(S_{2^j}|xi_0)|| (i < j).
struct BlockTerm {
  int i = 0, j = 0;          ///< block exponents, i < j (block 2^i is earlier)
  double value = 0.0;        ///< E(U_{2^i} U_{2^j})
  double holder_bound = 0.0;
};

struct BlockDecomposition {
  long n = 0;
  std::vector<int> exponents;  ///< set bits of n, ascending
  double i_sum = 0.0;          ///< I_n
  double j_sum = 0.0;          ///< J_n (both orders of each pair)
  std::vector<BlockTerm> cross_terms;
  double total() const { return i_sum + j_sum; }  ///< E(S_n^2)
};

BlockDecomposition variance_via_blocks(const ChainModel& chain, const OperatorTable& table, long n);

}  // namespace mclab

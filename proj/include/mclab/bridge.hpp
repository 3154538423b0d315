#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mclab/chain.hpp"

namespace mclab {

/// Conditional expectations of S_n given both endpoints of the trajectory.
///
/// values(x,y) = E(S_n | xi_0 = x, xi_n = y) on reachable pairs (Q^n(x,y) > 0)
/// and 0 elsewhere; unreachable pairs carry no mass in the pair law
/// pi(x) Q^n(x,y), so the convention is invisible in every norm.
struct BridgeTable {
  int n = 0;
  Eigen::MatrixXd values;
  Eigen::MatrixXd pair_prob;  ///< Q^n
  double norm = 0.0;          ///< L2 norm of values under the pair law
};

struct BridgeCurve {
  std::vector<double> norms;  ///< norms[i] = ||E(S_n | xi_0, xi_n)|| at n = i+1
  BridgeTable last;           ///< tables at the final n
};

/// Bridge norms for every n = 1..n_max. Dense-power cost O(n_max * S^3):
/// with N_n(x,y) = Q^n(x,y) E(S_n|x,y) the recursion N_{n+1} = N_n Q + Q^{n+1} diag(f)
/// advances one step per matrix product. Summation order is fixed, so results
/// do not depend on scheduling.
BridgeCurve bridge_curve(const ChainModel& chain, int n_max);

BridgeTable bridge_table(const ChainModel& chain, int n);

/// ||E(X_0 | xi_{-k}, xi_k)|| for k = 1..k_max, via
/// E(X_0 | xi_{-k} = x, xi_k = y) = sum_s f(s) Q^k(x,s) Q^k(s,y) / Q^{2k}(x,y)
/// under the pair law pi(x) Q^{2k}(x,y).
std::vector<double> mixingale_norms(const ChainModel& chain, int k_max);

double mixingale_norm(const ChainModel& chain, int k);

}  // namespace mclab

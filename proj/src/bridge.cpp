#include "mclab/bridge.hpp"

#include <cmath>

namespace mclab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kMassFloor = 1e-300;

/// L2 norm of the conditional table under the pair law pi(x) P(x,y), where
/// the table is given through its numerator N(x,y) = P(x,y) * value(x,y).
/// Unreachable pairs have N exactly 0 (every path product vanishes) and are
/// skipped. Fixed summation order: x outer, y inner.
double pair_norm(const VectorXd& pi, const MatrixXd& numer, const MatrixXd& pair_prob) {
  const int s = static_cast<int>(pi.size());
  double acc = 0.0;
  for (int x = 0; x < s; ++x) {
    for (int y = 0; y < s; ++y) {
      const double p = pair_prob(x, y);
      if (p <= kMassFloor) continue;
      const double v = numer(x, y) / p;
      acc += pi(x) * p * v * v;
    }
  }
  return std::sqrt(std::max(0.0, acc));
}

MatrixXd ratio_table(const MatrixXd& numer, const MatrixXd& pair_prob) {
  MatrixXd vals = MatrixXd::Zero(numer.rows(), numer.cols());
  for (int x = 0; x < numer.rows(); ++x) {
    for (int y = 0; y < numer.cols(); ++y) {
      if (pair_prob(x, y) > kMassFloor) vals(x, y) = numer(x, y) / pair_prob(x, y);
    }
  }
  return vals;
}

}  // namespace

BridgeCurve bridge_curve(const ChainModel& chain, int n_max) {
  if (n_max < 1) throw Error("bridge_curve requires n_max >= 1");
  BridgeCurve out;
  out.norms.reserve(n_max);

  const MatrixXd& q = chain.kernel;
  const VectorXd& f = chain.observable;
  // N_n(x,y) = sum_{i=1..n} [Q^i diag(f) Q^{n-i}](x,y) = Q^n(x,y) E(S_n|x,y);
  // advance with N_{n+1} = N_n Q + Q^{n+1} diag(f).
  MatrixXd pair_prob = q;
  MatrixXd numer = q * f.asDiagonal();
  out.norms.push_back(pair_norm(chain.stationary, numer, pair_prob));
  for (int n = 2; n <= n_max; ++n) {
    const MatrixXd next_prob = pair_prob * q;
    numer = numer * q + next_prob * f.asDiagonal();
    pair_prob = next_prob;
    out.norms.push_back(pair_norm(chain.stationary, numer, pair_prob));
  }
  out.last.n = n_max;
  out.last.pair_prob = pair_prob;
  out.last.values = ratio_table(numer, pair_prob);
  out.last.norm = out.norms.back();
  return out;
}

BridgeTable bridge_table(const ChainModel& chain, int n) { return bridge_curve(chain, n).last; }

std::vector<double> mixingale_norms(const ChainModel& chain, int k_max) {
  if (k_max < 1) throw Error("mixingale_norms requires k_max >= 1");
  const MatrixXd& q = chain.kernel;
  const MatrixXd q2 = q * q;
  MatrixXd qk = q;        // Q^k
  MatrixXd q2k = q2;      // Q^{2k}
  std::vector<double> out;
  out.reserve(k_max);
  for (int k = 1; k <= k_max; ++k) {
    if (k > 1) {
      qk = qk * q;
      q2k = q2k * q2;
    }
    const MatrixXd numer = qk * chain.observable.asDiagonal() * qk;
    out.push_back(pair_norm(chain.stationary, numer, q2k));
  }
  return out;
}

double mixingale_norm(const ChainModel& chain, int k) { return mixingale_norms(chain, k).back(); }

}  // namespace mclab

#include "mclab/operators.hpp"

#include <cmath>
#include <limits>

namespace mclab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

OperatorTable build_table(const ChainModel& chain, int k_max) {
  if (k_max < 1) throw Error("build_table requires k_max >= 1");
  OperatorTable t;
  t.k_max = k_max;
  const MatrixXd qstar = adjoint(chain);
  t.qk_f.reserve(k_max + 1);
  t.qstar_k_f.reserve(k_max + 1);
  t.vn_f.reserve(k_max + 1);
  t.vnstar_f.reserve(k_max + 1);
  t.qk_f.push_back(chain.observable);
  t.qstar_k_f.push_back(chain.observable);
  t.vn_f.push_back(chain.observable);
  t.vnstar_f.push_back(chain.observable);
  for (int k = 1; k <= k_max; ++k) {
    t.qk_f.push_back(chain.kernel * t.qk_f.back());
    t.qstar_k_f.push_back(qstar * t.qstar_k_f.back());
    t.vn_f.push_back(t.vn_f.back() + t.qk_f.back());
    t.vnstar_f.push_back(t.vnstar_f.back() + t.qstar_k_f.back());
  }
  return t;
}

SqrtSeries sqrt_coefficients(int n_trunc) {
  if (n_trunc < 1) throw Error("sqrt_coefficients requires n_trunc >= 1");
  SqrtSeries s;
  s.n_trunc = n_trunc;
  s.delta.assign(n_trunc + 1, 0.0);
  s.delta[1] = 0.5;
  for (int n = 2; n <= n_trunc; ++n) {
    // delta_{n} = delta_{n-1} (2n-3)/(2n); stable multiplicative form.
    s.delta[n] = s.delta[n - 1] * (2.0 * n - 3.0) / (2.0 * n);
  }
  double mass = 0.0;
  for (int n = 1; n <= n_trunc; ++n) mass += s.delta[n];
  s.partial_mass = mass;
  return s;
}

SqrtApplyResult apply_sqrt(const ChainModel& chain, const Eigen::VectorXd& g, int n_trunc) {
  if (g.size() != chain.size()) throw LengthMismatch("apply_sqrt argument length mismatch");
  const SqrtSeries series = sqrt_coefficients(n_trunc);
  SqrtApplyResult out;
  out.value = g;
  VectorXd power = g;
  for (int n = 1; n <= n_trunc; ++n) {
    power = chain.kernel * power;
    out.value -= series.delta[n] * power;
  }
  out.residual_bound = (1.0 - series.partial_mass) * pi_norm(chain, g);
  return out;
}

namespace {

/// Slope of log(increment) against log(block length) over the last few
/// dyadic increments; -inf when they are all zero, NaN when underdetermined.
double increment_slope(const std::vector<double>& increments, double floor_scale) {
  const int j_max = static_cast<int>(increments.size());
  const int lo = std::max(0, j_max - 3);
  double peak = floor_scale;
  for (const double c : increments) peak = std::max(peak, c);
  const double floor = peak * 1e-13;  // numerical zeros; see tail_slope
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int j = lo; j < j_max; ++j) {
    if (increments[j] <= floor) continue;
    const double x = std::log(std::pow(2.0, j));
    const double y = std::log(increments[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  bool any_positive = false;
  for (int j = lo; j < j_max; ++j) any_positive = any_positive || increments[j] > floor;
  if (!any_positive) return -std::numeric_limits<double>::infinity();
  if (m == 1) {
    double survivor = 0.0;
    for (int j = lo; j < j_max; ++j) survivor = std::max(survivor, increments[j]);
    if (survivor <= 1000.0 * floor) return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / denom;
}

}  // namespace

RangeMembership sqrt_range_membership(const ChainModel& chain, OperatorSide side, int n_max) {
  if (n_max < 16) throw Error("sqrt_range_membership requires n_max >= 16");
  RangeMembership out;
  out.side = side;
  out.n_max = n_max;

  const MatrixXd op = side == OperatorSide::Forward ? chain.kernel : adjoint(chain);
  VectorXd s = VectorXd::Zero(chain.size());
  VectorXd power = chain.observable;
  VectorXd prev_snapshot = s;
  int next_pow = 1;
  for (int k = 1; k <= n_max; ++k) {
    power = op * power;
    s += power / std::sqrt(static_cast<double>(k));
    if (k == next_pow) {
      out.partial_sum_norms.push_back(pi_norm(chain, s));
      if (next_pow > 1) out.cauchy_increments.push_back(pi_norm(chain, s - prev_snapshot));
      prev_snapshot = s;
      next_pow *= 2;
    }
  }

  out.tail_exponent = increment_slope(out.cauchy_increments, pi_norm(chain, chain.observable));
  // Vanishing increments make the octave sums geometrically summable; the
  // critical slope for that criterion is 0.
  out.verdict = classify_slope(out.tail_exponent, 0.0, chain.tol.classifier_margin);

  // Minimal-norm least squares handles the rank-deficient case (reducible
  // kernels) without poisoning the residual.
  MatrixXd a = MatrixXd::Identity(chain.size(), chain.size()) - op;
  const VectorXd g = a.completeOrthogonalDecomposition().solve(chain.observable);
  const double fnorm = pi_norm(chain, chain.observable);
  const double residual = pi_norm(chain, a * g - chain.observable) / (fnorm > 0 ? fnorm : 1.0);
  out.finite_rank_residual = g.allFinite() && std::isfinite(residual) ? residual : 1.0;
  out.finite_rank_member = out.finite_rank_residual <= 1e-10;
  return out;
}

}  // namespace mclab

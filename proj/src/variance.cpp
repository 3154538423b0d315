#include "mclab/variance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mclab/bridge.hpp"
#include "mclab/diagnostics.hpp"

namespace mclab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<double> autocovariance(const ChainModel& chain, const OperatorTable& table,
                                   int k_max) {
  if (k_max > table.k_max) throw HorizonExceeded("autocovariance horizon exceeds table");
  std::vector<double> gamma(k_max + 1);
  for (int k = 0; k <= k_max; ++k) gamma[k] = pi_inner(chain, chain.observable, table.qk_f[k]);
  return gamma;
}

double exact_variance(const ChainModel& chain, const OperatorTable& table, int n) {
  if (n < 1 || n - 1 > table.k_max) throw HorizonExceeded("exact_variance horizon exceeds table");
  double acc = static_cast<double>(n) * pi_inner(chain, chain.observable, chain.observable);
  for (int k = 1; k < n; ++k) {
    acc += 2.0 * (n - k) * pi_inner(chain, chain.observable, table.qk_f[k]);
  }
  return acc / n;
}

std::vector<double> variance_curve(const ChainModel& chain, const OperatorTable& table,
                                   int n_max) {
  if (n_max < 1 || n_max - 1 > table.k_max) throw HorizonExceeded("variance_curve exceeds table");
  const std::vector<double> gamma = autocovariance(chain, table, n_max - 1);
  std::vector<double> out(n_max);
  double sum_gamma = 0.0;    // sum_{k<=n-1} gamma(k)
  double sum_k_gamma = 0.0;  // sum_{k<=n-1} k gamma(k)
  out[0] = gamma[0];
  for (int n = 2; n <= n_max; ++n) {
    sum_gamma += gamma[n - 1];
    sum_k_gamma += (n - 1) * gamma[n - 1];
    out[n - 1] = gamma[0] + 2.0 * (sum_gamma - sum_k_gamma / n);
  }
  return out;
}

double sigma2_closed_form(const ChainModel& chain) {
  const int s = chain.size();
  // Fundamental-matrix trick: I - Q + 1 pi^T is invertible exactly when I - Q
  // is invertible on the zero-mean subspace, and its solution of A g = f is
  // the zero-mean one.
  MatrixXd a = MatrixXd::Identity(s, s) - chain.kernel;
  a += VectorXd::Ones(s) * chain.stationary.transpose();
  const VectorXd g = a.colPivHouseholderQr().solve(chain.observable);
  const double fnorm = pi_norm(chain, chain.observable);
  const double residual = pi_norm(chain, a * g - chain.observable);
  if (!g.allFinite() || residual > 1e-8 * (1.0 + fnorm)) {
    throw SingularSystem("I - Q is singular on the zero-mean subspace");
  }
  double sigma2 = 2.0 * pi_inner(chain, chain.observable, g) -
                  pi_inner(chain, chain.observable, chain.observable);
  if (sigma2 < 0.0) {
    if (sigma2 < -1e-10) throw SingularSystem("closed-form variance came out negative");
    sigma2 = 0.0;
  }
  return sigma2;
}

double cross_term_operator(const ChainModel& chain, const OperatorTable& table, int m) {
  if (m < 1 || m > table.k_max) throw HorizonExceeded("cross term horizon exceeds table");
  return pi_inner(chain, table.vnstar_f[m - 1], table.vn_f[m] - chain.observable);
}

double cross_term_covariance(const ChainModel& chain, const OperatorTable& table, int m) {
  if (m < 1 || 2 * m - 1 > table.k_max) throw HorizonExceeded("cross term horizon exceeds table");
  const std::vector<double> gamma = autocovariance(chain, table, 2 * m - 1);
  double acc = 0.0;
  for (int d = 1; d <= 2 * m - 1; ++d) {
    const double count = std::min({d, m, 2 * m - d});
    acc += count * gamma[d];
  }
  return acc;
}

DyadicRecursion dyadic_recursion(const ChainModel& chain, const OperatorTable& table, int r_max) {
  if (r_max < 0) throw Error("dyadic_recursion requires r_max >= 0");
  if ((1L << r_max) > table.k_max) throw HorizonExceeded("dyadic horizon exceeds table");
  DyadicRecursion out;
  out.r_max = r_max;
  const double e0 = pi_inner(chain, chain.observable, chain.observable);

  std::vector<double> var_abs(r_max + 1);  // E(S_{2^r}^2)
  var_abs[0] = e0;
  for (int r = 1; r <= r_max; ++r) {
    const int m = 1 << (r - 1);
    var_abs[r] = 2.0 * var_abs[r - 1] + 2.0 * cross_term_operator(chain, table, m);
  }

  out.var_over_n.resize(r_max + 1);
  out.delta_curve.resize(r_max + 1);
  out.bound_slack.resize(r_max + 1);
  double delta = 0.0;
  for (int r = 0; r <= r_max; ++r) {
    if (r > 0) {
      const int m = 1 << (r - 1);
      delta += cond_norm_past(chain, table, m) * cond_norm_future(chain, table, m) / m;
    }
    const double scale = static_cast<double>(1L << r);
    out.var_over_n[r] = var_abs[r] / scale;
    out.delta_curve[r] = delta;
    out.bound_slack[r] = scale * (e0 + delta) - var_abs[r];
    if (out.bound_slack[r] < -1e-9 * (1.0 + std::abs(var_abs[r]))) out.bound_holds = false;
  }
  out.sigma2_dyadic = out.var_over_n[r_max];
  return out;
}

namespace {

std::optional<double> richardson(const std::vector<double>& a, bool refused, double* spread) {
  // Two successive Richardson extrapolants from the last three dyadic points;
  // their difference is the reported uncertainty.
  const std::size_t k = a.size();
  const double r1 = 2.0 * a[k - 2] - a[k - 3];
  const double r2 = 2.0 * a[k - 1] - a[k - 2];
  *spread = std::abs(r2 - r1);
  if (refused) return std::nullopt;
  double est = r2;
  if (est < 0.0 && est > -1e-9) est = 0.0;
  return est;
}

}  // namespace

EtaTheta eta2_theta2(const ChainModel& chain, const OperatorTable& table, std::vector<int> grid) {
  std::sort(grid.begin(), grid.end());
  if (grid.empty() || grid.front() < 1) throw Error("eta2_theta2 requires a nonempty grid");
  if (grid.back() > table.k_max) throw HorizonExceeded("eta grid exceeds table horizon");

  EtaTheta out;
  out.grid = grid;
  const std::vector<double> bridge = bridge_curve(chain, grid.back()).norms;
  for (const int n : grid) {
    const double b2 = bridge[n - 1] * bridge[n - 1];
    out.eta2_curve.push_back(b2 / n);
    out.theta2_curve.push_back(exact_variance(chain, table, n) - b2 / n);
  }
  out.refused = !classify(chain).totally_ergodic;
  bool dyadic = grid.size() >= 3;
  if (dyadic) {
    const std::size_t k = grid.size();
    dyadic = grid[k - 1] == 2 * grid[k - 2] && grid[k - 2] == 2 * grid[k - 3];
  }
  if (dyadic) {
    out.eta2 = richardson(out.eta2_curve, out.refused, &out.eta2_spread);
    out.theta2 = richardson(out.theta2_curve, out.refused, &out.theta2_spread);
  }
  return out;
}

BlockDecomposition variance_via_blocks(const ChainModel& chain, const OperatorTable& table,
                                       long n) {
  if (n < 1 || n - 1 > table.k_max) throw HorizonExceeded("block horizon exceeds table");
  BlockDecomposition out;
  out.n = n;
  for (int i = 0; i < 63; ++i) {
    if ((n >> i) & 1L) out.exponents.push_back(i);
  }
  // Block for exponent e_k covers positions (end_{k-1}, end_{k-1} + 2^{e_k}];
  // ascending exponents give the block layout of the binary expansion.
  std::vector<long> starts;
  long end = 0;
  for (const int e : out.exponents) {
    starts.push_back(end);
    end += 1L << e;
  }

  const std::vector<double> gamma = autocovariance(chain, table, static_cast<int>(n - 1));
  for (std::size_t k = 0; k < out.exponents.size(); ++k) {
    const long m = 1L << out.exponents[k];
    out.i_sum += m * exact_variance(chain, table, static_cast<int>(m));
  }
  for (std::size_t ka = 0; ka < out.exponents.size(); ++ka) {
    for (std::size_t kb = ka + 1; kb < out.exponents.size(); ++kb) {
      const long pa = starts[ka], a = 1L << out.exponents[ka];
      const long pb = starts[kb], b = 1L << out.exponents[kb];
      double value = 0.0;
      for (long d = pb + 1 - (pa + a); d <= pb + b - (pa + 1); ++d) {
        const long lo = std::max(pa + 1, pb + 1 - d);
        const long hi = std::min(pa + a, pb + b - d);
        if (hi < lo) continue;
        value += static_cast<double>(hi - lo + 1) * gamma[static_cast<std::size_t>(d)];
      }
      BlockTerm term;
      term.i = out.exponents[ka];
      term.j = out.exponents[kb];
      term.value = value;
      term.holder_bound = cond_norm_future(chain, table, static_cast<int>(a)) *
                          cond_norm_past(chain, table, static_cast<int>(b));
      out.cross_terms.push_back(term);
      out.j_sum += 2.0 * value;
    }
  }
  return out;
}

}  // namespace mclab

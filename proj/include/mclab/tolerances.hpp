#pragma once

namespace mclab {

/// Central tolerance configuration. Every numeric acceptance threshold used by
/// model validation and classification lives here so property tests can pin it.
struct Tolerances {
  double stochastic = 1e-12;       ///< kernel rows must sum to 1 within this
  double fixed_point = 1e-10;      ///< |pi Q - pi| for the stationary law
  double mean = 1e-10;             ///< pi-mean of the observable after centering
  double normal = 1e-10;           ///< reversibility / normality defect cutoff
  double duality = 1e-10;          ///< <Qg,h> vs <g,Q*h> in property checks
  double degenerate_variance = 1e-12;  ///< below this a CLT target is degenerate
  double classifier_margin = 0.15;     ///< no-verdict band around the critical slope
  int stationary_direct_max = 2000;    ///< direct eigen-solve up to this size
};

}  // namespace mclab

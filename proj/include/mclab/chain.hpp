#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "mclab/errors.hpp"
#include "mclab/tolerances.hpp"

namespace mclab {

/// A stationary finite-state Markov chain together with a zero-mean observable.
///
/// `kernel` is row-stochastic, `stationary` is a full-support probability
/// vector fixed by the kernel, and `observable` has zero mean under the
/// stationary law. Instances are immutable after construction and safe to
/// share across concurrent readers; every operation on them is a pure
/// function of its inputs.
struct ChainModel {
  std::vector<std::string> states;
  Eigen::MatrixXd kernel;
  Eigen::VectorXd stationary;
  Eigen::VectorXd observable;
  /// Mean subtracted from the raw observable during construction (0 when the
  /// input was already centered).
  double recenter_shift = 0.0;
  Tolerances tol;

  int size() const { return static_cast<int>(kernel.rows()); }
};

struct ChainClassification {
  bool irreducible = false;
  bool aperiodic = false;
  bool ergodic = false;         ///< irreducible (finite stationary chain)
  bool totally_ergodic = false; ///< irreducible and aperiodic
  bool reversible = false;      ///< detailed balance holds
  bool normal = false;          ///< Q Q* = Q* Q on L^2(pi)
  double normality_defect = 0.0;
  int period = 0;               ///< period when irreducible, 0 otherwise
};

/// Validates the kernel, computes (or validates) the stationary law, and
/// re-centers the observable. The subtracted mean is recorded in the model.
///
/// Throws NonStochasticKernel, NoUniqueStationaryLaw, ZeroMassState,
/// InvalidStationaryLaw.
ChainModel build_chain(const Eigen::MatrixXd& kernel,
                       const Eigen::VectorXd& observable,
                       std::optional<Eigen::VectorXd> stationary = std::nullopt,
                       std::vector<std::string> states = {},
                       const Tolerances& tol = Tolerances{});

/// Stationary law of an irreducible kernel. Direct linear solve for sizes up
/// to tol.stationary_direct_max, lazy-chain power iteration above.
Eigen::VectorXd stationary_law(const Eigen::MatrixXd& kernel, const Tolerances& tol);

/// Time-reversed kernel Q*(x,y) = pi(y) Q(y,x) / pi(x). Row-stochastic, and
/// adjoint to Q for the pi-weighted inner product.
Eigen::MatrixXd adjoint(const ChainModel& chain);

/// The chain driven by Q* with the same stationary law and observable.
ChainModel adjoint_chain(const ChainModel& chain);

/// Sum_x pi(x) g(x) h(x). Throws LengthMismatch.
double pi_inner(const ChainModel& chain, const Eigen::VectorXd& g, const Eigen::VectorXd& h);
double pi_norm(const ChainModel& chain, const Eigen::VectorXd& g);

ChainClassification classify(const ChainModel& chain);

/// Chain-spec JSON ({"states":[...],"kernel":[[...]],"observable":[...],
/// "stationary":[...]}). The parser rejects non-finite numbers and ragged
/// kernel rows with a field diagnostic.
ChainModel parse_chain_spec(const std::string& text, const Tolerances& tol = Tolerances{});
ChainModel load_chain_spec(const std::string& path, const Tolerances& tol = Tolerances{});
std::string chain_spec_text(const ChainModel& chain);
void write_chain_spec(const ChainModel& chain, const std::string& path);

}  // namespace mclab

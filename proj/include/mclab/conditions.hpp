#pragma once

#include <span>
#include <string>
#include <vector>

#include "mclab/errors.hpp"
#include "mclab/tolerances.hpp"

namespace mclab {

/// Three-valued outcome of the tail-decay convergence classifier. A finite
/// truncation cannot certify an infinite series, so the classifier refuses a
/// verdict inside a margin around the critical slope.
enum class Verdict { Convergent, Divergent, Inconclusive };

const char* to_string(Verdict v);

enum class SeriesWeight { InvSquare, InvThreeHalves, None };

struct SeriesVerdict {
  std::vector<double> partial_sums;  ///< cumulative weighted sums, index n-1
  double tail_exponent = 0.0;        ///< log-log slope over the last two octaves
  Verdict verdict = Verdict::Inconclusive;
};

/// Least-squares slope of log(term) vs log(n) over the last two dyadic
/// octaves of the index range. Terms more than 13 orders of magnitude below
/// max(largest term, floor_scale) are numerical zeros and excluded; pass the
/// natural scale of the sequence (a power of pi_norm(f)) as floor_scale so
/// that all-noise sequences read as identically zero. Returns -infinity when
/// the window is all zero and NaN when fewer than two positive points remain.
double tail_slope(std::span<const double> terms, double floor_scale = 0.0);

/// Convergent when slope < critical - margin, divergent when
/// slope >= critical + margin, inconclusive otherwise (NaN included).
Verdict classify_slope(double slope, double critical, double margin);

/// Classifies sum_n terms[n] * weight(n) for nonnegative terms indexed from
/// n = 1. Requires at least 64 terms (TooFewTerms otherwise). The verdict
/// compares the fitted tail exponent against the critical slope -1 with the
/// configured margin.
SeriesVerdict evaluate_condition(std::span<const double> terms, SeriesWeight weight,
                                 const Tolerances& tol = Tolerances{}, double floor_scale = 0.0);

}  // namespace mclab

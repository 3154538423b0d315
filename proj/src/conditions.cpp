#include "mclab/conditions.hpp"

#include <cmath>
#include <limits>

namespace mclab {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Convergent:
      return "convergent";
    case Verdict::Divergent:
      return "divergent";
    default:
      return "inconclusive";
  }
}

double tail_slope(std::span<const double> terms, double floor_scale) {
  const int n_terms = static_cast<int>(terms.size());
  const int lo = std::max(1, n_terms / 4);  // last two octaves, 1-indexed
  // Sequences that decay to the floating-point noise floor plateau there;
  // entries more than 13 orders below the reference scale are numerical zeros.
  double peak = floor_scale;
  for (const double t : terms) peak = std::max(peak, t);
  const double floor = peak * 1e-13;
  bool any_positive = false;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int n = lo; n <= n_terms; ++n) {
    const double t = terms[n - 1];
    if (t <= floor) continue;
    any_positive = true;
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(t);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (!any_positive) return -std::numeric_limits<double>::infinity();
  if (m == 1) {
    // One surviving point: either the sequence dies at the noise boundary
    // inside the window (an exhausted tail) or the fit is underdetermined.
    double survivor = 0.0;
    for (int n = lo; n <= n_terms; ++n) survivor = std::max(survivor, terms[n - 1]);
    if (survivor <= 1000.0 * floor) return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / denom;
}

Verdict classify_slope(double slope, double critical, double margin) {
  if (std::isnan(slope)) return Verdict::Inconclusive;
  if (slope < critical - margin) return Verdict::Convergent;
  if (slope >= critical + margin) return Verdict::Divergent;
  return Verdict::Inconclusive;
}

SeriesVerdict evaluate_condition(std::span<const double> terms, SeriesWeight weight,
                                 const Tolerances& tol, double floor_scale) {
  if (terms.size() < 64) {
    throw TooFewTerms("evaluate_condition needs at least 64 terms, got " +
                      std::to_string(terms.size()));
  }
  SeriesVerdict out;
  std::vector<double> weighted(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    double w = 1.0;
    if (weight == SeriesWeight::InvSquare) w = 1.0 / (n * n);
    if (weight == SeriesWeight::InvThreeHalves) w = 1.0 / (n * std::sqrt(n));
    weighted[i] = terms[i] * w;
  }
  out.partial_sums.resize(weighted.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weighted.size(); ++i) {
    acc += weighted[i];
    out.partial_sums[i] = acc;
  }
  out.tail_exponent = tail_slope(weighted, floor_scale);
  out.verdict = classify_slope(out.tail_exponent, -1.0, tol.classifier_margin);
  return out;
}

}  // namespace mclab

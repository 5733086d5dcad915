#pragma once

// Discrete power-law fit for degree tails: maximum-likelihood exponent for
// each candidate cutoff x_min, and the cutoff whose fitted tail is closest to
// the data in Kolmogorov-Smirnov distance.
//
//   p(x) = x^-alpha / zeta(alpha, x_min),   x >= x_min

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bibliostat::network {

/// value -> number of nodes with that value
using DegreeHistogram = std::map<std::size_t, std::size_t>;

struct PowerLawFit {
  bool fitted = false;
  double exponent = 0.0;
  std::size_t cutoff = 0;
  double ks_distance = 0.0;
  std::size_t tail_size = 0;
  std::string reason;  // set when !fitted
};

inline constexpr std::size_t kMinTailSize = 10;
inline constexpr double kMinExponent = 1.0005;
inline constexpr double kMaxExponent = 12.0;

/// Hurwitz zeta(s, q) for s > 1, q > 0.
double hurwitz_zeta(double s, double q);

/// Log-likelihood of the tail x >= xmin under exponent alpha.
double log_likelihood(const DegreeHistogram& histogram, std::size_t xmin, double alpha);

/// MLE exponent for the tail x >= xmin (bounded search on [kMinExponent, kMaxExponent]).
double fit_exponent(const DegreeHistogram& histogram, std::size_t xmin);

/// KS distance between the empirical tail CDF and the fitted model CDF,
/// checked at every integer from xmin to the largest observed value.
double ks_distance(const DegreeHistogram& histogram, std::size_t xmin, double alpha);

/// Distinct positive values whose tail holds at least kMinTailSize nodes.
std::vector<std::size_t> cutoff_candidates(const DegreeHistogram& histogram);

/// Candidates with fewer than kMinTailSize tail nodes or a single distinct
/// tail value are skipped; when none remain the result is unfitted.
PowerLawFit fit_power_law(const DegreeHistogram& histogram,
                          std::span<const std::size_t> xmin_candidates);

}  // namespace bibliostat::network

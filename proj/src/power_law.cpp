#include "bibliostat/power_law.hpp"

#include <boost/math/tools/minima.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bibliostat::network {
namespace {

struct TailSums {
  std::size_t count = 0;
  std::size_t distinct = 0;
  double log_sum = 0.0;  // sum of count * ln(x)
};

TailSums tail_sums(const DegreeHistogram& histogram, std::size_t xmin) {
  TailSums t;
  for (auto it = histogram.lower_bound(xmin); it != histogram.end(); ++it) {
    if (it->second == 0) {
      continue;
    }
    t.count += it->second;
    ++t.distinct;
    t.log_sum += static_cast<double>(it->second) * std::log(static_cast<double>(it->first));
  }
  return t;
}

}  // namespace

double hurwitz_zeta(double s, double q) {
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;
  gsl_sf_result result;
  const int status = gsl_sf_hzeta_e(s, q, &result);
  if (status != GSL_SUCCESS) {
    throw std::domain_error("hurwitz_zeta(" + std::to_string(s) + ", " + std::to_string(q) +
                            "): " + gsl_strerror(status));
  }
  return result.val;
}

double log_likelihood(const DegreeHistogram& histogram, std::size_t xmin, double alpha) {
  const TailSums t = tail_sums(histogram, xmin);
  return -static_cast<double>(t.count) * std::log(hurwitz_zeta(alpha, static_cast<double>(xmin))) -
         alpha * t.log_sum;
}

double fit_exponent(const DegreeHistogram& histogram, std::size_t xmin) {
  const TailSums t = tail_sums(histogram, xmin);
  const double q = static_cast<double>(xmin);
  auto negative_ll = [&](double alpha) {
    return static_cast<double>(t.count) * std::log(hurwitz_zeta(alpha, q)) + alpha * t.log_sum;
  };
  const int bits = std::numeric_limits<double>::digits / 2;
  return boost::math::tools::brent_find_minima(negative_ll, kMinExponent, kMaxExponent, bits).first;
}

double ks_distance(const DegreeHistogram& histogram, std::size_t xmin, double alpha) {
  const TailSums t = tail_sums(histogram, xmin);
  const double n = static_cast<double>(t.count);
  const double norm = hurwitz_zeta(alpha, static_cast<double>(xmin));
  auto model_cdf = [&](std::size_t x) {
    return 1.0 - hurwitz_zeta(alpha, static_cast<double>(x) + 1.0) / norm;
  };
  double distance = 0.0;
  std::size_t seen = 0;
  for (auto it = histogram.lower_bound(xmin); it != histogram.end(); ++it) {
    if (it->second == 0) {
      continue;
    }
    // flat segment before this value: empirical CDF still at the previous level
    if (it->first > xmin) {
      const double before = static_cast<double>(seen) / n;
      distance = std::max(distance, std::fabs(before - model_cdf(it->first - 1)));
    }
    seen += it->second;
    distance = std::max(distance, std::fabs(static_cast<double>(seen) / n - model_cdf(it->first)));
  }
  return distance;
}

std::vector<std::size_t> cutoff_candidates(const DegreeHistogram& histogram) {
  std::vector<std::size_t> out;
  std::size_t tail = 0;
  for (auto it = histogram.rbegin(); it != histogram.rend(); ++it) {
    tail += it->second;
    if (it->first >= 1 && it->second > 0 && tail >= kMinTailSize) {
      out.push_back(it->first);
    }
  }
  return {out.rbegin(), out.rend()};
}

PowerLawFit fit_power_law(const DegreeHistogram& histogram,
                          std::span<const std::size_t> xmin_candidates) {
  PowerLawFit best;
  best.reason = "no cutoff candidate has at least " + std::to_string(kMinTailSize) +
                " nodes and two distinct values in its tail";
  for (std::size_t xmin : xmin_candidates) {
    if (xmin == 0) {
      continue;
    }
    const TailSums t = tail_sums(histogram, xmin);
    if (t.count < kMinTailSize || t.distinct < 2) {
      continue;
    }
    const double alpha = fit_exponent(histogram, xmin);
    const double d = ks_distance(histogram, xmin, alpha);
    if (!best.fitted || d < best.ks_distance) {
      best.fitted = true;
      best.exponent = alpha;
      best.cutoff = xmin;
      best.ks_distance = d;
      best.tail_size = t.count;
      best.reason.clear();
    }
  }
  return best;
}

}  // namespace bibliostat::network

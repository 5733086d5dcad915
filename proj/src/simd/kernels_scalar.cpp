#include "bibliostat/simd/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace bibliostat::simd {
namespace {

void accumulate_signed_scalar(const std::int8_t* signs, double weight, double* acc,
                              std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    acc[i] += static_cast<double>(signs[i]) * weight;
  }
}

double dot_signed_scalar(const std::int8_t* signs, const double* values, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    lane[i % 4] += static_cast<double>(signs[i]) * values[i];
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    best = std::max(best, std::fabs(a[i] - b[i]));
  }
  return best;
}

std::uint64_t popcount_and_scalar(const std::uint64_t* a, const std::uint64_t* b,
                                  std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
  }
  return total;
}

constexpr KernelTable kScalar{
    Isa::scalar, accumulate_signed_scalar, dot_signed_scalar, max_abs_diff_scalar,
    popcount_and_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace bibliostat::simd

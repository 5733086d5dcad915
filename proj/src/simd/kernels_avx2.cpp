// Compiled with -mavx2; only reached after a runtime CPU check.

#include "bibliostat/simd/kernels.hpp"

#include <immintrin.h>

#include <cstring>

namespace bibliostat::simd {
namespace {

inline __m256d load_signs(const std::int8_t* p) {
  std::int32_t packed;
  std::memcpy(&packed, p, sizeof(packed));
  const __m128i s32 = _mm_cvtepi8_epi32(_mm_cvtsi32_si128(packed));
  return _mm256_cvtepi32_pd(s32);
}

void accumulate_signed_avx2(const std::int8_t* signs, double weight, double* acc,
                            std::size_t n) {
  const __m256d w = _mm256_set1_pd(weight);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d term = _mm256_mul_pd(load_signs(signs + i), w);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), term));
  }
  for (; i < n; ++i) {
    acc[i] += static_cast<double>(signs[i]) * weight;
  }
}

double dot_signed_avx2(const std::int8_t* signs, const double* values, std::size_t n) {
  __m256d sum = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d term = _mm256_mul_pd(load_signs(signs + i), _mm256_loadu_pd(values + i));
    sum = _mm256_add_pd(sum, term);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, sum);
  for (; i < n; ++i) {
    lane[i % 4] += static_cast<double>(signs[i]) * values[i];
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    best = _mm256_max_pd(best, _mm256_and_pd(d, abs_mask));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, best);
  double result = lane[0];
  for (int k = 1; k < 4; ++k) {
    result = result > lane[k] ? result : lane[k];
  }
  for (; i < n; ++i) {
    const double d = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
    result = result > d ? result : d;
  }
  return result;
}

// Nibble-table popcount (Mula et al.), accumulated with sad_epu8.
inline __m256i popcount_bytes(__m256i v) {
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                          0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  return _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
}

std::uint64_t popcount_and_avx2(const std::uint64_t* a, const std::uint64_t* b,
                                std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i counts = popcount_bytes(_mm256_and_si256(va, vb));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(counts, _mm256_setzero_si256()));
  }
  alignas(32) std::uint64_t lane[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane), acc);
  std::uint64_t total = lane[0] + lane[1] + lane[2] + lane[3];
  for (; i < n; ++i) {
    total += static_cast<std::uint64_t>(__builtin_popcountll(a[i] & b[i]));
  }
  return total;
}

constexpr KernelTable kAvx2{
    Isa::avx2, accumulate_signed_avx2, dot_signed_avx2, max_abs_diff_avx2,
    popcount_and_avx2};

}  // namespace

namespace detail {
const KernelTable& avx2_table() { return kAvx2; }
}  // namespace detail

}  // namespace bibliostat::simd

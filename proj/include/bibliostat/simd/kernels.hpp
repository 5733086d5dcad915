#pragma once

// Data-parallel inner loops shared by the consensus EM and the network
// metrics. Every kernel has a portable scalar reference; the AVX2 variant is
// chosen at runtime when the CPU supports it. Variants are bitwise identical:
// reductions use a fixed four-lane accumulation order in both.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace bibliostat::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Kernel table. Pointers take raw ranges so variants can be swapped freely.
struct KernelTable {
  Isa isa;
  // acc[i] += signs[i] * weight
  void (*accumulate_signed)(const std::int8_t* signs, double weight, double* acc,
                            std::size_t n);
  // sum_i signs[i] * values[i], lane i % 4, lanes combined as (l0+l1)+(l2+l3)
  double (*dot_signed)(const std::int8_t* signs, const double* values, std::size_t n);
  // max_i |a[i] - b[i]|, 0 for empty input
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  // popcount(a & b) over n words
  std::uint64_t (*popcount_and)(const std::uint64_t* a, const std::uint64_t* b,
                                std::size_t n);
};

const KernelTable& scalar_kernels();

/// The AVX2 table, or nullptr when it was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Best ISA supported by this build and CPU.
Isa detected_isa();

/// Currently active table. Defaults to detected_isa(), unless the
/// BIBLIOSTAT_ISA environment variable is set to "scalar".
const KernelTable& active_kernels();

/// Forces a variant (tests, benchmarking). Throws std::invalid_argument when
/// the requested ISA is unavailable.
void set_active_isa(Isa isa);

// Span conveniences over the active table.

inline void accumulate_signed(std::span<const std::int8_t> signs, double weight,
                              std::span<double> acc) {
  active_kernels().accumulate_signed(signs.data(), weight, acc.data(), acc.size());
}

inline double dot_signed(std::span<const std::int8_t> signs, std::span<const double> values) {
  return active_kernels().dot_signed(signs.data(), values.data(), values.size());
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return active_kernels().max_abs_diff(a.data(), b.data(), a.size());
}

inline std::uint64_t popcount_and(std::span<const std::uint64_t> a,
                                  std::span<const std::uint64_t> b) {
  return active_kernels().popcount_and(a.data(), b.data(), a.size());
}

namespace detail {
const KernelTable& avx2_table();
}

}  // namespace bibliostat::simd

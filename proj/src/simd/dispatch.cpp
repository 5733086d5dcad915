#include "bibliostat/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace bibliostat::simd {
namespace {

bool cpu_has_avx2() {
#if defined(BIBLIOSTAT_BUILD_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  if (const char* forced = std::getenv("BIBLIOSTAT_ISA");
      forced != nullptr && std::string(forced) == "scalar") {
    return &scalar_kernels();
  }
  if (const KernelTable* fast = avx2_kernels()) {
    return fast;
  }
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(BIBLIOSTAT_BUILD_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

Isa detected_isa() { return avx2_kernels() != nullptr ? Isa::avx2 : Isa::scalar; }

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) {
  const KernelTable* table = nullptr;
  switch (isa) {
    case Isa::scalar:
      table = &scalar_kernels();
      break;
    case Isa::avx2:
      table = avx2_kernels();
      break;
  }
  if (table == nullptr) {
    throw std::invalid_argument("ISA not available on this build/CPU: " +
                                std::string(isa_name(isa)));
  }
  active_slot().store(table, std::memory_order_release);
}

}  // namespace bibliostat::simd

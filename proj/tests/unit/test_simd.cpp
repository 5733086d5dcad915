#include "bibliostat/gender_consensus.hpp"
#include "bibliostat/simd/kernels.hpp"

#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <string>
#include <random>
#include <vector>

namespace simd = bibliostat::simd;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

struct Inputs {
  std::vector<std::int8_t> signs;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<std::uint64_t> wa;
  std::vector<std::uint64_t> wb;
};

Inputs random_inputs(std::size_t n, std::mt19937_64& rng) {
  Inputs in;
  std::uniform_real_distribution<double> val(-50.0, 50.0);
  for (std::size_t i = 0; i < n; ++i) {
    in.signs.push_back(static_cast<std::int8_t>(static_cast<int>(rng() % 3) - 1));
    in.a.push_back(val(rng));
    in.b.push_back(val(rng));
    in.wa.push_back(rng());
    in.wb.push_back(rng());
  }
  return in;
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar kernels on small inputs") {
    const auto& k = simd::scalar_kernels();
    const std::int8_t signs[] = {1, -1, 0, 1, 1};
    const double values[] = {0.5, 0.25, 9.0, 1.0, 2.0};
    CHECK(k.dot_signed(signs, values, 5) == doctest::Approx(3.25));
    double acc[] = {1, 1, 1, 1, 1};
    k.accumulate_signed(signs, 2.0, acc, 5);
    CHECK(acc[0] == 3.0);
    CHECK(acc[1] == -1.0);
    CHECK(acc[2] == 1.0);
    const double other[] = {0.5, 0.0, 9.0, 4.0, 2.0};
    CHECK(k.max_abs_diff(values, other, 5) == 3.0);
    CHECK(k.max_abs_diff(values, other, 0) == 0.0);
    const std::uint64_t x[] = {0xFFu, 0x0Fu};
    const std::uint64_t y[] = {0x0Fu, 0xFFu};
    CHECK(k.popcount_and(x, y, 2) == 8);
  }

  TEST_CASE("avx2 kernels are bitwise identical to scalar") {
    const auto* avx = simd::avx2_kernels();
    if (avx == nullptr) {
      MESSAGE("AVX2 unavailable; nothing to compare");
      return;
    }
    const auto& sc = simd::scalar_kernels();
    std::mt19937_64 rng(17);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 31u, 64u, 1000u, 1023u}) {
      CAPTURE(n);
      const auto in = random_inputs(n, rng);
      CHECK(same_bits(sc.dot_signed(in.signs.data(), in.a.data(), n),
                      avx->dot_signed(in.signs.data(), in.a.data(), n)));
      CHECK(same_bits(sc.max_abs_diff(in.a.data(), in.b.data(), n),
                      avx->max_abs_diff(in.a.data(), in.b.data(), n)));
      CHECK(sc.popcount_and(in.wa.data(), in.wb.data(), n) ==
            avx->popcount_and(in.wa.data(), in.wb.data(), n));
      auto acc1 = in.b;
      auto acc2 = in.b;
      sc.accumulate_signed(in.signs.data(), 0.731, acc1.data(), n);
      avx->accumulate_signed(in.signs.data(), 0.731, acc2.data(), n);
      bool equal = true;
      for (std::size_t i = 0; i < n; ++i) {
        equal = equal && same_bits(acc1[i], acc2[i]);
      }
      CHECK(equal);
    }
  }

  TEST_CASE("EM output does not depend on the active kernel set") {
    if (simd::avx2_kernels() == nullptr) {
      return;
    }
    std::mt19937_64 rng(5);
    std::vector<bibliostat::gender::Response> responses;
    for (int s = 0; s < 7; ++s) {
      for (int m = 0; m < 300; ++m) {
        if (rng() % 4 != 0) {
          responses.push_back({"src" + std::to_string(s), "name" + std::to_string(m), static_cast<int>(rng() % 2)});
        }
      }
    }
    const auto matrix = bibliostat::gender::ResponseMatrix::from_responses(responses);
    const auto previous = simd::active_kernels().isa;
    simd::set_active_isa(simd::Isa::scalar);
    const auto a = bibliostat::gender::em_fit(matrix, {});
    simd::set_active_isa(simd::Isa::avx2);
    const auto b = bibliostat::gender::em_fit(matrix, {});
    simd::set_active_isa(previous);
    CHECK(a.iterations == b.iterations);
    CHECK(a.pgf == b.pgf);
    CHECK(a.competence == b.competence);
  }

  TEST_CASE("environment override") {
    const char* forced = std::getenv("BIBLIOSTAT_ISA");
    if (forced != nullptr && std::string(forced) == "scalar") {
      CHECK(simd::active_kernels().isa == simd::Isa::scalar);
    } else {
      CHECK(simd::active_kernels().isa == simd::detected_isa());
    }
  }

  TEST_CASE("isa names") {
    CHECK(simd::isa_name(simd::Isa::scalar) == "scalar");
    CHECK(simd::isa_name(simd::Isa::avx2) == "avx2");
    const auto previous = simd::active_kernels().isa;
    simd::set_active_isa(simd::Isa::scalar);
    CHECK(simd::active_kernels().isa == simd::Isa::scalar);
    simd::set_active_isa(previous);
  }
}

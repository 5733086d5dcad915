#include "bibliostat/power_law.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

namespace bn = bibliostat::network;

TEST_SUITE("power_law") {
  TEST_CASE("zeta against direct summation") {
    for (double s : {1.5, 2.0, 2.5, 3.7}) {
      for (double q : {1.0, 2.0, 7.0}) {
        CAPTURE(s);
        CAPTURE(q);
        CHECK(bn::hurwitz_zeta(s, q) == doctest::Approx(oracle::naive_zeta(s, q)).epsilon(1e-9));
      }
    }
    CHECK(bn::hurwitz_zeta(2.0, 1.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-12));
  }

  TEST_CASE("likelihood and exponent against a grid search") {
    std::mt19937_64 rng(31);
    for (double alpha : {2.5, 3.2}) {
      bn::DegreeHistogram h;
      for (int i = 0; i < 3000; ++i) {
        ++h[oracle::sample_zeta(alpha, rng)];
      }
      for (std::size_t xmin : {1u, 2u}) {
        CHECK(bn::log_likelihood(h, xmin, alpha) ==
              doctest::Approx(oracle::naive_log_likelihood(h, xmin, alpha)).epsilon(1e-9));
        const double fit = bn::fit_exponent(h, xmin);
        const double coarse = oracle::grid_exponent(h, xmin, 1.8, 4.0, 0.02);
        const double fine = oracle::grid_exponent(h, xmin, coarse - 0.02, coarse + 0.02, 5e-4);
        CHECK(std::fabs(fit - fine) < 1e-3);
      }
    }
  }

  TEST_CASE("cutoff selection") {
    bn::DegreeHistogram h = {{1, 30}, {2, 12}, {3, 6}, {4, 3}, {5, 1}};
    const auto c = bn::cutoff_candidates(h);
    CHECK(c == std::vector<std::size_t>{1, 2, 3});
    const auto fit = bn::fit_power_law(h, c);
    CHECK(fit.fitted);
    CHECK((fit.cutoff >= 1 && fit.cutoff <= 3));
    CHECK(fit.tail_size >= bn::kMinTailSize);
    CHECK(fit.ks_distance == doctest::Approx(bn::ks_distance(h, fit.cutoff, fit.exponent)));
  }

  TEST_CASE("degenerate tails are not fitted") {
    const bn::DegreeHistogram few = {{1, 3}, {2, 2}};
    const std::vector<std::size_t> one = {1};
    CHECK_FALSE(bn::fit_power_law(few, one).fitted);
    const bn::DegreeHistogram flat = {{3, 50}};
    const std::vector<std::size_t> three = {3};
    const auto f = bn::fit_power_law(flat, three);
    CHECK_FALSE(f.fitted);
    CHECK_FALSE(f.reason.empty());
  }
}

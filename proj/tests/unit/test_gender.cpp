#include "bibliostat/error.hpp"
#include "bibliostat/gender_consensus.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace bg = bibliostat::gender;
using bibliostat::Gender;

namespace {

bg::ConsensusEstimate with_label(Gender g) {
  bg::ConsensusEstimate e;
  e.pgf = g == Gender::female ? 1.0 : 0.0;
  e.uncertainty = 0.0;
  e.label = g;
  return e;
}

}  // namespace

TEST_SUITE("gender") {
  TEST_CASE("posterior examples") {
    const std::vector<std::int8_t> one = {1};
    const std::vector<double> c9 = {0.9};
    CHECK(bg::posterior_female(one, c9, 1e-3) == doctest::Approx(0.9).epsilon(1e-12));
    const std::vector<std::int8_t> split = {1, -1};
    const std::vector<double> equal = {0.7, 0.7};
    CHECK(bg::posterior_female(split, equal, 1e-3) == doctest::Approx(0.5).epsilon(1e-12));
    const std::vector<std::int8_t> three = {1, 1, -1};
    const std::vector<double> c3 = {0.9, 0.8, 0.6};
    CHECK(bg::posterior_female(three, c3, 1e-3) == doctest::Approx(0.96).epsilon(1e-12));
    const std::vector<std::int8_t> none = {0, 0};
    CHECK_THROWS_AS(bg::posterior_female(none, equal, 1e-3), std::invalid_argument);
    // competences outside [eps, 1 - eps] are clamped
    const std::vector<double> certain = {1.0};
    CHECK(bg::posterior_female(one, certain, 1e-3) == doctest::Approx(0.999).epsilon(1e-12));
  }

  TEST_CASE("uncertainty") {
    CHECK(bg::uncertainty(0.5) == 0.5);
    CHECK(bg::uncertainty(1.0) == 0.0);
    CHECK(bg::uncertainty(0.8) == doctest::Approx(0.2));
    CHECK(bg::uncertainty(0.3) == doctest::Approx(0.3));
  }

  TEST_CASE("predict") {
    const bg::PgfMap est = {{"ann", 0.5}, {"bob", 0.7}, {"cat", 0.95}, {"dan lee", 0.02}};
    bg::ClassifierConfig pgf_only;
    pgf_only.method = bg::Method::pgf_only;
    CHECK(bg::predict("ann", est, pgf_only).label == Gender::female);
    bg::ClassifierConfig def;
    def.tau = 0.2;
    CHECK(bg::predict("bob", est, def).label == Gender::unknown);
    CHECK(bg::predict("cat", est, def).label == Gender::female);
    CHECK(bg::predict("dan lee", est, def).label == Gender::male);
    CHECK_FALSE(bg::predict("zed", est, def).found());
    CHECK(bg::predict("zed", est, pgf_only).label == Gender::unknown);
    // full key first, then the given name
    CHECK(bg::predict("cat smith", est, def).pgf == 0.95);
    CHECK(bg::classify("J. Cat Smith", est, def).label == Gender::female);
    def.improvement_enabled = false;
    CHECK_FALSE(bg::classify("J. Cat Smith", est, def).found());
    def.tau = 0.5;
    CHECK(bg::predict("ann", est, def).label == Gender::female);
  }

  TEST_CASE("config validation") {
    bg::ClassifierConfig c;
    CHECK_NOTHROW(c.validate());
    c.tau = 0.6;
    CHECK_THROWS_AS(c.validate(), bibliostat::ValidationError);
    c = {};
    c.competence_epsilon = 0.5;
    CHECK_THROWS_AS(c.validate(), bibliostat::ValidationError);
    c = {};
    c.em_max_iters = 0;
    CHECK_THROWS_AS(c.validate(), bibliostat::ValidationError);
    CHECK(bg::parse_method("pgf") == bg::Method::pgf_only);
    CHECK_FALSE(bg::parse_method("bayes").has_value());
  }

  TEST_CASE("response matrix") {
    const std::vector<bg::Response> r = {{"b", "Ann", 1}, {"a", "ann", 1}, {"a", "Bo", 0}};
    const auto m = bg::ResponseMatrix::from_responses(r);
    CHECK(m.sources() == std::vector<std::string>{"a", "b"});
    CHECK(m.names() == std::vector<std::string>{"ann", "bo"});
    CHECK(m.answered(0) == 2);
    CHECK(m.male_votes(0) == 1);
    CHECK(m.sign(1, 1) == 0);
    const std::vector<bg::Response> clash = {{"a", "ann", 1}, {"a", "Ann", 0}};
    CHECK_THROWS_AS(bg::ResponseMatrix::from_responses(clash), bibliostat::ValidationError);
    const std::vector<bg::Response> bad = {{"a", "ann", 2}};
    CHECK_THROWS_AS(bg::ResponseMatrix::from_responses(bad), bibliostat::ValidationError);
    const auto dir = support::temp_dir("resp");
    std::ofstream(dir / "r.tsv") << "a\tann\t1\na\tbo\tx\n";
    try {
      bg::ResponseMatrix::load(dir / "r.tsv");
      FAIL("expected an error");
    } catch (const bibliostat::ValidationError& e) {
      CHECK(std::string(e.what()).find("r.tsv:2:") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("unanimous votes reach the clamped fixed point") {
    std::vector<bg::Response> r;
    for (int s = 0; s < 3; ++s) {
      for (int m = 0; m < 5; ++m) {
        r.push_back({"s" + std::to_string(s), "n" + std::to_string(m), 1});
      }
    }
    const auto fit = bg::em_fit(bg::ResponseMatrix::from_responses(r), {});
    CHECK(fit.converged);
    for (double z : fit.pgf) {
      CHECK(z > 0.999);
    }
    for (double c : fit.competence) {
      CHECK(c >= bg::kInitialCompetence);
    }
  }

  TEST_CASE("single source converges to a fixed point") {
    const std::vector<bg::Response> r = {{"s", "a", 1}, {"s", "b", 0}, {"s", "c", 1}};
    const auto m = bg::ResponseMatrix::from_responses(r);
    const auto fit = bg::em_fit(m, {});
    REQUIRE(fit.converged);
    std::vector<double> pgf(m.name_count());
    std::vector<double> comp(1);
    bg::e_step(m, fit.competence, pgf);
    bg::m_step(m, fit.pgf, 1e-3, comp);
    for (std::size_t i = 0; i < pgf.size(); ++i) {
      CHECK(std::fabs(pgf[i] - fit.pgf[i]) < 1e-5);
    }
    CHECK(std::fabs(comp[0] - fit.competence[0]) < 1e-5);
  }

  TEST_CASE("non-convergence is flagged, not thrown") {
    std::vector<bg::Response> r;
    std::mt19937_64 rng(3);
    for (int m = 0; m < 40; ++m) {
      for (int s = 0; s < 4; ++s) {
        r.push_back({"s" + std::to_string(s), "n" + std::to_string(m), static_cast<int>(rng() % 2)});
      }
    }
    bg::ClassifierConfig cfg;
    cfg.em_max_iters = 1;
    const auto fit = bg::em_fit(bg::ResponseMatrix::from_responses(r), cfg);
    CHECK_FALSE(fit.converged);
    CHECK(fit.iterations == 1);
    CHECK(fit.pgf.size() == 40);
  }

  TEST_CASE("source permutation does not change the fit") {
    std::mt19937_64 rng(21);
    auto votes = support::synthetic_votes(5, 60, {0.9, 0.8, 0.7, 0.65, 0.6}, 0.8, rng).votes;
    const auto a = bg::em_fit(bg::ResponseMatrix::from_responses(support::to_responses(votes)), {});
    std::reverse(votes.begin(), votes.end());
    const auto b = bg::em_fit(bg::ResponseMatrix::from_responses(support::to_responses(votes)), {});
    for (std::size_t i = 0; i < a.pgf.size(); ++i) {
      CHECK(a.pgf[i] == doctest::Approx(b.pgf[i]).epsilon(1e-12));
    }
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(a.competence[i] == doctest::Approx(b.competence[4 - i]).epsilon(1e-12));
    }
  }

  TEST_CASE("fixture responses") {
    const auto m = bg::ResponseMatrix::load(support::fixture("responses.tsv"));
    const auto fit = bg::em_fit(m, {});
    CHECK(fit.converged);
    const auto est = bg::to_pgf_map(m, fit);
    const bg::ClassifierConfig cfg;
    for (const char* name : {"Robin Ames", "Sasha Novak", "Yuki Tanaka", "Li Wei"}) {
      CAPTURE(name);
      const auto e = bg::classify(name, est, cfg);
      CHECK(e.found());
      CHECK(e.label == Gender::unknown);
    }
    CHECK_FALSE(bg::classify("Quinn Avery", est, cfg).found());
    CHECK(bg::classify("Laura Keller", est, cfg).label == Gender::female);
    CHECK(bg::classify("Daniel Weiss", est, cfg).label == Gender::male);
    CHECK(bg::classify("Marta Silva", est, cfg).label == Gender::female);
  }

  TEST_CASE("evaluation metrics") {
    bg::Predictions p;
    bibliostat::GenderTable truth;
    for (int i = 0; i < 10; ++i) {
      const std::string name = "n" + std::to_string(i);
      truth.set(name, Gender::male);
      if (i < 7) {
        p[name] = with_label(Gender::male);
      } else if (i == 7) {
        p[name] = with_label(Gender::female);
      } else {
        p[name] = {};
      }
    }
    const auto r = bg::evaluate(p, truth);
    CHECK(r.unclassified == 2);
    CHECK(r.classified == 8);
    CHECK(r.correct == 7);
    CHECK(*r.accuracy == doctest::Approx(0.7));
    CHECK(*r.classified_accuracy == doctest::Approx(0.875));
    CHECK(*r.coverage == doctest::Approx(0.8));

    bg::Predictions unknown = {{"n0", {}}, {"n1", {}}};
    const auto u = bg::evaluate(unknown, truth);
    CHECK(*u.accuracy == 0.0);
    CHECK_FALSE(u.classified_accuracy.has_value());
    CHECK(*u.coverage == 0.0);

    p["stranger"] = {};
    CHECK_THROWS_AS(bg::evaluate(p, truth), bibliostat::ValidationError);
  }

  TEST_CASE("ground truth integration overwrites exactly the labelled names") {
    bg::Predictions p;
    bibliostat::GenderTable truth;
    for (int i = 0; i < 12; ++i) {
      p["n" + std::to_string(i)] = {};
    }
    for (int i = 0; i < 5; ++i) {
      truth.set("n" + std::to_string(i * 2), i % 2 ? Gender::female : Gender::male);
    }
    truth.set("elsewhere", Gender::female);
    const auto out = bg::integrate_ground_truth(p, truth);
    int overwritten = 0;
    for (const auto& [name, e] : out) {
      overwritten += e.from_ground_truth ? 1 : 0;
      if (e.from_ground_truth) {
        CHECK(e.label == truth.lookup(name));
        CHECK(*e.uncertainty == 0.0);
      } else {
        CHECK(e.label == Gender::unknown);
      }
    }
    CHECK(overwritten == 5);
    CHECK(out.size() == 12);
  }

  TEST_CASE("tuning") {
    std::vector<bg::ConsensusEstimate> all_certain(4);
    for (auto& e : all_certain) {
      e.pgf = 1.0;
      e.uncertainty = 0.0;
    }
    const auto grid = bg::default_tau_grid();
    REQUIRE(grid.size() == 15);
    CHECK(grid.front() == 0.02);
    CHECK(grid.back() == 0.3);
    const auto r = bg::tune_threshold(all_certain, 0.9, grid);
    CHECK(r.target_met);
    CHECK(r.tau == 0.02);
    const std::vector<double> empty;
    CHECK_THROWS_AS(bg::tune_threshold(all_certain, 0.5, empty), std::invalid_argument);
    const std::vector<double> unsorted = {0.2, 0.1};
    CHECK_THROWS_AS(bg::tune_threshold(all_certain, 0.5, unsorted), std::invalid_argument);
    CHECK_THROWS_AS(bg::tune_threshold(all_certain, 0.0, grid), std::invalid_argument);
    // not-found names stay in the denominator
    all_certain.emplace_back();
    CHECK(bg::coverage_at(all_certain, 0.5) == doctest::Approx(0.8));
  }
}

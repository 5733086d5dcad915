#include "bibliostat/error.hpp"
#include "bibliostat/team_analytics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <map>

namespace bt = bibliostat::team;
using bibliostat::Gender;

namespace {

// Four papers, hand-tallied below.
const char* kCorpus =
    R"({"id":"p1","venue":"V","year":2001,"title":"t","authors":["A","B"],"citations":10})" "\n"
    R"({"id":"p2","venue":"V","year":2001,"title":"t","authors":["C"],"citations":0})" "\n"
    R"({"id":"p3","venue":"V","year":2002,"title":"t","authors":["A","C","D","E"],"citations":5})" "\n"
    R"({"id":"p4","venue":"V","year":2002,"title":"t","authors":["F","G","H","I","J","K"]})" "\n";

bibliostat::corpus::Corpus small() { return support::corpus_from(kCorpus, {{"V", {2000, 2005}}}); }

bibliostat::GenderTable small_genders() {
  bibliostat::GenderTable g;
  for (const char* m : {"A", "D", "F", "G", "H", "I", "J", "K"}) {
    g.set(m, Gender::male);
  }
  g.set("B", Gender::female);
  g.set("C", Gender::female);
  return g;
}

const bt::CohortRow* row(const bt::CohortTable& t, const std::string& group, const std::string& sub = "") {
  for (const auto& r : t.rows) {
    if (r.group == group && r.subgroup == sub) {
      return &r;
    }
  }
  return nullptr;
}

}  // namespace

TEST_SUITE("team") {
  TEST_CASE("composition and size class") {
    using G = Gender;
    const std::vector<G> mm = {G::male, G::male};
    const std::vector<G> mf = {G::male, G::female};
    const std::vector<G> mfu = {G::male, G::unknown, G::female};
    const std::vector<G> mu = {G::male, G::unknown};
    const std::vector<G> f = {G::female};
    CHECK(bt::composition_of(mm) == bt::Composition::all_male);
    CHECK(bt::composition_of(mf) == bt::Composition::mixed);
    CHECK(bt::composition_of(mfu) == bt::Composition::mixed);
    CHECK(bt::composition_of(mu) == bt::Composition::undetermined);
    CHECK(bt::composition_of(f) == bt::Composition::all_female);
    CHECK(bt::size_class_of(3) == bt::SizeClass::small);
    CHECK(bt::size_class_of(4) == bt::SizeClass::big);
  }

  TEST_CASE("volume and team sizes") {
    const auto c = small();
    const auto vol = bt::annual_publication_volume(c);
    REQUIRE(vol.size() == 2);
    CHECK(vol[0].papers == 2);
    CHECK(vol[1].papers == 2);
    const auto stats = bt::annual_team_size_stats(c);
    REQUIRE(stats.size() == 3);
    CHECK(stats[0].mean == 1.5);
    CHECK(stats[0].median == 1.5);
    CHECK(stats[1].mean == 5.0);
    CHECK_FALSE(stats[2].year.has_value());
    CHECK(stats[2].mean == 3.25);
    CHECK(stats[2].median == 3.0);
    const auto dist = bt::team_size_distribution(c);
    REQUIRE(dist.size() == 8);
    CHECK(dist[0].category == "1");
    CHECK(*dist[0].percentage == 50.0);
    CHECK(dist[7].category == "4+");
    CHECK(dist[7].count == 2);
    CHECK(*dist[7].percentage == 100.0);
  }

  TEST_CASE("records and citation cohorts") {
    const auto c = small();
    const auto records = bt::build_team_records(c, small_genders());
    REQUIRE(records.size() == 4);
    CHECK(records[0].composition == bt::Composition::mixed);
    CHECK(records[1].composition == bt::Composition::all_female);
    CHECK(records[2].composition == bt::Composition::mixed);
    CHECK(records[3].composition == bt::Composition::all_male);
    CHECK(records[1].first_author_gender == Gender::female);

    const auto by_size = bt::citations_by_team_size(records);
    const auto* one = row(by_size, "1");
    REQUIRE(one);
    CHECK(one->papers == 1);
    CHECK(one->percentage == 25.0);
    CHECK(*one->mean_citations == 0.0);
    CHECK(row(by_size, "3")->papers == 0);
    CHECK_FALSE(row(by_size, "3")->mean_citations.has_value());
    const auto* six = row(by_size, "6+");
    REQUIRE(six);
    CHECK(six->papers == 1);
    CHECK_FALSE(six->mean_citations.has_value());
    REQUIRE(by_size.excluded.size() == 1);
    CHECK(by_size.excluded[0].papers == 1);

    const auto by_comp = bt::citations_by_composition(records);
    CHECK(row(by_comp, "small", "mixed")->papers == 1);
    CHECK(*row(by_comp, "small", "mixed")->mean_citations == 10.0);
    CHECK(row(by_comp, "big", "mixed")->papers == 1);
    CHECK(row(by_comp, "big", "all_male")->cited_papers == 0);
  }

  TEST_CASE("top decile") {
    const auto records = bt::build_team_records(small(), small_genders());
    const auto d = bt::top_decile(records);
    REQUIRE(d.summaries.size() == 1);
    CHECK(d.summaries[0].candidates == 3);
    CHECK(d.summaries[0].paper_ids == std::vector<std::string>{"p1"});
    CHECK(d.summaries[0].max_citations == 10);
  }

  TEST_CASE("productivity and top producers") {
    const auto c = small();
    const auto prod = bt::productivity_vs_collaborators(c);
    std::map<std::size_t, std::pair<std::size_t, double>> by;
    for (const auto& p : prod) {
      by[p.collaborators] = {p.authors, p.mean_papers};
    }
    CHECK(by.at(1).first == 1);
    CHECK(by.at(3).first == 3);
    CHECK(by.at(3).second == doctest::Approx(4.0 / 3.0));
    CHECK(by.at(4).second == 2.0);
    CHECK(by.at(5).first == 6);
    const auto top = bt::top_producers_max_citation(c);
    REQUIRE(top.size() == 2);
    CHECK(top[0].author == "A");
    CHECK(top[0].max_citations == 10);
    CHECK(top[1].author == "C");
    CHECK(top[1].max_citations == 5);
  }

  TEST_CASE("gender series") {
    const auto s = bt::author_gender_series(small(), small_genders());
    REQUIRE(s.size() == 2);
    CHECK(s[0].cumulative_male == 1);
    CHECK(s[0].cumulative_female == 2);
    CHECK(s[1].cumulative_male == 8);
    CHECK(s[1].cumulative_unknown == 1);
    CHECK(s[1].active_male == 8);
    CHECK(*s[1].female_share == doctest::Approx(100.0 / 9.0));
  }

  TEST_CASE("awards") {
    const auto c = small();
    const std::vector<bt::AwardEntry> awards = {{"p1", "Best", 2010}};
    const auto s = bt::award_summary(awards, c, small_genders());
    CHECK(s.papers == 1);
    CHECK(s.small_teams == 1);
    CHECK(s.mixed == 1);
    CHECK(s.male_first == 1);
    CHECK(s.female_authors == 1);
    const std::vector<bt::AwardEntry> dangling = {{"zz", "Best", std::nullopt}};
    try {
      bt::check_awards(dangling, c);
      FAIL("expected an error");
    } catch (const bibliostat::ValidationError& e) {
      CHECK(std::string(e.what()).find("'zz'") != std::string::npos);
    }
  }

  TEST_CASE("fixture awards file") {
    const auto awards = bt::load_awards(support::fixture("awards.tsv"));
    REQUIRE(awards.size() == 3);
    CHECK(awards[2].paper_id == "S10");
    CHECK(awards[2].year == 2017);
  }
}

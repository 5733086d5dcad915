#pragma once

// Team-science statistics over a corpus: publication volume, team sizes,
// gender composition, first-author gender, citation cohorts, top-decile
// replication, productivity and award summaries. Every result is grouped by
// venue; venues and years appear in ascending order.

#include "bibliostat/corpus.hpp"
#include "bibliostat/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bibliostat::team {

enum class SizeClass { small, big };
enum class Composition { all_male, all_female, mixed, undetermined };

std::string_view to_string(SizeClass s);
std::string_view to_string(Composition c);

inline constexpr int kSmallTeamMax = 3;

inline SizeClass size_class_of(int team_size) {
  return team_size <= kSmallTeamMax ? SizeClass::small : SizeClass::big;
}

/// Mixed needs a known male and a known female; otherwise any unknown member
/// leaves the team undetermined.
Composition composition_of(std::span<const Gender> members);

struct TeamRecord {
  std::string paper_id;
  int year = 0;
  std::string venue;
  int team_size = 0;
  SizeClass size_class = SizeClass::small;
  Composition composition = Composition::undetermined;
  Gender first_author_gender = Gender::unknown;
  std::optional<std::int64_t> citations;
};

std::vector<TeamRecord> build_team_records(const corpus::Corpus& corpus,
                                           const GenderTable& genders);

struct YearCount {
  std::string venue;
  int year = 0;
  std::size_t papers = 0;
};

/// Papers per venue-year, for years that have papers.
std::vector<YearCount> annual_publication_volume(const corpus::Corpus& corpus);

struct TeamSizeStats {
  std::string venue;
  std::optional<int> year;  // nullopt: all years of the venue
  std::size_t papers = 0;
  double mean = 0.0;
  double median = 0.0;
};

/// Per venue-year mean/median team size, followed by one all-years row per venue.
std::vector<TeamSizeStats> annual_team_size_stats(const corpus::Corpus& corpus);

struct SizeCount {
  std::string venue;
  int team_size = 0;
  std::size_t papers = 0;
  double percentage = 0.0;
};

/// Papers by exact team size per venue.
std::vector<SizeCount> team_size_histogram(const corpus::Corpus& corpus);

struct ShareRow {
  std::string venue;
  int year = 0;
  std::string category;
  std::size_t count = 0;
  std::optional<double> percentage;  // absent for reported-only categories
};

/// Yearly shares of the 1, 2, 3 and 4+ author categories.
std::vector<ShareRow> team_size_distribution(const corpus::Corpus& corpus);

enum class GenderCounting {
  distinct_authors,  // an author counts once per active year
  authorships,       // every author slot counts
};

struct GenderSeriesRow {
  std::string venue;
  int year = 0;
  std::size_t cumulative_male = 0;
  std::size_t cumulative_female = 0;
  std::size_t cumulative_unknown = 0;
  std::size_t active_male = 0;
  std::size_t active_female = 0;
  std::size_t active_unknown = 0;
  std::optional<double> male_share;    // percent of known-gender active authors
  std::optional<double> female_share;
};

/// Cumulative distinct authors by gender (counted from first appearance in the
/// venue) and annual shares among that year's active authors.
std::vector<GenderSeriesRow> author_gender_series(
    const corpus::Corpus& corpus, const GenderTable& genders,
    GenderCounting counting = GenderCounting::distinct_authors);

/// Yearly composition shares over determined teams; "undetermined" is
/// reported as a count without a percentage.
std::vector<ShareRow> annual_composition_shares(std::span<const TeamRecord> records);

/// Yearly first-author gender shares over known first authors; "unknown" is
/// count-only.
std::vector<ShareRow> annual_first_author_shares(std::span<const TeamRecord> records);

struct CohortRow {
  std::string venue;
  std::string group;     // team size, or size class
  std::string subgroup;  // composition / first-author gender, empty otherwise
  std::size_t papers = 0;
  double percentage = 0.0;
  std::size_t cited_papers = 0;  // papers contributing to the mean
  std::optional<double> mean_citations;
};

struct CohortTable {
  std::vector<CohortRow> rows;
  struct Excluded {
    std::string venue;
    std::size_t papers = 0;  // papers left out of the partition
  };
  std::vector<Excluded> excluded;
};

/// Team sizes 1..5 plus a "6+" row. Percentages use all venue papers; the 6+
/// row never carries a mean.
CohortTable citations_by_team_size(std::span<const TeamRecord> records);

/// size class x {mixed, all_male, all_female}; undetermined teams excluded.
CohortTable citations_by_composition(std::span<const TeamRecord> records);

/// size class x {male, female} first author; unknown first authors excluded.
CohortTable citations_by_first_author(std::span<const TeamRecord> records);

struct DecileSummary {
  std::string venue;
  std::size_t candidates = 0;  // papers with citation data
  std::vector<std::string> paper_ids;
  std::int64_t max_citations = 0;
  double mean_citations = 0.0;
  double median_citations = 0.0;
};

struct TopDecile {
  std::vector<DecileSummary> summaries;
  std::vector<TeamRecord> selected;
  CohortTable by_composition;
  CohortTable by_first_author;
};

/// ceil(0.1 * N) most-cited papers per venue (N = papers with citation data),
/// ordered by citations desc, year asc, id asc.
TopDecile top_decile(std::span<const TeamRecord> records);

struct ProductivityPoint {
  std::string venue;
  std::size_t collaborators = 0;
  std::size_t authors = 0;
  double mean_papers = 0.0;
};

std::vector<ProductivityPoint> productivity_vs_collaborators(const corpus::Corpus& corpus);

struct ProducerRow {
  std::string venue;
  std::string author;
  std::size_t papers = 0;
  std::optional<std::int64_t> max_citations;
};

/// ceil(0.1 * authors) most productive authors per venue (papers desc, name asc).
std::vector<ProducerRow> top_producers_max_citation(const corpus::Corpus& corpus);

struct AwardSummary {
  std::size_t papers = 0;
  std::size_t small_teams = 0;
  std::size_t big_teams = 0;
  std::size_t male_authors = 0;  // author slots
  std::size_t female_authors = 0;
  std::size_t unknown_authors = 0;
  std::size_t all_male = 0;
  std::size_t all_female = 0;
  std::size_t mixed = 0;
  std::size_t undetermined = 0;
  std::size_t male_first = 0;
  std::size_t female_first = 0;
  std::size_t unknown_first = 0;
};

struct AwardEntry {
  std::string paper_id;
  std::string award;
  std::optional<int> year;
};

/// TSV rows: paper_id [<TAB> award name [<TAB> year]].
std::vector<AwardEntry> load_awards(const std::filesystem::path& path);

/// Throws ValidationError naming any id missing from the corpus.
void check_awards(std::span<const AwardEntry> awards, const corpus::Corpus& corpus);

AwardSummary award_summary(std::span<const AwardEntry> awards, const corpus::Corpus& corpus,
                           const GenderTable& genders);

}  // namespace bibliostat::team

#include "bibliostat/team_analytics.hpp"

#include "bibliostat/error.hpp"
#include "bibliostat/tsv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <numeric>
#include <set>

namespace bibliostat::team {
namespace {

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::size_t decile_count(std::size_t n) { return (n + 9) / 10; }

const std::vector<Composition> kDeterminedCompositions = {Composition::mixed, Composition::all_male,
                                                          Composition::all_female};

// Accumulates paper counts and citation sums for one cohort cell.
struct Cell {
  std::size_t papers = 0;
  std::size_t cited = 0;
  double citation_sum = 0.0;

  void add(const TeamRecord& r) {
    ++papers;
    if (r.citations) {
      ++cited;
      citation_sum += static_cast<double>(*r.citations);
    }
  }
  std::optional<double> mean() const {
    return cited == 0 ? std::nullopt : std::optional<double>(citation_sum / static_cast<double>(cited));
  }
};

std::map<std::string, std::vector<const TeamRecord*>> by_venue(std::span<const TeamRecord> records) {
  std::map<std::string, std::vector<const TeamRecord*>> out;
  for (const auto& r : records) {
    out[r.venue].push_back(&r);
  }
  return out;
}

// size class x subgroup table; `key` maps a record to its subgroup or nullopt
// when the record is excluded.
template <typename KeyFn>
CohortTable size_class_table(std::span<const TeamRecord> records,
                             const std::vector<std::string>& subgroups, KeyFn key) {
  CohortTable table;
  for (const auto& [venue, rows] : by_venue(records)) {
    std::map<std::pair<SizeClass, std::string>, Cell> cells;
    std::size_t included = 0;
    std::size_t excluded = 0;
    for (const TeamRecord* r : rows) {
      auto sub = key(*r);
      if (!sub) {
        ++excluded;
        continue;
      }
      ++included;
      cells[{r->size_class, *sub}].add(*r);
    }
    for (SizeClass sc : {SizeClass::big, SizeClass::small}) {
      for (const auto& sub : subgroups) {
        const Cell cell = cells[{sc, sub}];
        table.rows.push_back(CohortRow{venue, std::string(to_string(sc)), sub, cell.papers,
                                       percent(cell.papers, included), cell.cited, cell.mean()});
      }
    }
    table.excluded.push_back({venue, excluded});
  }
  return table;
}

std::map<std::string, std::map<int, std::vector<const corpus::PaperRecord*>>> papers_by_venue_year(
    const corpus::Corpus& corpus) {
  std::map<std::string, std::map<int, std::vector<const corpus::PaperRecord*>>> out;
  for (const auto& p : corpus.papers) {
    out[p.venue][p.year].push_back(&p);
  }
  return out;
}

}  // namespace

std::string_view to_string(SizeClass s) { return s == SizeClass::small ? "small" : "big"; }

std::string_view to_string(Composition c) {
  switch (c) {
    case Composition::all_male:
      return "all_male";
    case Composition::all_female:
      return "all_female";
    case Composition::mixed:
      return "mixed";
    case Composition::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

Composition composition_of(std::span<const Gender> members) {
  bool male = false;
  bool female = false;
  bool unknown = false;
  for (Gender g : members) {
    male = male || g == Gender::male;
    female = female || g == Gender::female;
    unknown = unknown || g == Gender::unknown;
  }
  if (male && female) {
    return Composition::mixed;
  }
  if (unknown || members.empty()) {
    return Composition::undetermined;
  }
  return male ? Composition::all_male : Composition::all_female;
}

std::vector<TeamRecord> build_team_records(const corpus::Corpus& corpus,
                                           const GenderTable& genders) {
  std::vector<TeamRecord> records;
  records.reserve(corpus.papers.size());
  for (const auto& p : corpus.papers) {
    std::vector<Gender> members;
    for (const auto& name : corpus.team(p)) {
      members.push_back(genders.lookup(name));
    }
    TeamRecord r;
    r.paper_id = p.id;
    r.year = p.year;
    r.venue = p.venue;
    r.team_size = static_cast<int>(members.size());
    r.size_class = size_class_of(r.team_size);
    r.composition = composition_of(members);
    r.first_author_gender = members.front();
    r.citations = p.citations;
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<YearCount> annual_publication_volume(const corpus::Corpus& corpus) {
  std::vector<YearCount> out;
  for (const auto& [venue, years] : papers_by_venue_year(corpus)) {
    for (const auto& [year, papers] : years) {
      out.push_back({venue, year, papers.size()});
    }
  }
  return out;
}

std::vector<TeamSizeStats> annual_team_size_stats(const corpus::Corpus& corpus) {
  std::vector<TeamSizeStats> out;
  for (const auto& [venue, years] : papers_by_venue_year(corpus)) {
    std::vector<double> all;
    for (const auto& [year, papers] : years) {
      std::vector<double> sizes;
      for (const auto* p : papers) {
        sizes.push_back(static_cast<double>(p->authors.size()));
      }
      all.insert(all.end(), sizes.begin(), sizes.end());
      const double mean = std::accumulate(sizes.begin(), sizes.end(), 0.0) / static_cast<double>(sizes.size());
      out.push_back({venue, year, sizes.size(), mean, median_of(sizes)});
    }
    const double mean = std::accumulate(all.begin(), all.end(), 0.0) / static_cast<double>(all.size());
    out.push_back({venue, std::nullopt, all.size(), mean, median_of(all)});
  }
  return out;
}

std::vector<SizeCount> team_size_histogram(const corpus::Corpus& corpus) {
  std::map<std::string, std::map<int, std::size_t>> counts;
  std::map<std::string, std::size_t> totals;
  for (const auto& p : corpus.papers) {
    ++counts[p.venue][static_cast<int>(p.authors.size())];
    ++totals[p.venue];
  }
  std::vector<SizeCount> out;
  for (const auto& [venue, sizes] : counts) {
    for (const auto& [size, n] : sizes) {
      out.push_back({venue, size, n, percent(n, totals[venue])});
    }
  }
  return out;
}

std::vector<ShareRow> team_size_distribution(const corpus::Corpus& corpus) {
  static const std::vector<std::string> kCategories = {"1", "2", "3", "4+"};
  std::vector<ShareRow> out;
  for (const auto& [venue, years] : papers_by_venue_year(corpus)) {
    for (const auto& [year, papers] : years) {
      std::array<std::size_t, 4> counts{};
      for (const auto* p : papers) {
        ++counts[std::min<std::size_t>(p->authors.size(), 4) - 1];
      }
      for (std::size_t k = 0; k < counts.size(); ++k) {
        out.push_back({venue, year, kCategories[k], counts[k], percent(counts[k], papers.size())});
      }
    }
  }
  return out;
}

std::vector<GenderSeriesRow> author_gender_series(const corpus::Corpus& corpus,
                                                  const GenderTable& genders,
                                                  GenderCounting counting) {
  std::vector<GenderSeriesRow> out;
  for (const auto& [venue, years] : papers_by_venue_year(corpus)) {
    std::set<std::string> seen;
    std::array<std::size_t, 3> cumulative{};
    for (const auto& [year, papers] : years) {
      std::array<std::size_t, 3> active{};
      std::set<std::string> active_names;
      for (const auto* p : papers) {
        for (const auto& name : corpus.team(*p)) {
          const auto g = static_cast<std::size_t>(genders.lookup(name));
          if (seen.insert(name).second) {
            ++cumulative[g];
          }
          if (counting == GenderCounting::authorships || active_names.insert(name).second) {
            ++active[g];
          }
        }
      }
      GenderSeriesRow row;
      row.venue = venue;
      row.year = year;
      row.cumulative_male = cumulative[static_cast<std::size_t>(Gender::male)];
      row.cumulative_female = cumulative[static_cast<std::size_t>(Gender::female)];
      row.cumulative_unknown = cumulative[static_cast<std::size_t>(Gender::unknown)];
      row.active_male = active[static_cast<std::size_t>(Gender::male)];
      row.active_female = active[static_cast<std::size_t>(Gender::female)];
      row.active_unknown = active[static_cast<std::size_t>(Gender::unknown)];
      const std::size_t known = row.active_male + row.active_female;
      if (known > 0) {
        row.male_share = percent(row.active_male, known);
        row.female_share = percent(row.active_female, known);
      }
      out.push_back(row);
    }
  }
  return out;
}

std::vector<ShareRow> annual_composition_shares(std::span<const TeamRecord> records) {
  std::map<std::pair<std::string, int>, std::map<Composition, std::size_t>> counts;
  for (const auto& r : records) {
    ++counts[{r.venue, r.year}][r.composition];
  }
  std::vector<ShareRow> out;
  for (auto& [key, by_comp] : counts) {
    const std::size_t determined = by_comp[Composition::mixed] + by_comp[Composition::all_male] +
                                   by_comp[Composition::all_female];
    for (Composition c : kDeterminedCompositions) {
      std::optional<double> share;
      if (determined > 0) {
        share = percent(by_comp[c], determined);
      }
      out.push_back({key.first, key.second, std::string(to_string(c)), by_comp[c], share});
    }
    out.push_back({key.first, key.second, "undetermined", by_comp[Composition::undetermined],
                   std::nullopt});
  }
  return out;
}

std::vector<ShareRow> annual_first_author_shares(std::span<const TeamRecord> records) {
  std::map<std::pair<std::string, int>, std::map<Gender, std::size_t>> counts;
  for (const auto& r : records) {
    ++counts[{r.venue, r.year}][r.first_author_gender];
  }
  std::vector<ShareRow> out;
  for (auto& [key, by_gender] : counts) {
    const std::size_t known = by_gender[Gender::male] + by_gender[Gender::female];
    for (Gender g : {Gender::male, Gender::female}) {
      std::optional<double> share;
      if (known > 0) {
        share = percent(by_gender[g], known);
      }
      out.push_back({key.first, key.second, std::string(to_string(g)), by_gender[g], share});
    }
    out.push_back({key.first, key.second, "unknown", by_gender[Gender::unknown], std::nullopt});
  }
  return out;
}

CohortTable citations_by_team_size(std::span<const TeamRecord> records) {
  CohortTable table;
  for (const auto& [venue, rows] : by_venue(records)) {
    std::array<Cell, 6> cells{};
    for (const TeamRecord* r : rows) {
      cells[static_cast<std::size_t>(std::min(r->team_size, 6) - 1)].add(*r);
    }
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const bool overflow = k == 5;
      CohortRow row{venue, overflow ? "6+" : std::to_string(k + 1), "", cells[k].papers,
                    percent(cells[k].papers, rows.size()), overflow ? 0 : cells[k].cited,
                    overflow ? std::nullopt : cells[k].mean()};
      table.rows.push_back(std::move(row));
    }
    table.excluded.push_back({venue, cells[5].papers});
  }
  return table;
}

CohortTable citations_by_composition(std::span<const TeamRecord> records) {
  std::vector<std::string> subgroups;
  for (Composition c : kDeterminedCompositions) {
    subgroups.emplace_back(to_string(c));
  }
  return size_class_table(records, subgroups, [](const TeamRecord& r) -> std::optional<std::string> {
    if (r.composition == Composition::undetermined) {
      return std::nullopt;
    }
    return std::string(to_string(r.composition));
  });
}

CohortTable citations_by_first_author(std::span<const TeamRecord> records) {
  return size_class_table(records, {"male", "female"},
                          [](const TeamRecord& r) -> std::optional<std::string> {
                            if (r.first_author_gender == Gender::unknown) {
                              return std::nullopt;
                            }
                            return std::string(to_string(r.first_author_gender));
                          });
}

TopDecile top_decile(std::span<const TeamRecord> records) {
  TopDecile out;
  for (const auto& [venue, rows] : by_venue(records)) {
    std::vector<const TeamRecord*> cited;
    for (const TeamRecord* r : rows) {
      if (r->citations) {
        cited.push_back(r);
      }
    }
    DecileSummary summary;
    summary.venue = venue;
    summary.candidates = cited.size();
    if (!cited.empty()) {
      std::sort(cited.begin(), cited.end(), [](const TeamRecord* a, const TeamRecord* b) {
        if (*a->citations != *b->citations) {
          return *a->citations > *b->citations;
        }
        if (a->year != b->year) {
          return a->year < b->year;
        }
        return a->paper_id < b->paper_id;
      });
      cited.resize(decile_count(cited.size()));
      std::vector<double> values;
      for (const TeamRecord* r : cited) {
        summary.paper_ids.push_back(r->paper_id);
        values.push_back(static_cast<double>(*r->citations));
        out.selected.push_back(*r);
      }
      summary.max_citations = *cited.front()->citations;
      summary.mean_citations =
          std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
      summary.median_citations = median_of(values);
    }
    out.summaries.push_back(std::move(summary));
  }
  out.by_composition = citations_by_composition(out.selected);
  out.by_first_author = citations_by_first_author(out.selected);
  return out;
}

std::vector<ProductivityPoint> productivity_vs_collaborators(const corpus::Corpus& corpus) {
  std::vector<ProductivityPoint> out;
  for (const auto& venue : corpus.venues_present()) {
    std::map<std::string, std::size_t> papers;
    std::map<std::string, std::set<std::string>> collaborators;
    for (const auto& p : corpus.papers) {
      if (p.venue != venue) {
        continue;
      }
      const auto team = corpus.team(p);
      for (const auto& a : team) {
        ++papers[a];
        auto& mine = collaborators[a];
        for (const auto& b : team) {
          if (a != b) {
            mine.insert(b);
          }
        }
      }
    }
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> buckets;  // k -> (authors, papers)
    for (const auto& [author, count] : papers) {
      auto& bucket = buckets[collaborators[author].size()];
      ++bucket.first;
      bucket.second += count;
    }
    for (const auto& [k, bucket] : buckets) {
      out.push_back({venue, k, bucket.first,
                     static_cast<double>(bucket.second) / static_cast<double>(bucket.first)});
    }
  }
  return out;
}

std::vector<ProducerRow> top_producers_max_citation(const corpus::Corpus& corpus) {
  std::vector<ProducerRow> out;
  for (const auto& venue : corpus.venues_present()) {
    std::map<std::string, ProducerRow> by_author;
    for (const auto& p : corpus.papers) {
      if (p.venue != venue) {
        continue;
      }
      for (const auto& a : corpus.team(p)) {
        auto& row = by_author[a];
        row.venue = venue;
        row.author = a;
        ++row.papers;
        if (p.citations && (!row.max_citations || *p.citations > *row.max_citations)) {
          row.max_citations = p.citations;
        }
      }
    }
    std::vector<ProducerRow> ranked;
    for (auto& [name, row] : by_author) {
      ranked.push_back(std::move(row));
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const ProducerRow& a, const ProducerRow& b) { return a.papers > b.papers; });
    ranked.resize(decile_count(ranked.size()));
    out.insert(out.end(), ranked.begin(), ranked.end());
  }
  return out;
}

std::vector<AwardEntry> load_awards(const std::filesystem::path& path) {
  std::vector<AwardEntry> out;
  for (const auto& row : tsv::read(path)) {
    const std::string where = at_line(path.string(), row.line, "");
    if (row.fields.empty() || row.fields.size() > 3 || row.fields[0].empty()) {
      throw ValidationError(where + "expected paper_id [award [year]]");
    }
    AwardEntry e{row.fields[0], row.fields.size() > 1 ? row.fields[1] : "", std::nullopt};
    if (row.fields.size() == 3) {
      int year = 0;
      const auto& token = row.fields[2];
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), year);
      if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ValidationError(where + "bad award year '" + token + "'");
      }
      e.year = year;
    }
    out.push_back(std::move(e));
  }
  return out;
}

void check_awards(std::span<const AwardEntry> awards, const corpus::Corpus& corpus) {
  std::set<std::string> ids;
  for (const auto& p : corpus.papers) {
    ids.insert(p.id);
  }
  for (const auto& a : awards) {
    if (!ids.contains(a.paper_id)) {
      throw ValidationError("award references unknown paper id '" + a.paper_id + "'");
    }
  }
}

AwardSummary award_summary(std::span<const AwardEntry> awards, const corpus::Corpus& corpus,
                           const GenderTable& genders) {
  check_awards(awards, corpus);
  std::set<std::string> wanted;
  for (const auto& a : awards) {
    wanted.insert(a.paper_id);
  }
  AwardSummary s;
  for (const auto& p : corpus.papers) {
    if (!wanted.contains(p.id)) {
      continue;
    }
    ++s.papers;
    std::vector<Gender> members;
    for (const auto& name : corpus.team(p)) {
      members.push_back(genders.lookup(name));
    }
    (size_class_of(static_cast<int>(members.size())) == SizeClass::small ? s.small_teams : s.big_teams)++;
    for (Gender g : members) {
      (g == Gender::male ? s.male_authors : g == Gender::female ? s.female_authors : s.unknown_authors)++;
    }
    switch (composition_of(members)) {
      case Composition::all_male:
        ++s.all_male;
        break;
      case Composition::all_female:
        ++s.all_female;
        break;
      case Composition::mixed:
        ++s.mixed;
        break;
      case Composition::undetermined:
        ++s.undetermined;
        break;
    }
    const Gender first = members.front();
    (first == Gender::male ? s.male_first : first == Gender::female ? s.female_first : s.unknown_first)++;
  }
  return s;
}

}  // namespace bibliostat::team

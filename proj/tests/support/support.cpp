#include "support.hpp"

#include <cstdio>
#include <sstream>

namespace support {

namespace bc = bibliostat::corpus;

bc::Corpus fixture_corpus() {
  bc::Corpus c = bc::load_corpus(fixture("corpus.jsonl"), fixture_venues());
  c = bc::resolve_identities(std::move(c), bc::load_alias_map(fixture("aliases.tsv")));
  return bc::merge_citations(std::move(c), fixture("citations.tsv")).corpus;
}

bibliostat::GenderTable fixture_genders() {
  using bibliostat::Gender;
  bibliostat::GenderTable t;
  for (const char* n : {"Laura Keller", "Priya Raman", "Hannah Morel", "Sofia Marin", "Ingrid Holm",
                        "K. Marta Olsen", "Adrienne Porter Felt", "Elizabeth Ha", "Ariel Haney",
                        "Erika Chin", "Nora Castillo", "Anna Kowal", "Elena Petrova", "Julia Stein",
                        "Nadia Haddad"}) {
    t.set(n, Gender::female);
  }
  for (const char* n : {"Tomas Berg", "Kenji Sato", "Omar Haddad", "Daniel Weiss", "Victor Lang",
                        "Jeff Yan", "Ahmad El Ahmad", "Rick Wash", "Serge Egelman", "David A. Wagner",
                        "Marcus Feld", "Peter Grant", "Stefan Brandt", "Carlos Ruiz", "Martin Kraus",
                        "Ivan Sokolov", "B. Henrik Dahl", "Tobias Lind"}) {
    t.set(n, Gender::male);
  }
  return t;
}

bc::Corpus corpus_from(const std::string& jsonl, const bc::VenueConfig& venues) {
  std::istringstream in(jsonl);
  return bc::parse_corpus(in, "<inline>", venues);
}

SyntheticVotes synthetic_votes(std::size_t sources, std::size_t names,
                               const std::vector<double>& competences, double answer_rate,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SyntheticVotes s;
  s.competences = competences;
  s.truth.resize(names);
  for (auto& t : s.truth) {
    t = unit(rng) < 0.5 ? 1 : 0;
  }
  s.votes.assign(sources, std::vector<int>(names, -1));
  for (std::size_t m = 0; m < names; ++m) {
    for (std::size_t n = 0; n < sources; ++n) {
      if (unit(rng) < answer_rate) {
        s.votes[n][m] = unit(rng) < competences[n] ? s.truth[m] : 1 - s.truth[m];
      }
    }
  }
  for (std::size_t m = 0; m < names; ++m) {
    bool any = false;
    for (std::size_t n = 0; n < sources; ++n) {
      any = any || s.votes[n][m] >= 0;
    }
    if (!any) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(0, sources - 1)(rng);
      s.votes[n][m] = unit(rng) < competences[n] ? s.truth[m] : 1 - s.truth[m];
    }
  }
  for (std::size_t n = 0; n < sources; ++n) {
    bool any = false;
    for (std::size_t m = 0; m < names; ++m) {
      any = any || s.votes[n][m] >= 0;
    }
    if (!any) {
      s.votes[n][0] = unit(rng) < competences[n] ? s.truth[0] : 1 - s.truth[0];
    }
  }
  return s;
}

std::vector<bibliostat::gender::Response> to_responses(const std::vector<std::vector<int>>& votes) {
  std::vector<bibliostat::gender::Response> out;
  char buf[16];
  for (std::size_t n = 0; n < votes.size(); ++n) {
    std::snprintf(buf, sizeof buf, "s%02zu", n);
    const std::string source = buf;
    for (std::size_t m = 0; m < votes[n].size(); ++m) {
      if (votes[n][m] < 0) {
        continue;
      }
      std::snprintf(buf, sizeof buf, "n%03zu", m);
      out.push_back({source, buf, votes[n][m]});
    }
  }
  return out;
}

std::filesystem::path temp_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() /
             ("bibliostat-" + tag + "-" + std::to_string(rng() % 1000000000));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support

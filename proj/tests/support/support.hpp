#pragma once

// Shared helpers for the unit and acceptance tests.

#include "bibliostat/corpus.hpp"
#include "bibliostat/gender_consensus.hpp"
#include "bibliostat/types.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace support {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(BIBLIOSTAT_FIXTURES) / name;
}

inline bibliostat::corpus::VenueConfig fixture_venues() {
  return {{"SOUPS", {2005, 2024}}, {"FC", {1997, 2024}}};
}

/// The fixture corpus with aliases and citations applied.
bibliostat::corpus::Corpus fixture_corpus();

/// Intended genders of the fixture authors; ambiguous names are left out.
bibliostat::GenderTable fixture_genders();

/// Corpus from inline JSON lines.
bibliostat::corpus::Corpus corpus_from(const std::string& jsonl,
                                       const bibliostat::corpus::VenueConfig& venues);

/// Random vote matrix with planted competences and labels. votes[s][m] is
/// -1 (no answer), 0 or 1. Every name gets at least one answer and every
/// source answers at least one name.
struct SyntheticVotes {
  std::vector<std::vector<int>> votes;
  std::vector<double> competences;
  std::vector<int> truth;
};

SyntheticVotes synthetic_votes(std::size_t sources, std::size_t names,
                               const std::vector<double>& competences, double answer_rate,
                               std::mt19937_64& rng);

/// Source ids "s00".., name keys "n000".. so that sorted order equals index order.
std::vector<bibliostat::gender::Response> to_responses(const std::vector<std::vector<int>>& votes);

/// A fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace support

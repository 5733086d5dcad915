#pragma once

// End-to-end runs driven by a JSON run configuration:
//
//   {
//     "venues": {"SOUPS": {"inception": 2005, "end": 2023}},
//     "inputs": {"corpus": "corpus.jsonl", "citations": "...", "ground_truth": "...",
//                "responses": "...", "aliases": "...", "lexicon": "...", "awards": "..."},
//     "classifier": {"tau": 0.1, "method": "default", "improvement": true,
//                    "em_tolerance": 1e-6, "em_max_iters": 1000,
//                    "competence_epsilon": 0.001, "tune_target": 0.8},
//     "analyses": {"gender": true, "team": true, "network": true, "topics": true},
//     "output_dir": "out",
//     "venue_filter": ["SOUPS"],
//     "year_range": [2005, 2012]
//   }
//
// Only "venues" and "inputs.corpus" are required. Relative paths resolve
// against the directory holding the config file. Every output is a TSV file
// with a header row, listed in manifest.json together with its row count,
// producing operation and the config digest.

#include "bibliostat/gender_consensus.hpp"
#include "bibliostat/corpus.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bibliostat::pipeline {

struct InputPaths {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> citations;
  std::optional<std::filesystem::path> ground_truth;
  std::optional<std::filesystem::path> responses;
  std::optional<std::filesystem::path> aliases;
  std::optional<std::filesystem::path> lexicon;
  std::optional<std::filesystem::path> awards;
};

struct Analyses {
  bool gender = false;
  bool team = false;
  bool network = false;
  bool topics = false;
};

struct RunConfig {
  corpus::VenueConfig venues;
  InputPaths inputs;
  gender::ClassifierConfig classifier;
  std::optional<double> tune_target;  // tune tau before classifying when set
  Analyses analyses;
  std::filesystem::path output_dir;
  std::vector<std::string> venue_filter;  // empty: all configured venues
  std::optional<std::pair<int, int>> year_range;

  /// Venues analysed: the filter if given, else every configured venue.
  std::vector<std::string> selected_venues() const;
};

/// Parses a config file. Throws ValidationError on malformed JSON, unknown
/// keys or wrongly typed values.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir,
                       const std::string& source_name);

/// Checks paths, ranges and cross-field consistency, and parses every input
/// file. Returns one message per problem; empty means valid.
std::vector<std::string> validate(const RunConfig& config);

/// SHA-256 (hex) over the effective settings and the bytes of every input.
std::string config_digest(const RunConfig& config);

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::size_t rows = 0;
  std::string operation;
  std::string config_digest;
  bool operator==(const ManifestEntry&) const = default;
};

struct RunManifest {
  std::string config_digest;
  Analyses analyses;
  std::vector<ManifestEntry> files;

  const ManifestEntry* find(const std::string& path) const;
};

inline constexpr const char* kManifestName = "manifest.json";

RunManifest read_manifest(const std::filesystem::path& out_dir);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& out_dir);

/// Validates, then runs corpus -> gender -> team -> network -> topics.
/// Validation problems throw ValidationError before any file is written.
/// A stage failure rethrows the stage error prefixed with the stage name.
/// The output directory must be absent, empty, or hold a previous run.
RunManifest run(const RunConfig& config);

/// Supported figure ids, in order.
const std::vector<std::string>& figure_ids();

/// Writes plot_<figure>.tsv with columns x, series, y from the tables of a
/// previous run and records it in the manifest. Throws ValidationError for
/// an unknown id or when the analysis feeding the figure was not run.
ManifestEntry emit_plot_series(const std::filesystem::path& out_dir, const std::string& figure_id);

struct TuneReport {
  gender::TuneResult result;
  double target = 0.0;
  std::size_t names = 0;  // corpus authors scored
};

/// Fits the classifier and tunes tau against `target` (defaults to the
/// config's tune_target, else 0.8) over the corpus authors.
TuneReport tune(const RunConfig& config, std::optional<double> target);

}  // namespace bibliostat::pipeline

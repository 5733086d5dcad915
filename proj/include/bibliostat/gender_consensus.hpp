#pragma once

// Consensus-based gender inference from names.
//
// N sources each vote male (0) or female (1) on some of M names. Each source
// has a competence c_n, the probability it reports the consensus label. The
// posterior that name m is female is
//
//   z_m = prod_n l1 / (prod_n l1 + prod_n l0),
//   l1 = x c + (1-x)(1-c),  l0 = x (1-c) + (1-x) c,
//
// taken over the sources that answered m. Competences are re-estimated as the
// mean agreement with the current consensus, and the two updates alternate
// (EM) until the posteriors stop moving.

#include "bibliostat/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bibliostat::gender {

enum class Method {
  uncertainty_threshold,  // "default": unknown when u > tau
  pgf_only,               // female iff pgf >= 0.5
};

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view token);

struct ClassifierConfig {
  double tau = 0.1;
  Method method = Method::uncertainty_threshold;
  bool improvement_enabled = true;
  double em_tolerance = 1e-6;
  int em_max_iters = 1000;
  double competence_epsilon = 1e-3;

  /// Throws ValidationError when a field is out of range.
  void validate() const;
};

/// Lookup key for a raw name: diacritics removed, lowercased, whitespace
/// trimmed and collapsed. With the improvement, a leading initial token
/// ("J" or "J.") is dropped once. May return an empty key.
std::string normalize_name(std::string_view raw, bool improvement_enabled);

/// u = 0.5 - |0.5 - pgf|
inline double uncertainty(double pgf) {
  const double d = 0.5 - pgf;
  return 0.5 - (d < 0 ? -d : d);
}

struct Response {
  std::string source;
  std::string name;
  int vote = 0;  // 0 male, 1 female
};

/// Dense source-major vote matrix. Each cell holds +1 (female), -1 (male) or
/// 0 (no answer). Names and sources are sorted.
class ResponseMatrix {
 public:
  /// Names are normalized (without the initials rule). Throws ValidationError
  /// on an out-of-range vote, a blank name, or conflicting duplicate votes.
  static ResponseMatrix from_responses(std::span<const Response> responses);

  /// TSV rows: source_id <TAB> name_key <TAB> vote.
  static ResponseMatrix load(const std::filesystem::path& path);

  std::size_t name_count() const { return names_.size(); }
  std::size_t source_count() const { return sources_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::string>& sources() const { return sources_; }

  std::optional<std::size_t> find_name(std::string_view key) const;

  std::span<const std::int8_t> source_signs(std::size_t source) const {
    return {signs_.data() + source * names_.size(), names_.size()};
  }
  std::int8_t sign(std::size_t source, std::size_t name) const {
    return signs_[source * names_.size() + name];
  }
  /// Votes on one name, one entry per source.
  std::vector<std::int8_t> name_signs(std::size_t name) const;

  std::size_t answered(std::size_t source) const { return answered_[source]; }
  std::size_t male_votes(std::size_t source) const { return male_votes_[source]; }

 private:
  std::vector<std::string> names_;
  std::vector<std::string> sources_;
  std::vector<std::int8_t> signs_;
  std::vector<std::size_t> answered_;
  std::vector<std::size_t> male_votes_;
};

/// Posterior that a name is female given its votes (one sign per source,
/// 0 = no answer) and fixed competences (each clamped to [eps, 1-eps]).
/// Throws std::invalid_argument when no source voted.
double posterior_female(std::span<const std::int8_t> votes, std::span<const double> competences,
                        double epsilon);

/// E-step over all names.
void e_step(const ResponseMatrix& matrix, std::span<const double> competences,
            std::span<double> pgf_out);

/// M-step: mean agreement with the consensus over answered names, clamped.
void m_step(const ResponseMatrix& matrix, std::span<const double> pgf, double epsilon,
            std::span<double> competences_out);

struct EmResult {
  std::vector<double> pgf;         // by matrix name index
  std::vector<double> competence;  // by matrix source index
  int iterations = 0;
  bool converged = false;
  double final_delta = 0.0;
};

inline constexpr double kInitialCompetence = 0.75;

/// Alternates M and E steps from c_n = 0.75 until max |dz| < em_tolerance or
/// em_max_iters rounds. Non-convergence is flagged, not thrown.
EmResult em_fit(const ResponseMatrix& matrix, const ClassifierConfig& config);

using PgfMap = std::map<std::string, double, std::less<>>;

PgfMap to_pgf_map(const ResponseMatrix& matrix, const EmResult& fit);

/// Looks up the full key, then its first word (the given name).
std::optional<double> lookup_pgf(std::string_view name_key, const PgfMap& estimates);

struct ConsensusEstimate {
  std::string name_key;
  std::optional<double> pgf;          // absent when the name was not found
  std::optional<double> uncertainty;  // present iff pgf is
  Gender label = Gender::unknown;
  bool from_ground_truth = false;

  bool found() const { return pgf.has_value(); }
};

ConsensusEstimate predict(std::string_view name_key, const PgfMap& estimates,
                          const ClassifierConfig& config);

/// normalize_name + predict.
ConsensusEstimate classify(std::string_view raw_name, const PgfMap& estimates,
                           const ClassifierConfig& config);

/// Canonical author name -> estimate.
using Predictions = std::map<std::string, ConsensusEstimate>;

struct EvaluationReport {
  std::size_t unclassified = 0;  // c_u
  std::size_t classified = 0;    // c
  std::size_t correct = 0;       // p
  std::optional<double> accuracy;             // p / (c_u + c)
  std::optional<double> classified_accuracy;  // p / c
  std::optional<double> coverage;             // c / (c_u + c)
};

/// Throws ValidationError when a predicted name has no ground-truth label.
EvaluationReport evaluate(const Predictions& predictions, const GenderTable& truth);

/// Fraction of estimates with u <= tau; not-found names stay in the denominator.
double coverage_at(std::span<const ConsensusEstimate> estimates, double tau);

/// {0.02, 0.04, ..., 0.30}
std::vector<double> default_tau_grid();

struct TuneResult {
  double tau = 0.0;
  bool target_met = false;
  std::vector<std::pair<double, double>> coverage_by_tau;
};

/// Smallest grid tau whose coverage strictly exceeds `target_coverage`; when
/// none does, the largest grid value with target_met = false.
/// Throws std::invalid_argument for an empty or unsorted grid or a target
/// outside (0, 1].
TuneResult tune_threshold(std::span<const ConsensusEstimate> estimates, double target_coverage,
                          std::span<const double> grid);

/// Overwrites every prediction whose name has a ground-truth label.
Predictions integrate_ground_truth(Predictions predictions, const GenderTable& truth);

}  // namespace bibliostat::gender

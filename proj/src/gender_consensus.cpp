#include "bibliostat/gender_consensus.hpp"

#include "bibliostat/error.hpp"
#include "bibliostat/simd/kernels.hpp"
#include "bibliostat/text.hpp"
#include "bibliostat/tsv.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace bibliostat::gender {
namespace {

double clamp_competence(double c, double epsilon) { return std::clamp(c, epsilon, 1.0 - epsilon); }

double log_odds(double c) { return std::log(c / (1.0 - c)); }

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Gender label_from_pgf(double pgf) { return pgf >= 0.5 ? Gender::female : Gender::male; }

}  // namespace

std::string_view to_string(Method m) {
  return m == Method::pgf_only ? "pgf" : "default";
}

std::optional<Method> parse_method(std::string_view token) {
  if (token == "default") {
    return Method::uncertainty_threshold;
  }
  if (token == "pgf" || token == "pgf_only") {
    return Method::pgf_only;
  }
  return std::nullopt;
}

void ClassifierConfig::validate() const {
  if (!(tau >= 0.0 && tau <= 0.5)) {
    throw ValidationError("classifier tau must lie in [0, 0.5]");
  }
  if (!(em_tolerance > 0.0)) {
    throw ValidationError("em_tolerance must be positive");
  }
  if (em_max_iters < 1) {
    throw ValidationError("em_max_iters must be at least 1");
  }
  if (!(competence_epsilon > 0.0 && competence_epsilon < 0.5)) {
    throw ValidationError("competence_epsilon must lie in (0, 0.5)");
  }
}

std::string normalize_name(std::string_view raw, bool improvement_enabled) {
  std::string key = text::fold_diacritics_lower(raw);
  if (!improvement_enabled) {
    return key;
  }
  const std::size_t space = key.find(' ');
  const std::string_view first = std::string_view(key).substr(0, space);
  if (!text::is_initial(first)) {
    return key;
  }
  return space == std::string::npos ? std::string() : key.substr(space + 1);
}

ResponseMatrix ResponseMatrix::from_responses(std::span<const Response> responses) {
  std::set<std::string> names;
  std::set<std::string> sources;
  std::vector<std::string> keys;
  keys.reserve(responses.size());
  for (const auto& r : responses) {
    if (r.vote != 0 && r.vote != 1) {
      throw ValidationError("vote must be 0 or 1 (source " + r.source + ", name " + r.name + ")");
    }
    std::string key = normalize_name(r.name, false);
    if (key.empty() || r.source.empty()) {
      throw ValidationError("blank source or name in response matrix");
    }
    names.insert(key);
    sources.insert(r.source);
    keys.push_back(std::move(key));
  }
  if (names.empty()) {
    throw ValidationError("response matrix is empty");
  }
  ResponseMatrix m;
  m.names_.assign(names.begin(), names.end());
  m.sources_.assign(sources.begin(), sources.end());
  m.signs_.assign(m.names_.size() * m.sources_.size(), 0);
  m.answered_.assign(m.sources_.size(), 0);
  m.male_votes_.assign(m.sources_.size(), 0);
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const auto n = static_cast<std::size_t>(
        std::lower_bound(m.sources_.begin(), m.sources_.end(), responses[i].source) -
        m.sources_.begin());
    const auto k = *m.find_name(keys[i]);
    const std::int8_t s = responses[i].vote == 1 ? 1 : -1;
    std::int8_t& cell = m.signs_[n * m.names_.size() + k];
    if (cell != 0 && cell != s) {
      throw ValidationError("conflicting votes from source " + responses[i].source +
                            " for name '" + keys[i] + "'");
    }
    if (cell == 0) {
      cell = s;
      ++m.answered_[n];
      if (s < 0) {
        ++m.male_votes_[n];
      }
    }
  }
  return m;
}

ResponseMatrix ResponseMatrix::load(const std::filesystem::path& path) {
  const std::string source = path.string();
  std::vector<Response> responses;
  for (const auto& row : tsv::read(path)) {
    const std::string where = at_line(source, row.line, "");
    if (row.fields.size() != 3) {
      throw ValidationError(where + "expected 3 columns (source, name, vote)");
    }
    if (row.fields[2] != "0" && row.fields[2] != "1") {
      throw ValidationError(where + "vote must be 0 or 1, got '" + row.fields[2] + "'");
    }
    responses.push_back(Response{row.fields[0], row.fields[1], row.fields[2] == "1" ? 1 : 0});
  }
  try {
    return from_responses(responses);
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

std::optional<std::size_t> ResponseMatrix::find_name(std::string_view key) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), key);
  if (it == names_.end() || *it != key) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<std::int8_t> ResponseMatrix::name_signs(std::size_t name) const {
  std::vector<std::int8_t> out(sources_.size());
  for (std::size_t n = 0; n < sources_.size(); ++n) {
    out[n] = sign(n, name);
  }
  return out;
}

double posterior_female(std::span<const std::int8_t> votes, std::span<const double> competences,
                        double epsilon) {
  if (votes.size() != competences.size()) {
    throw std::invalid_argument("votes and competences differ in length");
  }
  bool any = false;
  double log_ratio = 0.0;
  for (std::size_t n = 0; n < votes.size(); ++n) {
    any = any || votes[n] != 0;
    log_ratio += static_cast<double>(votes[n]) * log_odds(clamp_competence(competences[n], epsilon));
  }
  if (!any) {
    throw std::invalid_argument("no source voted on this name");
  }
  return logistic(log_ratio);
}

void e_step(const ResponseMatrix& matrix, std::span<const double> competences,
            std::span<double> pgf_out) {
  std::fill(pgf_out.begin(), pgf_out.end(), 0.0);
  for (std::size_t n = 0; n < matrix.source_count(); ++n) {
    simd::accumulate_signed(matrix.source_signs(n), log_odds(competences[n]), pgf_out);
  }
  for (double& v : pgf_out) {
    v = logistic(v);
  }
}

void m_step(const ResponseMatrix& matrix, std::span<const double> pgf, double epsilon,
            std::span<double> competences_out) {
  for (std::size_t n = 0; n < matrix.source_count(); ++n) {
    // agreement = z where the vote is female, 1 - z where it is male
    const double agreement =
        static_cast<double>(matrix.male_votes(n)) + simd::dot_signed(matrix.source_signs(n), pgf);
    competences_out[n] =
        clamp_competence(agreement / static_cast<double>(matrix.answered(n)), epsilon);
  }
}

EmResult em_fit(const ResponseMatrix& matrix, const ClassifierConfig& config) {
  config.validate();
  if (matrix.name_count() == 0 || matrix.source_count() == 0) {
    throw ValidationError("em_fit needs at least one name and one source");
  }
  EmResult r;
  r.competence.assign(matrix.source_count(),
                      clamp_competence(kInitialCompetence, config.competence_epsilon));
  r.pgf.assign(matrix.name_count(), 0.0);
  e_step(matrix, r.competence, r.pgf);

  std::vector<double> next(matrix.name_count());
  while (r.iterations < config.em_max_iters) {
    m_step(matrix, r.pgf, config.competence_epsilon, r.competence);
    e_step(matrix, r.competence, next);
    r.final_delta = simd::max_abs_diff(next, r.pgf);
    r.pgf.swap(next);
    ++r.iterations;
    if (r.final_delta < config.em_tolerance) {
      r.converged = true;
      break;
    }
  }
  return r;
}

PgfMap to_pgf_map(const ResponseMatrix& matrix, const EmResult& fit) {
  PgfMap out;
  for (std::size_t m = 0; m < matrix.name_count(); ++m) {
    out.emplace(matrix.names()[m], fit.pgf[m]);
  }
  return out;
}

std::optional<double> lookup_pgf(std::string_view name_key, const PgfMap& estimates) {
  if (name_key.empty()) {
    return std::nullopt;
  }
  if (auto it = estimates.find(name_key); it != estimates.end()) {
    return it->second;
  }
  const auto space = name_key.find(' ');
  if (space != std::string_view::npos) {
    if (auto it = estimates.find(name_key.substr(0, space)); it != estimates.end()) {
      return it->second;
    }
  }
  return std::nullopt;
}

ConsensusEstimate predict(std::string_view name_key, const PgfMap& estimates,
                          const ClassifierConfig& config) {
  ConsensusEstimate e;
  e.name_key = std::string(name_key);
  e.pgf = lookup_pgf(name_key, estimates);
  if (!e.pgf) {
    return e;
  }
  e.uncertainty = uncertainty(*e.pgf);
  if (config.method == Method::pgf_only || *e.uncertainty <= config.tau) {
    e.label = label_from_pgf(*e.pgf);
  }
  return e;
}

ConsensusEstimate classify(std::string_view raw_name, const PgfMap& estimates,
                           const ClassifierConfig& config) {
  return predict(normalize_name(raw_name, config.improvement_enabled), estimates, config);
}

EvaluationReport evaluate(const Predictions& predictions, const GenderTable& truth) {
  EvaluationReport r;
  for (const auto& [name, estimate] : predictions) {
    if (!truth.contains(name)) {
      throw ValidationError("no ground-truth label for '" + name + "'");
    }
    if (estimate.label == Gender::unknown) {
      ++r.unclassified;
      continue;
    }
    ++r.classified;
    if (estimate.label == truth.lookup(name)) {
      ++r.correct;
    }
  }
  const std::size_t total = r.unclassified + r.classified;
  if (total > 0) {
    r.accuracy = static_cast<double>(r.correct) / static_cast<double>(total);
    r.coverage = static_cast<double>(r.classified) / static_cast<double>(total);
  }
  if (r.classified > 0) {
    r.classified_accuracy = static_cast<double>(r.correct) / static_cast<double>(r.classified);
  }
  return r;
}

double coverage_at(std::span<const ConsensusEstimate> estimates, double tau) {
  if (estimates.empty()) {
    return 0.0;
  }
  std::size_t covered = 0;
  for (const auto& e : estimates) {
    if (e.uncertainty && *e.uncertainty <= tau) {
      ++covered;
    }
  }
  return static_cast<double>(covered) / static_cast<double>(estimates.size());
}

std::vector<double> default_tau_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 15; ++k) {
    grid.push_back(k / 50.0);
  }
  return grid;
}

TuneResult tune_threshold(std::span<const ConsensusEstimate> estimates, double target_coverage,
                          std::span<const double> grid) {
  if (grid.empty()) {
    throw std::invalid_argument("tau grid is empty");
  }
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw std::invalid_argument("tau grid must be sorted ascending");
  }
  if (!(target_coverage > 0.0 && target_coverage <= 1.0)) {
    throw std::invalid_argument("target coverage must lie in (0, 1]");
  }
  TuneResult r;
  for (double tau : grid) {
    r.coverage_by_tau.emplace_back(tau, coverage_at(estimates, tau));
  }
  for (const auto& [tau, coverage] : r.coverage_by_tau) {
    if (coverage > target_coverage) {
      r.tau = tau;
      r.target_met = true;
      return r;
    }
  }
  r.tau = grid.back();
  return r;
}

Predictions integrate_ground_truth(Predictions predictions, const GenderTable& truth) {
  for (auto& [name, estimate] : predictions) {
    if (!truth.contains(name)) {
      continue;
    }
    const Gender g = truth.lookup(name);
    estimate.label = g;
    estimate.pgf = g == Gender::female ? 1.0 : 0.0;
    estimate.uncertainty = 0.0;
    estimate.from_ground_truth = true;
  }
  return predictions;
}

}  // namespace bibliostat::gender

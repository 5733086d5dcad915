#include "bibliostat/pipeline.hpp"

#include "bibliostat/collab_network.hpp"
#include "bibliostat/error.hpp"
#include "bibliostat/team_analytics.hpp"
#include "bibliostat/text.hpp"
#include "bibliostat/topics.hpp"
#include "bibliostat/tsv.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>

namespace bibliostat::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kDefaultTuneTarget = 0.8;
constexpr std::size_t kTopCollaborators = 10;
constexpr std::size_t kTopPhrases = 15;

std::string str(std::size_t v) { return std::to_string(v); }
std::string str(int v) { return std::to_string(v); }
std::string str(std::int64_t v) { return std::to_string(v); }
std::string str(double v) { return tsv::format(v); }
std::string str(const std::optional<double>& v) { return tsv::format(v); }
std::string str(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : ""; }

fs::path resolve(const fs::path& base, const std::string& raw) {
  fs::path p(raw);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
      throw ValidationError(where + ": unknown key '" + key + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Inputs

struct LoadedInputs {
  corpus::Corpus corpus;  // filtered to the selected venues and years
  std::size_t papers_loaded = 0;
  std::vector<std::string> unknown_citation_ids;
  std::optional<GenderTable> truth;
  std::optional<gender::ResponseMatrix> responses;
  topics::TopicLexicon lexicon;
  std::vector<team::AwardEntry> awards;  // only those inside the selection
};

LoadedInputs load_inputs(const RunConfig& config) {
  LoadedInputs in;
  corpus::Corpus full = corpus::load_corpus(config.inputs.corpus, config.venues);
  full = corpus::resolve_identities(std::move(full), config.inputs.aliases);
  if (config.inputs.citations) {
    auto merged = corpus::merge_citations(std::move(full), *config.inputs.citations);
    full = std::move(merged.corpus);
    in.unknown_citation_ids = std::move(merged.unknown_ids);
  }
  if (config.inputs.ground_truth) {
    in.truth = corpus::load_ground_truth(*config.inputs.ground_truth);
    full.ground_truth = in.truth;
  }
  if (config.inputs.responses) {
    in.responses = gender::ResponseMatrix::load(*config.inputs.responses);
  }
  if (config.inputs.lexicon) {
    in.lexicon = topics::load_lexicon(*config.inputs.lexicon);
    std::set<std::string> ids;
    for (const auto& p : full.papers) {
      ids.insert(p.id);
    }
    for (const auto& [id, phrases] : in.lexicon.overrides) {
      if (!ids.contains(id)) {
        throw ValidationError(config.inputs.lexicon->string() + ": override for unknown paper id " + id);
      }
    }
  }
  std::vector<team::AwardEntry> awards;
  if (config.inputs.awards) {
    awards = team::load_awards(*config.inputs.awards);
    team::check_awards(awards, full);
  }

  in.papers_loaded = full.papers.size();
  const auto venues = config.selected_venues();
  const std::set<std::string> selected(venues.begin(), venues.end());
  std::vector<corpus::PaperRecord> kept;
  for (auto& p : full.papers) {
    const bool in_years =
        !config.year_range || (p.year >= config.year_range->first && p.year <= config.year_range->second);
    if (selected.contains(p.venue) && in_years) {
      kept.push_back(std::move(p));
    }
  }
  full.papers = std::move(kept);
  std::set<std::string> kept_ids;
  for (const auto& p : full.papers) {
    kept_ids.insert(p.id);
  }
  for (auto& a : awards) {
    if (kept_ids.contains(a.paper_id)) {
      in.awards.push_back(std::move(a));
    }
  }
  in.corpus = std::move(full);
  return in;
}

/// Canonical names of every author in the selection, sorted.
std::vector<std::string> corpus_authors(const corpus::Corpus& c) {
  std::set<std::string> names;
  for (const auto& p : c.papers) {
    for (auto& n : c.team(p)) {
      names.insert(std::move(n));
    }
  }
  return {names.begin(), names.end()};
}

gender::Predictions predict_all(const std::vector<std::string>& authors, const gender::PgfMap& pgf,
                                const gender::ClassifierConfig& cfg) {
  gender::Predictions out;
  for (const auto& name : authors) {
    out.emplace(name, gender::classify(name, pgf, cfg));
  }
  return out;
}

std::vector<gender::ConsensusEstimate> values_of(const gender::Predictions& p) {
  std::vector<gender::ConsensusEstimate> out;
  out.reserve(p.size());
  for (const auto& [name, e] : p) {
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output bookkeeping

class Writer {
 public:
  Writer(fs::path dir, std::string digest) : dir_(std::move(dir)), digest_(std::move(digest)) {}

  void add(const tsv::Table& table, const std::string& name, const std::string& operation) {
    table.write(dir_ / name);
    files_.push_back({name, table.rows(), operation, digest_});
  }

  std::vector<ManifestEntry> take() { return std::move(files_); }

 private:
  fs::path dir_;
  std::string digest_;
  std::vector<ManifestEntry> files_;
};

template <class F>
void stage(const char* name, F&& body) {
  try {
    body();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("stage ") + name + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
  }
}

void prepare_output_dir(const fs::path& dir) {
  if (dir.empty()) {
    throw ValidationError("no output directory; set output_dir or pass --out");
  }
  if (!fs::exists(dir)) {
    fs::create_directories(dir);
    return;
  }
  if (!fs::is_directory(dir)) {
    throw ValidationError("output path " + dir.string() + " is not a directory");
  }
  if (fs::exists(dir / kManifestName)) {
    const RunManifest previous = read_manifest(dir);
    for (const auto& f : previous.files) {
      fs::remove(dir / f.path);
    }
    fs::remove(dir / kManifestName);
  }
  if (!fs::is_empty(dir)) {
    throw ValidationError("output directory " + dir.string() +
                          " holds files that no previous run produced");
  }
}

// ---------------------------------------------------------------------------
// Stages

void corpus_stage(const LoadedInputs& in, const RunConfig& config, Writer& w) {
  tsv::Table t({"item", "venue", "value"});
  t.add({"papers_loaded", "", str(in.papers_loaded)});
  t.add({"papers_selected", "", str(in.corpus.papers.size())});
  t.add({"unknown_citation_ids", "", text::join(in.unknown_citation_ids, ",")});
  for (const auto& venue : config.selected_venues()) {
    std::size_t papers = 0;
    std::size_t cited = 0;
    std::optional<int> first;
    std::optional<int> last;
    std::set<std::string> authors;
    for (const auto& p : in.corpus.papers) {
      if (p.venue != venue) {
        continue;
      }
      ++papers;
      cited += p.citations ? 1 : 0;
      first = first ? std::min(*first, p.year) : p.year;
      last = last ? std::max(*last, p.year) : p.year;
      for (auto& n : in.corpus.team(p)) {
        authors.insert(std::move(n));
      }
    }
    t.add({"papers", venue, str(papers)});
    t.add({"authors", venue, str(authors.size())});
    t.add({"papers_with_citations", venue, str(cited)});
    t.add({"first_year", venue, first ? str(*first) : ""});
    t.add({"last_year", venue, last ? str(*last) : ""});
  }
  w.add(t, "corpus_report.tsv", "corpus.validate");
}

GenderTable gender_stage(const LoadedInputs& in, const RunConfig& config, Writer& w) {
  const gender::ResponseMatrix& matrix = *in.responses;
  gender::ClassifierConfig cfg = config.classifier;
  const gender::EmResult fit = gender::em_fit(matrix, cfg);
  const gender::PgfMap pgf = gender::to_pgf_map(matrix, fit);

  tsv::Table competences({"source", "competence", "answered"});
  for (std::size_t n = 0; n < matrix.source_count(); ++n) {
    competences.add({matrix.sources()[n], str(fit.competence[n]), str(matrix.answered(n))});
  }
  w.add(competences, "gender_competences.tsv", "gender_consensus.em_fit");

  tsv::Table estimates({"name_key", "pgf", "uncertainty"});
  for (const auto& [key, z] : pgf) {
    estimates.add({key, str(z), str(gender::uncertainty(z))});
  }
  w.add(estimates, "gender_name_estimates.tsv", "gender_consensus.em_fit");

  const auto authors = corpus_authors(in.corpus);
  gender::Predictions predictions = predict_all(authors, pgf, cfg);

  if (config.tune_target) {
    const auto grid = gender::default_tau_grid();
    const auto all = values_of(predictions);
    const auto tuned = gender::tune_threshold(all, *config.tune_target, grid);
    tsv::Table t({"tau", "coverage", "selected"});
    for (const auto& [tau, coverage] : tuned.coverage_by_tau) {
      t.add({str(tau), str(coverage), tau == tuned.tau ? (tuned.target_met ? "1" : "fallback") : "0"});
    }
    w.add(t, "gender_tuning.tsv", "gender_consensus.tune_threshold");
    cfg.tau = tuned.tau;
    predictions = predict_all(authors, pgf, cfg);
  }

  tsv::Table summary({"item", "value"});
  summary.add({"em_iterations", str(fit.iterations)});
  summary.add({"em_converged", fit.converged ? "1" : "0"});
  summary.add({"em_final_delta", str(fit.final_delta)});
  summary.add({"method", std::string(gender::to_string(cfg.method))});
  summary.add({"tau", str(cfg.tau)});
  summary.add({"improvement", cfg.improvement_enabled ? "1" : "0"});
  summary.add({"authors", str(authors.size())});
  w.add(summary, "gender_fit.tsv", "gender_consensus.em_fit");

  if (in.truth) {
    gender::Predictions labelled;
    for (const auto& [name, e] : predictions) {
      if (in.truth->contains(name)) {
        labelled.emplace(name, e);
      }
    }
    const auto report = gender::evaluate(labelled, *in.truth);
    tsv::Table t({"metric", "value"});
    t.add({"names", str(labelled.size())});
    t.add({"classified", str(report.classified)});
    t.add({"unclassified", str(report.unclassified)});
    t.add({"correct", str(report.correct)});
    t.add({"accuracy", str(report.accuracy)});
    t.add({"classified_accuracy", str(report.classified_accuracy)});
    t.add({"coverage", str(report.coverage)});
    w.add(t, "gender_evaluation.tsv", "gender_consensus.evaluate");
    predictions = gender::integrate_ground_truth(std::move(predictions), *in.truth);
  }

  GenderTable genders;
  tsv::Table t({"author", "name_key", "pgf", "uncertainty", "label", "origin"});
  for (const auto& [name, e] : predictions) {
    genders.set(name, e.label);
    const char* origin = e.from_ground_truth ? "ground_truth" : e.found() ? "consensus" : "not_found";
    t.add({name, e.name_key, str(e.pgf), str(e.uncertainty), std::string(to_string(e.label)), origin});
  }
  w.add(t, "author_genders.tsv", "gender_consensus.classify");
  return genders;
}

tsv::Table share_table(const std::vector<team::ShareRow>& rows) {
  tsv::Table t({"venue", "year", "category", "count", "percentage"});
  for (const auto& r : rows) {
    t.add({r.venue, str(r.year), r.category, str(r.count), str(r.percentage)});
  }
  return t;
}

tsv::Table cohort_table(const team::CohortTable& cohorts) {
  tsv::Table t({"venue", "group", "subgroup", "papers", "percentage", "cited_papers", "mean_citations"});
  for (const auto& r : cohorts.rows) {
    t.add({r.venue, r.group, r.subgroup, str(r.papers), str(r.percentage), str(r.cited_papers),
           str(r.mean_citations)});
  }
  for (const auto& e : cohorts.excluded) {
    t.add({e.venue, "excluded", "", str(e.papers), "", "", ""});
  }
  return t;
}

void team_stage(const LoadedInputs& in, const GenderTable& genders, Writer& w) {
  const corpus::Corpus& c = in.corpus;
  const auto records = team::build_team_records(c, genders);

  tsv::Table volume({"venue", "year", "papers"});
  for (const auto& r : team::annual_publication_volume(c)) {
    volume.add({r.venue, str(r.year), str(r.papers)});
  }
  w.add(volume, "team_volume.tsv", "team_analytics.annual_publication_volume");

  tsv::Table sizes({"venue", "year", "papers", "mean", "median"});
  for (const auto& r : team::annual_team_size_stats(c)) {
    sizes.add({r.venue, r.year ? str(*r.year) : "all", str(r.papers), str(r.mean), str(r.median)});
  }
  w.add(sizes, "team_size_stats.tsv", "team_analytics.annual_team_size_stats");

  tsv::Table hist({"venue", "team_size", "papers", "percentage"});
  for (const auto& r : team::team_size_histogram(c)) {
    hist.add({r.venue, str(r.team_size), str(r.papers), str(r.percentage)});
  }
  w.add(hist, "team_size_histogram.tsv", "team_analytics.team_size_histogram");

  w.add(share_table(team::team_size_distribution(c)), "team_size_shares.tsv",
        "team_analytics.team_size_distribution");

  tsv::Table series({"venue", "year", "cumulative_male", "cumulative_female", "cumulative_unknown",
                     "active_male", "active_female", "active_unknown", "male_share", "female_share"});
  for (const auto& r : team::author_gender_series(c, genders)) {
    series.add({r.venue, str(r.year), str(r.cumulative_male), str(r.cumulative_female),
                str(r.cumulative_unknown), str(r.active_male), str(r.active_female),
                str(r.active_unknown), str(r.male_share), str(r.female_share)});
  }
  w.add(series, "team_gender_series.tsv", "team_analytics.author_gender_series");

  w.add(share_table(team::annual_composition_shares(records)), "team_composition_shares.tsv",
        "team_analytics.annual_composition_shares");
  w.add(share_table(team::annual_first_author_shares(records)), "team_first_author_shares.tsv",
        "team_analytics.annual_first_author_shares");
  w.add(cohort_table(team::citations_by_team_size(records)), "team_citations_by_size.tsv",
        "team_analytics.citations_by_team_size");
  w.add(cohort_table(team::citations_by_composition(records)), "team_citations_by_composition.tsv",
        "team_analytics.citations_by_composition");
  w.add(cohort_table(team::citations_by_first_author(records)), "team_citations_by_first_author.tsv",
        "team_analytics.citations_by_first_author");

  const auto decile = team::top_decile(records);
  tsv::Table dsum({"venue", "candidates", "selected", "max_citations", "mean_citations",
                   "median_citations", "paper_ids"});
  for (const auto& s : decile.summaries) {
    dsum.add({s.venue, str(s.candidates), str(s.paper_ids.size()), str(s.max_citations),
              str(s.mean_citations), str(s.median_citations), text::join(s.paper_ids, ",")});
  }
  w.add(dsum, "team_top_decile.tsv", "team_analytics.top_decile");
  w.add(cohort_table(decile.by_composition), "team_top_decile_composition.tsv",
        "team_analytics.top_decile");
  w.add(cohort_table(decile.by_first_author), "team_top_decile_first_author.tsv",
        "team_analytics.top_decile");

  tsv::Table prod({"venue", "collaborators", "authors", "mean_papers"});
  for (const auto& r : team::productivity_vs_collaborators(c)) {
    prod.add({r.venue, str(r.collaborators), str(r.authors), str(r.mean_papers)});
  }
  w.add(prod, "team_productivity.tsv", "team_analytics.productivity_vs_collaborators");

  tsv::Table top({"venue", "author", "papers", "max_citations"});
  for (const auto& r : team::top_producers_max_citation(c)) {
    top.add({r.venue, r.author, str(r.papers), str(r.max_citations)});
  }
  w.add(top, "team_top_producers.tsv", "team_analytics.top_producers_max_citation");

  if (!in.awards.empty()) {
    const auto s = team::award_summary(in.awards, c, genders);
    tsv::Table t({"item", "value"});
    t.add({"papers", str(s.papers)});
    t.add({"small_teams", str(s.small_teams)});
    t.add({"big_teams", str(s.big_teams)});
    t.add({"male_authors", str(s.male_authors)});
    t.add({"female_authors", str(s.female_authors)});
    t.add({"unknown_authors", str(s.unknown_authors)});
    t.add({"all_male", str(s.all_male)});
    t.add({"all_female", str(s.all_female)});
    t.add({"mixed", str(s.mixed)});
    t.add({"undetermined", str(s.undetermined)});
    t.add({"male_first", str(s.male_first)});
    t.add({"female_first", str(s.female_first)});
    t.add({"unknown_first", str(s.unknown_first)});
    w.add(t, "team_awards.tsv", "team_analytics.award_summary");
  }
}

std::vector<int> years_of(const corpus::Corpus& c, const std::string& venue) {
  std::set<int> years;
  for (const auto& p : c.papers) {
    if (p.venue == venue) {
      years.insert(p.year);
    }
  }
  return {years.begin(), years.end()};
}

void network_stage(const LoadedInputs& in, const RunConfig& config, Writer& w) {
  const corpus::Corpus& c = in.corpus;
  tsv::Table metrics({"venue", "year", "metric", "value"});
  tsv::Table degrees({"venue", "degree", "nodes"});
  tsv::Table islands({"venue", "year", "authors", "islands", "largest"});
  tsv::Table top({"venue", "year", "rank", "island_id", "size"});
  tsv::Table merges({"venue", "year", "survivor", "absorbed"});
  tsv::Table collaborators({"venue", "rank", "author", "degree"});

  for (const auto& venue : config.selected_venues()) {
    const auto years = years_of(c, venue);
    if (years.empty()) {
      continue;
    }
    std::vector<network::IslandSnapshot> snapshots;
    for (int year : years) {
      const auto g = network::CollabGraph::build(c, venue, year);
      snapshots.push_back(network::connected_components(g));
      std::size_t authors = 0;
      for (const auto& isl : snapshots.back().islands) {
        authors += isl.members.size();
      }
      islands.add({venue, str(year), str(authors), str(snapshots.back().islands.size()),
                   str(snapshots.back().islands.front().members.size())});
    }
    const auto timeline = network::track_islands(snapshots);
    for (const auto& snap : snapshots) {
      for (std::size_t i = 0; i < std::min<std::size_t>(3, snap.islands.size()); ++i) {
        top.add({venue, str(snap.year), str(i + 1), str(snap.island_ids[i]),
                 str(snap.islands[i].members.size())});
      }
    }
    for (const auto& m : timeline.merges) {
      std::vector<std::string> absorbed;
      for (int id : m.absorbed) {
        absorbed.push_back(str(id));
      }
      merges.add({venue, str(m.year), str(m.survivor), text::join(absorbed, ",")});
    }

    const int last = years.back();
    const auto g = network::CollabGraph::build(c, venue, last);
    for (const auto& [degree, nodes] : network::degree_distribution(g)) {
      degrees.add({venue, str(degree), str(nodes)});
    }
    std::size_t rank = 0;
    for (const auto& col : network::top_collaborators(g, kTopCollaborators)) {
      collaborators.add({venue, str(++rank), col.name, str(col.degree)});
    }

    const auto m = network::newman_metrics(c, venue, last);
    auto put = [&](const char* name, const std::string& value) {
      metrics.add({venue, str(last), name, value});
    };
    put("total_papers", str(m.total_papers));
    put("total_authors", str(m.total_authors));
    put("authorships", str(m.authorships));
    put("papers_per_author", str(m.papers_per_author));
    put("authors_per_paper", str(m.authors_per_paper));
    put("collaborators_per_author", str(m.collaborators_per_author));
    put("power_law_fitted", m.power_law.fitted ? "1" : "0");
    put("power_law_exponent", m.power_law.fitted ? str(m.power_law.exponent) : "");
    put("power_law_cutoff", m.power_law.fitted ? str(m.power_law.cutoff) : "");
    put("power_law_ks", m.power_law.fitted ? str(m.power_law.ks_distance) : "");
    put("power_law_note", m.power_law.reason);
    put("giant_size", str(m.giant_size));
    put("giant_fraction", str(m.giant_fraction));
    put("second_component_size", str(m.second_component_size));
    put("mean_path_length", str(m.mean_path_length));
    put("max_path_length", str(m.max_path_length));
    put("clustering_coefficient", str(m.clustering_coefficient));
  }
  w.add(metrics, "network_metrics.tsv", "collab_network.newman_metrics");
  w.add(degrees, "network_degree_distribution.tsv", "collab_network.degree_distribution");
  w.add(islands, "network_islands.tsv", "collab_network.connected_components");
  w.add(top, "network_top_islands.tsv", "collab_network.top_k_islands");
  w.add(merges, "network_island_merges.tsv", "collab_network.track_islands");
  w.add(collaborators, "network_top_collaborators.tsv", "collab_network.top_collaborators");
}

void topics_stage(const LoadedInputs& in, const RunConfig& config, Writer& w) {
  const auto assignments = topics::extract_corpus_topics(in.corpus, in.lexicon);
  w.add(topics::assignments_table(assignments), "topics_assignments.tsv", "topics.extract_topics");

  tsv::Table cumulative({"venue", "year", "cumulative_papers", "cumulative_topics"});
  for (const auto& r : topics::cumulative_topic_counts(assignments, in.corpus)) {
    cumulative.add({r.venue, str(r.year), str(r.cumulative_papers), str(r.cumulative_topics)});
  }
  w.add(cumulative, "topics_cumulative.tsv", "topics.cumulative_topic_counts");

  std::map<std::string, std::string> venue_of;
  for (const auto& p : in.corpus.papers) {
    venue_of[p.id] = p.venue;
  }
  tsv::Table freq({"venue", "rank", "phrase", "count"});
  for (const auto& venue : config.selected_venues()) {
    std::vector<topics::TopicAssignment> subset;
    for (const auto& a : assignments) {
      if (venue_of[a.paper_id] == venue) {
        subset.push_back(a);
      }
    }
    std::size_t rank = 0;
    for (const auto& f : topics::topic_frequency_table(subset)) {
      freq.add({venue, str(++rank), f.phrase, str(f.count)});
    }
  }
  w.add(freq, "topics_frequency.tsv", "topics.topic_frequency_table");
}

// ---------------------------------------------------------------------------
// Digest

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 unavailable");
    }
  }

  void update(std::string_view bytes) { EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size()); }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[md[i] >> 4];
      out += kHex[md[i] & 0xf];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ordered_json analyses_json(const Analyses& a) {
  return ordered_json{{"gender", a.gender}, {"team", a.team}, {"network", a.network}, {"topics", a.topics}};
}

// ---------------------------------------------------------------------------
// Figures

struct FigureSpec {
  std::string id;
  std::string source;                 // table in the run directory
  std::vector<const char*> analyses;  // toggles the table depends on
  std::function<tsv::Table(const tsv::Table&)> build;
};

std::size_t column(const tsv::Table& t, const std::string& name) {
  const auto& h = t.header();
  auto it = std::find(h.begin(), h.end(), name);
  if (it == h.end()) {
    throw ValidationError("column '" + name + "' missing");
  }
  return static_cast<std::size_t>(it - h.begin());
}

tsv::Table xy_table() { return tsv::Table({"x", "series", "y"}); }

// One series per venue.
std::function<tsv::Table(const tsv::Table&)> by_venue(std::string x, std::string y) {
  return [x, y](const tsv::Table& src) {
    auto out = xy_table();
    const auto cv = column(src, "venue");
    const auto cx = column(src, x);
    const auto cy = column(src, y);
    for (const auto& r : src.data()) {
      if (!r[cy].empty()) {
        out.add({r[cx], r[cv], r[cy]});
      }
    }
    return out;
  };
}

// One series per venue and value column.
std::function<tsv::Table(const tsv::Table&)> by_venue_columns(std::string x, std::vector<std::string> ys) {
  return [x, ys](const tsv::Table& src) {
    auto out = xy_table();
    const auto cv = column(src, "venue");
    const auto cx = column(src, x);
    for (const auto& r : src.data()) {
      if (x == "year" && r[cx] == "all") {
        continue;
      }
      for (const auto& y : ys) {
        const auto& value = r[column(src, y)];
        if (!value.empty()) {
          out.add({r[cx], r[cv] + "/" + y, value});
        }
      }
    }
    return out;
  };
}

// One series per venue and category, percentages only.
tsv::Table shares(const tsv::Table& src) {
  auto out = xy_table();
  const auto cv = column(src, "venue");
  const auto cx = column(src, "year");
  const auto cc = column(src, "category");
  const auto cy = column(src, "percentage");
  for (const auto& r : src.data()) {
    if (!r[cy].empty()) {
      out.add({r[cx], r[cv] + "/" + r[cc], r[cy]});
    }
  }
  return out;
}

const std::vector<FigureSpec>& figure_specs() {
  static const std::vector<FigureSpec> specs = [] {
    std::vector<FigureSpec> s;
    s.push_back({"fig1", "team_volume.tsv", {"team"}, by_venue("year", "papers")});
    s.push_back({"fig2", "team_size_stats.tsv", {"team"}, by_venue_columns("year", {"mean", "median"})});
    s.push_back({"fig3", "team_size_histogram.tsv", {"team"}, by_venue("team_size", "percentage")});
    s.push_back({"fig4", "team_size_shares.tsv", {"team"}, shares});
    s.push_back({"fig5", "team_gender_series.tsv", {"gender", "team"},
                 by_venue_columns("year", {"cumulative_male", "cumulative_female"})});
    s.push_back({"fig6", "team_gender_series.tsv", {"gender", "team"},
                 by_venue_columns("year", {"male_share", "female_share"})});
    s.push_back({"fig7", "team_composition_shares.tsv", {"gender", "team"}, shares});
    s.push_back({"fig8", "team_first_author_shares.tsv", {"gender", "team"}, shares});
    s.push_back({"fig9", "team_productivity.tsv", {"team"}, by_venue("collaborators", "mean_papers")});
    s.push_back({"fig10", "team_top_producers.tsv", {"team"}, by_venue("author", "max_citations")});
    s.push_back({"fig12", "network_degree_distribution.tsv", {"network"}, by_venue("degree", "nodes")});
    s.push_back({"fig13", "network_islands.tsv", {"network"},
                 by_venue_columns("year", {"islands", "largest"})});
    s.push_back({"fig14", "network_top_islands.tsv", {"network"}, [](const tsv::Table& src) {
                   auto out = xy_table();
                   const auto cv = column(src, "venue");
                   const auto cx = column(src, "year");
                   const auto cr = column(src, "rank");
                   const auto cy = column(src, "size");
                   for (const auto& r : src.data()) {
                     out.add({r[cx], r[cv] + "/top" + r[cr], r[cy]});
                   }
                   return out;
                 }});
    s.push_back({"fig15", "topics_cumulative.tsv", {"topics"},
                 by_venue_columns("year", {"cumulative_papers", "cumulative_topics"})});
    s.push_back({"fig16", "topics_frequency.tsv", {"topics"}, [](const tsv::Table& src) {
                   auto out = xy_table();
                   const auto cv = column(src, "venue");
                   const auto cr = column(src, "rank");
                   const auto cp = column(src, "phrase");
                   const auto cy = column(src, "count");
                   for (const auto& r : src.data()) {
                     if (std::stoul(r[cr]) <= kTopPhrases) {
                       out.add({r[cp], r[cv], r[cy]});
                     }
                   }
                   return out;
                 }});
    return s;
  }();
  return specs;
}

bool toggle(const Analyses& a, const std::string& name) {
  if (name == "gender") return a.gender;
  if (name == "team") return a.team;
  if (name == "network") return a.network;
  return a.topics;
}

std::string canonical_figure_id(std::string id) {
  id = text::to_lower(id);
  if (id.rfind("fig", 0) == 0) {
    id = id.substr(3);
  }
  if (!id.empty() && (id.front() == '-' || id.front() == '_' || id.front() == '.')) {
    id = id.substr(1);
  }
  return "fig" + id;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

std::vector<std::string> RunConfig::selected_venues() const {
  if (!venue_filter.empty()) {
    std::set<std::string> s(venue_filter.begin(), venue_filter.end());
    return {s.begin(), s.end()};
  }
  std::vector<std::string> out;
  for (const auto& [name, range] : venues) {
    out.push_back(name);
  }
  return out;
}

RunConfig parse_config(const std::string& json_text, const fs::path& base_dir,
                       const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source_name + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ValidationError(source_name + ": config must be a JSON object");
  }
  RunConfig cfg;
  try {
    check_keys(doc, {"venues", "inputs", "classifier", "analyses", "output_dir", "venue_filter", "year_range"},
               source_name);
    if (!doc.contains("venues")) {
      throw ValidationError(source_name + ": missing 'venues'");
    }
    for (const auto& [name, range] : doc.at("venues").items()) {
      check_keys(range, {"inception", "end"}, source_name + ": venues." + name);
      cfg.venues[name] = {range.at("inception").get<int>(), range.at("end").get<int>()};
    }
    if (!doc.contains("inputs") || !doc.at("inputs").contains("corpus")) {
      throw ValidationError(source_name + ": missing 'inputs.corpus'");
    }
    const json& inputs = doc.at("inputs");
    check_keys(inputs, {"corpus", "citations", "ground_truth", "responses", "aliases", "lexicon", "awards"},
               source_name + ": inputs");
    cfg.inputs.corpus = resolve(base_dir, inputs.at("corpus").get<std::string>());
    auto optional_path = [&](const char* key, std::optional<fs::path>& slot) {
      if (inputs.contains(key) && !inputs.at(key).is_null()) {
        slot = resolve(base_dir, inputs.at(key).get<std::string>());
      }
    };
    optional_path("citations", cfg.inputs.citations);
    optional_path("ground_truth", cfg.inputs.ground_truth);
    optional_path("responses", cfg.inputs.responses);
    optional_path("aliases", cfg.inputs.aliases);
    optional_path("lexicon", cfg.inputs.lexicon);
    optional_path("awards", cfg.inputs.awards);

    if (doc.contains("classifier")) {
      const json& c = doc.at("classifier");
      check_keys(c, {"tau", "method", "improvement", "em_tolerance", "em_max_iters", "competence_epsilon",
                     "tune_target"},
                 source_name + ": classifier");
      auto& k = cfg.classifier;
      k.tau = c.value("tau", k.tau);
      if (c.contains("method")) {
        const auto m = gender::parse_method(c.at("method").get<std::string>());
        if (!m) {
          throw ValidationError(source_name + ": classifier.method must be 'default' or 'pgf'");
        }
        k.method = *m;
      }
      k.improvement_enabled = c.value("improvement", k.improvement_enabled);
      k.em_tolerance = c.value("em_tolerance", k.em_tolerance);
      k.em_max_iters = c.value("em_max_iters", k.em_max_iters);
      k.competence_epsilon = c.value("competence_epsilon", k.competence_epsilon);
      if (c.contains("tune_target") && !c.at("tune_target").is_null()) {
        cfg.tune_target = c.at("tune_target").get<double>();
      }
    }
    if (doc.contains("analyses")) {
      const json& a = doc.at("analyses");
      check_keys(a, {"gender", "team", "network", "topics"}, source_name + ": analyses");
      cfg.analyses.gender = a.value("gender", false);
      cfg.analyses.team = a.value("team", false);
      cfg.analyses.network = a.value("network", false);
      cfg.analyses.topics = a.value("topics", false);
    }
    if (doc.contains("output_dir")) {
      cfg.output_dir = resolve(base_dir, doc.at("output_dir").get<std::string>());
    }
    if (doc.contains("venue_filter")) {
      cfg.venue_filter = doc.at("venue_filter").get<std::vector<std::string>>();
    }
    if (doc.contains("year_range") && !doc.at("year_range").is_null()) {
      const auto r = doc.at("year_range").get<std::vector<int>>();
      if (r.size() != 2) {
        throw ValidationError(source_name + ": year_range must be [first, last]");
      }
      cfg.year_range = std::make_pair(r[0], r[1]);
    }
  } catch (const json::exception& e) {
    throw ValidationError(source_name + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open config " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path(), path.string());
}

std::vector<std::string> validate(const RunConfig& config) {
  std::vector<std::string> problems;
  if (config.venues.empty()) {
    problems.push_back("no venues configured");
  }
  for (const auto& [name, range] : config.venues) {
    if (range.inception > range.end) {
      problems.push_back("venue " + name + ": inception " + str(range.inception) + " after end " +
                         str(range.end));
    }
  }
  for (const auto& v : config.venue_filter) {
    if (!config.venues.contains(v)) {
      problems.push_back("venue filter names unconfigured venue " + v);
    }
  }
  if (config.year_range) {
    const auto [lo, hi] = *config.year_range;
    if (lo > hi) {
      problems.push_back("year range " + str(lo) + "-" + str(hi) + " is inverted");
    } else {
      std::optional<int> first;
      std::optional<int> last;
      for (const auto& v : config.selected_venues()) {
        auto it = config.venues.find(v);
        if (it == config.venues.end()) {
          continue;
        }
        first = first ? std::min(*first, it->second.inception) : it->second.inception;
        last = last ? std::max(*last, it->second.end) : it->second.end;
      }
      if (first && (lo < *first || hi > *last)) {
        problems.push_back("year range " + str(lo) + "-" + str(hi) + " lies outside the venue years " +
                           str(*first) + "-" + str(*last));
      }
    }
  }
  try {
    config.classifier.validate();
  } catch (const ValidationError& e) {
    problems.push_back(e.what());
  }
  if (config.tune_target && !(*config.tune_target > 0.0 && *config.tune_target <= 1.0)) {
    problems.push_back("classifier.tune_target must lie in (0, 1]");
  }
  if (config.analyses.gender && !config.inputs.responses) {
    problems.push_back("analyses.gender needs inputs.responses");
  }

  const std::vector<std::pair<const char*, std::optional<fs::path>>> paths = {
      {"corpus", config.inputs.corpus},           {"citations", config.inputs.citations},
      {"ground_truth", config.inputs.ground_truth}, {"responses", config.inputs.responses},
      {"aliases", config.inputs.aliases},         {"lexicon", config.inputs.lexicon},
      {"awards", config.inputs.awards}};
  bool paths_ok = true;
  for (const auto& [key, path] : paths) {
    if (path && !fs::is_regular_file(*path)) {
      problems.push_back(std::string("inputs.") + key + ": no such file " + path->string());
      paths_ok = false;
    }
  }
  if (paths_ok && problems.empty()) {
    try {
      load_inputs(config);
    } catch (const ValidationError& e) {
      problems.push_back(e.what());
    }
  }
  return problems;
}

std::string config_digest(const RunConfig& config) {
  ordered_json settings;
  ordered_json venues = ordered_json::object();
  for (const auto& [name, r] : config.venues) {
    venues[name] = {{"inception", r.inception}, {"end", r.end}};
  }
  settings["venues"] = venues;
  const auto& k = config.classifier;
  settings["classifier"] = {{"tau", tsv::format(k.tau)},
                            {"method", gender::to_string(k.method)},
                            {"improvement", k.improvement_enabled},
                            {"em_tolerance", tsv::format(k.em_tolerance)},
                            {"em_max_iters", k.em_max_iters},
                            {"competence_epsilon", tsv::format(k.competence_epsilon)},
                            {"tune_target", config.tune_target ? tsv::format(*config.tune_target) : ""}};
  settings["analyses"] = analyses_json(config.analyses);
  settings["venues_selected"] = config.selected_venues();
  settings["year_range"] = config.year_range
                               ? ordered_json::array({config.year_range->first, config.year_range->second})
                               : ordered_json();
  Sha256 sha;
  sha.update(settings.dump());
  const std::vector<std::pair<const char*, std::optional<fs::path>>> paths = {
      {"corpus", config.inputs.corpus},           {"citations", config.inputs.citations},
      {"ground_truth", config.inputs.ground_truth}, {"responses", config.inputs.responses},
      {"aliases", config.inputs.aliases},         {"lexicon", config.inputs.lexicon},
      {"awards", config.inputs.awards}};
  for (const auto& [key, path] : paths) {
    sha.update(std::string(1, '\0') + key + '\0');
    if (path) {
      const std::string bytes = read_bytes(*path);
      sha.update(std::to_string(bytes.size()) + '\0');
      sha.update(bytes);
    }
  }
  return sha.hex();
}

// ---------------------------------------------------------------------------
// Manifest

const ManifestEntry* RunManifest::find(const std::string& path) const {
  for (const auto& f : files) {
    if (f.path == path) {
      return &f;
    }
  }
  return nullptr;
}

RunManifest read_manifest(const fs::path& out_dir) {
  const fs::path path = out_dir / kManifestName;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("no manifest in " + out_dir.string() + "; run the pipeline first");
  }
  RunManifest m;
  try {
    const json doc = json::parse(in);
    m.config_digest = doc.at("config_digest").get<std::string>();
    const json& a = doc.at("analyses");
    m.analyses = {a.at("gender").get<bool>(), a.at("team").get<bool>(), a.at("network").get<bool>(),
                  a.at("topics").get<bool>()};
    for (const auto& f : doc.at("files")) {
      m.files.push_back({f.at("path").get<std::string>(), f.at("rows").get<std::size_t>(),
                         f.at("operation").get<std::string>(), f.at("config_digest").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return m;
}

void write_manifest(const RunManifest& manifest, const fs::path& out_dir) {
  ordered_json doc;
  doc["config_digest"] = manifest.config_digest;
  doc["analyses"] = analyses_json(manifest.analyses);
  doc["files"] = ordered_json::array();
  for (const auto& f : manifest.files) {
    doc["files"].push_back(
        {{"path", f.path}, {"rows", f.rows}, {"operation", f.operation}, {"config_digest", f.config_digest}});
  }
  std::ofstream out(out_dir / kManifestName, std::ios::binary);
  out << doc.dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("cannot write " + (out_dir / kManifestName).string());
  }
}

// ---------------------------------------------------------------------------
// Run

RunManifest run(const RunConfig& config) {
  const auto problems = validate(config);
  if (!problems.empty()) {
    throw ValidationError(text::join(problems, "\n"));
  }
  prepare_output_dir(config.output_dir);

  RunManifest manifest;
  manifest.config_digest = config_digest(config);
  manifest.analyses = config.analyses;
  Writer w(config.output_dir, manifest.config_digest);

  LoadedInputs in;
  stage("corpus", [&] {
    in = load_inputs(config);
    corpus_stage(in, config, w);
  });
  GenderTable genders = in.truth.value_or(GenderTable{});
  if (config.analyses.gender) {
    stage("gender_consensus", [&] { genders = gender_stage(in, config, w); });
  }
  if (config.analyses.team) {
    stage("team_analytics", [&] { team_stage(in, genders, w); });
  }
  if (config.analyses.network) {
    stage("collab_network", [&] { network_stage(in, config, w); });
  }
  if (config.analyses.topics) {
    stage("topics", [&] { topics_stage(in, config, w); });
  }
  manifest.files = w.take();
  write_manifest(manifest, config.output_dir);
  return manifest;
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& s : figure_specs()) {
      out.push_back(s.id);
    }
    return out;
  }();
  return ids;
}

ManifestEntry emit_plot_series(const fs::path& out_dir, const std::string& figure_id) {
  const std::string id = canonical_figure_id(figure_id);
  const auto& specs = figure_specs();
  auto spec = std::find_if(specs.begin(), specs.end(), [&](const FigureSpec& s) { return s.id == id; });
  if (spec == specs.end()) {
    throw ValidationError("unknown figure id '" + figure_id + "'; supported: " + text::join(figure_ids(), ", "));
  }
  RunManifest manifest = read_manifest(out_dir);
  for (const char* needed : spec->analyses) {
    if (!toggle(manifest.analyses, needed)) {
      throw ValidationError(id + " needs the " + needed + " analysis; enable analyses." + needed +
                            " and rerun");
    }
  }
  if (manifest.find(spec->source) == nullptr) {
    throw ValidationError(id + " needs " + spec->source + ", which the last run did not produce");
  }
  const tsv::Table series = spec->build(tsv::Table::load(out_dir / spec->source));
  const std::string name = "plot_" + id + ".tsv";
  series.write(out_dir / name);
  ManifestEntry entry{name, series.rows(), "pipeline.emit_plot_series", manifest.config_digest};
  auto existing = std::find_if(manifest.files.begin(), manifest.files.end(),
                               [&](const ManifestEntry& f) { return f.path == name; });
  if (existing != manifest.files.end()) {
    *existing = entry;
  } else {
    manifest.files.push_back(entry);
  }
  write_manifest(manifest, out_dir);
  return entry;
}

TuneReport tune(const RunConfig& config, std::optional<double> target) {
  if (!config.inputs.responses) {
    throw ValidationError("tuning needs inputs.responses");
  }
  auto problems = validate(config);
  if (!problems.empty()) {
    throw ValidationError(text::join(problems, "\n"));
  }
  TuneReport report;
  report.target = target.value_or(config.tune_target.value_or(kDefaultTuneTarget));
  if (!(report.target > 0.0 && report.target <= 1.0)) {
    throw ValidationError("tuning target must lie in (0, 1]");
  }
  const LoadedInputs in = load_inputs(config);
  const auto fit = gender::em_fit(*in.responses, config.classifier);
  const auto pgf = gender::to_pgf_map(*in.responses, fit);
  const auto authors = corpus_authors(in.corpus);
  const auto estimates = values_of(predict_all(authors, pgf, config.classifier));
  report.names = estimates.size();
  const auto grid = gender::default_tau_grid();
  report.result = gender::tune_threshold(estimates, report.target, grid);
  return report;
}

}  // namespace bibliostat::pipeline

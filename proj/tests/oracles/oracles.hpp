#pragma once

// Independent reference implementations used only by the tests. Each one is
// the most direct formulation available and shares no code with the library.

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// ---- consensus model ------------------------------------------------------

/// votes[n]: -1 no answer, 0 male, 1 female. Two-hypothesis Bayes with a
/// uniform prior, written as explicit likelihood products.
double bayes_female(const std::vector<int>& votes, const std::vector<double>& competences);

/// Dense votes[source][name] in the same encoding.
using VoteGrid = std::vector<std::vector<int>>;

std::vector<double> posteriors(const VoteGrid& votes, const std::vector<double>& competences);

/// Mean agreement of each source with the consensus over the names it
/// answered, clamped to [eps, 1 - eps].
std::vector<double> competences(const VoteGrid& votes, const std::vector<double>& pgf, double eps);

// ---- graphs ---------------------------------------------------------------

struct Graph {
  std::size_t n = 0;
  std::vector<std::vector<bool>> adj;

  explicit Graph(std::size_t nodes) : n(nodes), adj(nodes, std::vector<bool>(nodes, false)) {}
  void connect(std::size_t a, std::size_t b) { adj[a][b] = adj[b][a] = true; }
  std::size_t degree(std::size_t v) const;
  std::size_t edges() const;
};

/// Components by breadth-first search, as sets of node ids.
std::set<std::set<std::size_t>> components(const Graph& g);

std::map<std::size_t, std::size_t> degree_histogram(const Graph& g);

/// Triples i < j < k that are pairwise adjacent.
std::uint64_t triangles(const Graph& g);

struct Paths {
  double mean = 0.0;
  std::size_t max = 0;
};

/// Floyd-Warshall over the node set `members`.
Paths all_pairs(const Graph& g, const std::set<std::size_t>& members);

// ---- power law ------------------------------------------------------------

/// Hurwitz zeta by direct summation with an integral tail.
double naive_zeta(double s, double q);

/// Discrete power-law log-likelihood of x >= xmin.
double naive_log_likelihood(const std::map<std::size_t, std::size_t>& hist, std::size_t xmin,
                            double alpha);

/// Grid search of the likelihood over [lo, hi] in steps of `step`.
double grid_exponent(const std::map<std::size_t, std::size_t>& hist, std::size_t xmin, double lo,
                     double hi, double step);

/// Exact sampler for p(x) proportional to x^-alpha, x >= 1 (Devroye's
/// rejection method for the zeta distribution).
std::size_t sample_zeta(double alpha, std::mt19937_64& rng);

// ---- team analytics -------------------------------------------------------

/// Flat view of every analytics output. Keys are "table|field|...".
struct Recount {
  std::map<std::string, double> numbers;
  std::map<std::string, std::string> texts;
};

/// Re-reads the raw corpus, alias and citation files and recounts every
/// team statistic by direct enumeration. `genders` maps canonical names to
/// "male" / "female"; absent names are unknown. Awards are paper ids.
Recount recount_team_analytics(const std::filesystem::path& corpus_file,
                               const std::filesystem::path& alias_file,
                               const std::filesystem::path& citation_file,
                               const std::map<std::string, std::string>& genders,
                               const std::vector<std::string>& award_ids);

}  // namespace oracle

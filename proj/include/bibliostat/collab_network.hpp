#pragma once

// Co-authorship graphs. A graph for (venue, year) contains every author of the
// venue's papers up to and including that year; a k-author paper adds the
// C(k,2) edges of a clique. Edge weights count co-authored papers, but all
// metrics treat the graph as simple and unweighted.

#include "bibliostat/corpus.hpp"
#include "bibliostat/power_law.hpp"
#include "bibliostat/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bibliostat::network {

using NodeId = std::uint32_t;

struct Edge {
  NodeId a = 0;  // a < b
  NodeId b = 0;
  std::uint32_t weight = 0;
};

class CollabGraph {
 public:
  /// Nodes are sorted by canonical name. `genders` tags nodes when given.
  static CollabGraph build(const corpus::Corpus& corpus, const std::string& venue, int as_of_year,
                           const GenderTable* genders = nullptr);

  /// Graph over `names` (unique) with the given undirected edges; repeated
  /// edges add weight. Self-loops are rejected.
  static CollabGraph from_edges(std::vector<std::string> names,
                                std::span<const std::pair<NodeId, NodeId>> edges,
                                int as_of_year = 0);

  int as_of_year() const { return as_of_year_; }
  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::string& name(NodeId v) const { return names_[v]; }
  Gender gender(NodeId v) const { return genders_[v]; }
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }
  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
  std::uint32_t weight(NodeId a, NodeId b) const;
  std::optional<NodeId> find(const std::string& name) const;

  /// Edges with a < b, sorted.
  std::vector<Edge> edges() const;

 private:
  void add_edge(NodeId a, NodeId b);

  int as_of_year_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<std::string> names_;
  std::vector<Gender> genders_;
  std::vector<std::vector<NodeId>> adjacency_;       // sorted
  std::vector<std::vector<std::uint32_t>> weights_;  // parallel to adjacency_
};

struct Island {
  std::vector<std::string> members;  // sorted
  bool operator==(const Island&) const = default;
};

struct IslandSnapshot {
  int year = 0;
  std::vector<Island> islands;  // size desc, then smallest member
  std::vector<int> island_ids;  // filled by track_islands
};

/// Component index per node, numbered in the snapshot order.
std::vector<std::size_t> component_labels(const CollabGraph& graph);

IslandSnapshot connected_components(const CollabGraph& graph);

struct MergeEvent {
  int year = 0;
  int survivor = 0;
  std::vector<int> absorbed;  // ascending
  bool operator==(const MergeEvent&) const = default;
};

struct IslandHistory {
  int id = 0;
  int birth_year = 0;
  std::map<int, std::size_t> size_by_year;
  std::optional<int> merged_year;
  std::optional<int> merged_into;
};

struct IslandTimeline {
  std::map<int, IslandHistory> islands;
  std::vector<MergeEvent> merges;
};

/// Assigns stable ids to the islands of year-ordered cumulative snapshots.
/// An island containing several earlier islands keeps the id of the largest
/// of them (ties: earlier in the previous snapshot order) and records a merge.
/// Throws ValidationError when snapshots are not cumulative.
IslandTimeline track_islands(std::span<IslandSnapshot> snapshots);

struct TopIslands {
  int year = 0;
  std::vector<std::size_t> sizes;  // at most k, descending
};

std::vector<TopIslands> top_k_islands(std::span<const IslandSnapshot> snapshots, std::size_t k = 3);

/// degree -> node count
DegreeHistogram degree_distribution(const CollabGraph& graph);

struct Collaborator {
  std::string name;
  std::size_t degree = 0;
};

/// Top k nodes by degree, ties by name.
std::vector<Collaborator> top_collaborators(const CollabGraph& graph, std::size_t k);

struct PathMetrics {
  std::size_t giant_size = 0;
  std::optional<double> mean_path_length;  // absent when the giant has one node
  std::size_t max_path_length = 0;
};

/// Unweighted shortest paths inside the largest component.
PathMetrics path_metrics(const CollabGraph& graph);

std::uint64_t triangle_count(const CollabGraph& graph);
std::uint64_t connected_triples(const CollabGraph& graph);

/// 3 * triangles / connected triples; 0 when there are no triples.
double clustering_coefficient(const CollabGraph& graph);

struct NetworkMetrics {
  std::string venue;
  int year = 0;
  std::size_t total_papers = 0;
  std::size_t total_authors = 0;
  std::size_t authorships = 0;
  double papers_per_author = 0.0;
  double authors_per_paper = 0.0;
  double collaborators_per_author = 0.0;
  PowerLawFit power_law;
  std::size_t giant_size = 0;
  double giant_fraction = 0.0;
  std::size_t second_component_size = 0;
  std::optional<double> mean_path_length;
  std::size_t max_path_length = 0;
  double clustering_coefficient = 0.0;
};

/// Throws ValidationError when the venue has no papers up to `year`.
NetworkMetrics newman_metrics(const corpus::Corpus& corpus, const std::string& venue, int year);

}  // namespace bibliostat::network

#include "bibliostat/collab_network.hpp"

#include "bibliostat/error.hpp"
#include "bibliostat/simd/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace bibliostat::network {
namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) {
      return;
    }
    if (size_[a] < size_[b]) {
      std::swap(a, b);
    }
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

// Components as node lists, each sorted by node id, ordered size desc then
// by smallest member name.
std::vector<std::vector<NodeId>> ordered_components(const CollabGraph& g) {
  DisjointSet dsu(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    for (NodeId w : g.neighbors(v)) {
      if (v < w) {
        dsu.unite(v, w);
      }
    }
  }
  std::unordered_map<std::size_t, std::size_t> slot;
  std::vector<std::vector<NodeId>> comps;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto [it, inserted] = slot.emplace(dsu.find(v), comps.size());
    if (inserted) {
      comps.emplace_back();
    }
    comps[it->second].push_back(v);
  }
  std::vector<const std::string*> smallest(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string* best = &g.name(comps[i].front());
    for (NodeId v : comps[i]) {
      if (g.name(v) < *best) {
        best = &g.name(v);
      }
    }
    smallest[i] = best;
  }
  std::vector<std::size_t> order(comps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (comps[a].size() != comps[b].size()) {
      return comps[a].size() > comps[b].size();
    }
    return *smallest[a] < *smallest[b];
  });
  std::vector<std::vector<NodeId>> out;
  out.reserve(comps.size());
  for (std::size_t i : order) {
    out.push_back(std::move(comps[i]));
  }
  return out;
}

// Sum over edges of |N(u) & N(v)| equals three times the triangle count.
std::uint64_t triangle_count_bitset(const CollabGraph& g) {
  const std::size_t n = g.node_count();
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> rows(n * words, 0);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId w : g.neighbors(v)) {
      rows[v * words + w / 64] |= std::uint64_t{1} << (w % 64);
    }
  }
  std::uint64_t total = 0;
  for (NodeId v = 0; v < n; ++v) {
    const std::span<const std::uint64_t> rv(rows.data() + v * words, words);
    for (NodeId w : g.neighbors(v)) {
      if (v < w) {
        total += simd::popcount_and(rv, std::span<const std::uint64_t>(rows.data() + w * words, words));
      }
    }
  }
  return total / 3;
}

std::uint64_t triangle_count_merge(const CollabGraph& g) {
  std::uint64_t total = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto nv = g.neighbors(v);
    for (NodeId w : nv) {
      if (v >= w) {
        continue;
      }
      const auto nw = g.neighbors(w);
      auto a = nv.begin();
      auto b = nw.begin();
      while (a != nv.end() && b != nw.end()) {
        if (*a < *b) {
          ++a;
        } else if (*b < *a) {
          ++b;
        } else {
          ++total;
          ++a;
          ++b;
        }
      }
    }
  }
  return total / 3;
}

constexpr std::size_t kBitsetNodeLimit = 16384;

}  // namespace

CollabGraph CollabGraph::build(const corpus::Corpus& corpus, const std::string& venue,
                               int as_of_year, const GenderTable* genders) {
  const auto papers = corpus::papers_up_to(corpus, venue, as_of_year);
  std::set<std::string> names;
  std::vector<std::vector<std::string>> teams;
  teams.reserve(papers.size());
  for (const auto* p : papers) {
    teams.push_back(corpus.team(*p));
    names.insert(teams.back().begin(), teams.back().end());
  }
  CollabGraph g;
  g.as_of_year_ = as_of_year;
  g.names_.assign(names.begin(), names.end());
  g.genders_.assign(g.names_.size(), Gender::unknown);
  g.adjacency_.resize(g.names_.size());
  g.weights_.resize(g.names_.size());
  if (genders != nullptr) {
    for (std::size_t v = 0; v < g.names_.size(); ++v) {
      g.genders_[v] = genders->lookup(g.names_[v]);
    }
  }
  for (const auto& team : teams) {
    std::vector<NodeId> ids;
    for (const auto& name : team) {
      ids.push_back(*g.find(name));
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        g.add_edge(ids[i], ids[j]);
      }
    }
  }
  return g;
}

CollabGraph CollabGraph::from_edges(std::vector<std::string> names,
                                    std::span<const std::pair<NodeId, NodeId>> edges,
                                    int as_of_year) {
  CollabGraph g;
  g.as_of_year_ = as_of_year;
  g.names_ = std::move(names);
  if (std::set<std::string>(g.names_.begin(), g.names_.end()).size() != g.names_.size()) {
    throw std::invalid_argument("node names must be unique");
  }
  g.genders_.assign(g.names_.size(), Gender::unknown);
  g.adjacency_.resize(g.names_.size());
  g.weights_.resize(g.names_.size());
  for (const auto& [a, b] : edges) {
    if (a == b) {
      throw std::invalid_argument("self-loop on node " + std::to_string(a));
    }
    if (a >= g.names_.size() || b >= g.names_.size()) {
      throw std::out_of_range("edge endpoint out of range");
    }
    g.add_edge(a, b);
  }
  return g;
}

void CollabGraph::add_edge(NodeId a, NodeId b) {
  auto link = [this](NodeId from, NodeId to) {
    auto& adj = adjacency_[from];
    auto it = std::lower_bound(adj.begin(), adj.end(), to);
    const auto pos = static_cast<std::size_t>(it - adj.begin());
    if (it != adj.end() && *it == to) {
      ++weights_[from][pos];
      return false;
    }
    adj.insert(it, to);
    weights_[from].insert(weights_[from].begin() + static_cast<std::ptrdiff_t>(pos), 1);
    return true;
  };
  const bool fresh = link(a, b);
  link(b, a);
  if (fresh) {
    ++edge_count_;
  }
}

std::uint32_t CollabGraph::weight(NodeId a, NodeId b) const {
  const auto& adj = adjacency_[a];
  auto it = std::lower_bound(adj.begin(), adj.end(), b);
  if (it == adj.end() || *it != b) {
    return 0;
  }
  return weights_[a][static_cast<std::size_t>(it - adj.begin())];
}

std::optional<NodeId> CollabGraph::find(const std::string& name) const {
  // build() keeps names sorted; from_edges() may not
  if (std::is_sorted(names_.begin(), names_.end())) {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it != names_.end() && *it == name) {
      return static_cast<NodeId>(it - names_.begin());
    }
    return std::nullopt;
  }
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    return std::nullopt;
  }
  return static_cast<NodeId>(it - names_.begin());
}

std::vector<Edge> CollabGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId v = 0; v < names_.size(); ++v) {
    for (std::size_t i = 0; i < adjacency_[v].size(); ++i) {
      if (v < adjacency_[v][i]) {
        out.push_back({v, adjacency_[v][i], weights_[v][i]});
      }
    }
  }
  return out;
}

std::vector<std::size_t> component_labels(const CollabGraph& graph) {
  std::vector<std::size_t> labels(graph.node_count(), 0);
  const auto comps = ordered_components(graph);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (NodeId v : comps[c]) {
      labels[v] = c;
    }
  }
  return labels;
}

IslandSnapshot connected_components(const CollabGraph& graph) {
  IslandSnapshot snap;
  snap.year = graph.as_of_year();
  for (const auto& comp : ordered_components(graph)) {
    Island island;
    for (NodeId v : comp) {
      island.members.push_back(graph.name(v));
    }
    std::sort(island.members.begin(), island.members.end());
    snap.islands.push_back(std::move(island));
  }
  return snap;
}

IslandTimeline track_islands(std::span<IslandSnapshot> snapshots) {
  IslandTimeline timeline;
  int next_id = 1;
  const IslandSnapshot* previous = nullptr;
  for (auto& snap : snapshots) {
    if (previous != nullptr && snap.year <= previous->year) {
      throw ValidationError("island snapshots must be in strictly increasing year order");
    }
    // where each member name lives now
    std::unordered_map<std::string, std::size_t> home;
    for (std::size_t i = 0; i < snap.islands.size(); ++i) {
      for (const auto& name : snap.islands[i].members) {
        home.emplace(name, i);
      }
    }
    // previous islands (as positions in the previous snapshot) contained in each new island
    std::vector<std::vector<std::size_t>> constituents(snap.islands.size());
    if (previous != nullptr) {
      for (std::size_t j = 0; j < previous->islands.size(); ++j) {
        std::optional<std::size_t> target;
        for (const auto& name : previous->islands[j].members) {
          auto it = home.find(name);
          if (it == home.end() || (target && *target != it->second)) {
            throw ValidationError("snapshot " + std::to_string(snap.year) +
                                  " is not cumulative over " + std::to_string(previous->year));
          }
          target = it->second;
        }
        if (target) {
          constituents[*target].push_back(j);
        }
      }
    }
    snap.island_ids.assign(snap.islands.size(), 0);
    for (std::size_t i = 0; i < snap.islands.size(); ++i) {
      const auto& parts = constituents[i];
      int id = 0;
      if (parts.empty()) {
        id = next_id++;
        timeline.islands[id] = IslandHistory{id, snap.year, {}, std::nullopt, std::nullopt};
      } else {
        // previous order is size desc, so the first constituent is the largest
        id = previous->island_ids[parts.front()];
        if (parts.size() > 1) {
          MergeEvent event{snap.year, id, {}};
          for (std::size_t k = 1; k < parts.size(); ++k) {
            const int absorbed = previous->island_ids[parts[k]];
            event.absorbed.push_back(absorbed);
            timeline.islands[absorbed].merged_year = snap.year;
            timeline.islands[absorbed].merged_into = id;
          }
          std::sort(event.absorbed.begin(), event.absorbed.end());
          timeline.merges.push_back(std::move(event));
        }
      }
      snap.island_ids[i] = id;
      timeline.islands[id].size_by_year[snap.year] = snap.islands[i].members.size();
    }
    previous = &snap;
  }
  return timeline;
}

std::vector<TopIslands> top_k_islands(std::span<const IslandSnapshot> snapshots, std::size_t k) {
  std::vector<TopIslands> out;
  for (const auto& snap : snapshots) {
    TopIslands row{snap.year, {}};
    for (std::size_t i = 0; i < std::min(k, snap.islands.size()); ++i) {
      row.sizes.push_back(snap.islands[i].members.size());
    }
    out.push_back(std::move(row));
  }
  return out;
}

DegreeHistogram degree_distribution(const CollabGraph& graph) {
  DegreeHistogram hist;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    ++hist[graph.degree(v)];
  }
  return hist;
}

std::vector<Collaborator> top_collaborators(const CollabGraph& graph, std::size_t k) {
  std::vector<Collaborator> all;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    all.push_back({graph.name(v), graph.degree(v)});
  }
  std::sort(all.begin(), all.end(), [](const Collaborator& a, const Collaborator& b) {
    return a.degree != b.degree ? a.degree > b.degree : a.name < b.name;
  });
  all.resize(std::min(k, all.size()));
  return all;
}

PathMetrics path_metrics(const CollabGraph& graph) {
  PathMetrics m;
  if (graph.node_count() == 0) {
    return m;
  }
  const auto comps = ordered_components(graph);
  const auto& giant = comps.front();
  m.giant_size = giant.size();
  if (giant.size() < 2) {
    return m;
  }
  std::vector<std::uint32_t> dist(graph.node_count());
  std::vector<NodeId> queue(graph.node_count());
  constexpr std::uint32_t kUnseen = ~std::uint32_t{0};
  std::uint64_t total = 0;
  for (NodeId source : giant) {
    std::fill(dist.begin(), dist.end(), kUnseen);
    std::size_t head = 0;
    std::size_t tail = 0;
    dist[source] = 0;
    queue[tail++] = source;
    while (head < tail) {
      const NodeId v = queue[head++];
      for (NodeId w : graph.neighbors(v)) {
        if (dist[w] == kUnseen) {
          dist[w] = dist[v] + 1;
          queue[tail++] = w;
          total += dist[w];
          m.max_path_length = std::max<std::size_t>(m.max_path_length, dist[w]);
        }
      }
    }
  }
  // every unordered pair was reached from both ends
  const double pairs = static_cast<double>(giant.size()) * static_cast<double>(giant.size() - 1);
  m.mean_path_length = static_cast<double>(total) / pairs;
  return m;
}

std::uint64_t triangle_count(const CollabGraph& graph) {
  return graph.node_count() <= kBitsetNodeLimit ? triangle_count_bitset(graph)
                                                : triangle_count_merge(graph);
}

std::uint64_t connected_triples(const CollabGraph& graph) {
  std::uint64_t total = 0;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    const std::uint64_t d = graph.degree(v);
    total += d * (d - (d > 0 ? 1 : 0)) / 2;
  }
  return total;
}

double clustering_coefficient(const CollabGraph& graph) {
  const std::uint64_t triples = connected_triples(graph);
  if (triples == 0) {
    return 0.0;
  }
  return 3.0 * static_cast<double>(triangle_count(graph)) / static_cast<double>(triples);
}

NetworkMetrics newman_metrics(const corpus::Corpus& corpus, const std::string& venue, int year) {
  const auto papers = corpus::papers_up_to(corpus, venue, year);
  if (papers.empty()) {
    throw ValidationError("no " + venue + " papers up to " + std::to_string(year));
  }
  const CollabGraph g = CollabGraph::build(corpus, venue, year);
  NetworkMetrics m;
  m.venue = venue;
  m.year = year;
  m.total_papers = papers.size();
  m.total_authors = g.node_count();
  for (const auto* p : papers) {
    m.authorships += p->authors.size();
  }
  m.papers_per_author = static_cast<double>(m.authorships) / static_cast<double>(m.total_authors);
  m.authors_per_paper = static_cast<double>(m.authorships) / static_cast<double>(m.total_papers);
  m.collaborators_per_author =
      2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(m.total_authors);
  const DegreeHistogram hist = degree_distribution(g);
  m.power_law = fit_power_law(hist, cutoff_candidates(hist));
  const IslandSnapshot snap = connected_components(g);
  m.giant_size = snap.islands.front().members.size();
  m.giant_fraction = static_cast<double>(m.giant_size) / static_cast<double>(m.total_authors);
  m.second_component_size = snap.islands.size() > 1 ? snap.islands[1].members.size() : 0;
  const PathMetrics paths = path_metrics(g);
  m.mean_path_length = paths.mean_path_length;
  m.max_path_length = paths.max_path_length;
  m.clustering_coefficient = clustering_coefficient(g);
  return m;
}

}  // namespace bibliostat::network

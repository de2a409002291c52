#pragma once

// Time-sliced document co-citation networks.
//
// Citers are the dataset members, ranked per slice by citation count; each
// citer contributes every unordered pair of its resolvable references that
// fall inside the look-back window. Edge weight counts distinct citers of a
// pair, and each edge remembers the earliest citer year.

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "citecascade/citation_source.hpp"
#include "citecascade/error.hpp"
#include "citecascade/record_store.hpp"
#include "citecascade/union_find.hpp"

namespace citecascade {

inline constexpr int kUnlimitedLookBack = INT_MAX;

enum class WeightNormalization { none, cosine, dice };

inline const char* to_string(WeightNormalization n) {
  switch (n) {
    case WeightNormalization::none: return "none";
    case WeightNormalization::cosine: return "cosine";
    case WeightNormalization::dice: return "dice";
  }
  return "none";
}

inline WeightNormalization parse_normalization(const std::string& s) {
  if (s == "none") return WeightNormalization::none;
  if (s == "cosine") return WeightNormalization::cosine;
  if (s == "dice") return WeightNormalization::dice;
  fail(ErrorKind::validation, "unknown weight normalization: " + s);
}

struct NetworkConfig {
  double lrf = 4.0;
  int lby = 10;
  std::int64_t min_citations = 1;
  std::size_t top_n = 100;
  int slice_years = 1;
  double e_param = 2.0;  // recorded only; no selection rule uses it
  bool per_slice_pruning = false;
  WeightNormalization normalization = WeightNormalization::none;

  void validate() const {
    if (!(lrf > 0)) fail(ErrorKind::validation, "lrf must be > 0");
    if (lby < 1) fail(ErrorKind::validation, "lby must be >= 1");
    if (top_n < 1) fail(ErrorKind::validation, "top_n must be >= 1");
    if (slice_years < 1) fail(ErrorKind::validation, "slice_years must be >= 1");
    if (min_citations < 0) fail(ErrorKind::validation, "min_citations must be >= 0");
  }

  bool operator==(const NetworkConfig&) const = default;
};

struct NodeInfo {
  std::optional<int> year;      // publication year of the cited reference
  std::size_t citations = 0;    // selected citers whose pairs include the node
  int first_cited_year = 0;

  bool operator==(const NodeInfo&) const = default;
};

struct EdgeInfo {
  std::size_t count = 0;  // distinct citers co-citing the pair
  double weight = 0;      // == count unless a normalization pass ran
  int first_cocited_year = 0;

  bool operator==(const EdgeInfo&) const = default;
};

// Canonical unordered pair: first < second.
using EdgeKey = std::pair<Id, Id>;

inline EdgeKey make_edge_key(const Id& a, const Id& b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

struct Slice {
  int begin = 0;  // inclusive
  int end = 0;    // inclusive
  std::vector<Id> citers;

  bool operator==(const Slice&) const = default;
};

struct CoCitationNetwork {
  std::map<Id, NodeInfo> nodes;
  std::map<EdgeKey, EdgeInfo> edges;
  NetworkConfig config;
  std::vector<Slice> slices;

  bool empty() const { return nodes.empty(); }

  void add_pair(const Id& a, const Id& b, int year) {
    auto& e = edges[make_edge_key(a, b)];
    if (e.count == 0 || year < e.first_cocited_year) e.first_cocited_year = year;
    ++e.count;
    e.weight = static_cast<double>(e.count);
  }
};

// Adjacency in dense index space, for algorithms that need it.
struct IndexedGraph {
  std::vector<Id> ids;                                         // sorted
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // sorted by neighbor

  static IndexedGraph from(const CoCitationNetwork& net) {
    IndexedGraph g;
    g.ids.reserve(net.nodes.size());
    for (const auto& [id, info] : net.nodes) g.ids.push_back(id);
    g.adj.resize(g.ids.size());
    for (const auto& [key, info] : net.edges) {
      std::size_t a = g.index_of(key.first);
      std::size_t b = g.index_of(key.second);
      g.adj[a].emplace_back(b, info.weight);
      g.adj[b].emplace_back(a, info.weight);
    }
    for (auto& list : g.adj) std::sort(list.begin(), list.end());
    return g;
  }

  std::size_t index_of(const Id& id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) fail(ErrorKind::data, "edge endpoint is not a node: " + id);
    return static_cast<std::size_t>(it - ids.begin());
  }

  std::size_t size() const { return ids.size(); }
};

// Partitions the dataset's year range into slice_years-wide intervals and
// keeps the top_n most cited qualifying citers of each (count desc, id asc).
// Members without a year take no part.
inline std::vector<Slice> slice_citers(const Dataset& dataset, const CitationSource& source,
                                       const NetworkConfig& config) {
  config.validate();
  if (dataset.member_ids.empty()) fail(ErrorKind::validation, "dataset " + dataset.name + " is empty");
  std::map<int, std::vector<std::pair<std::int64_t, Id>>> by_year;
  for (const auto& id : dataset.member_ids) {
    const ArticleRecord* r = source.record(id);
    if (!r || !r->year) continue;
    by_year[*r->year].emplace_back(source.citation_count(id).count, id);
  }
  std::vector<Slice> slices;
  if (by_year.empty()) return slices;
  int first = by_year.begin()->first;
  int last = by_year.rbegin()->first;
  for (int begin = first; begin <= last; begin += config.slice_years) {
    Slice slice;
    slice.begin = begin;
    slice.end = std::min(last, begin + config.slice_years - 1);
    std::vector<std::pair<std::int64_t, Id>> ranked;
    for (auto it = by_year.lower_bound(slice.begin); it != by_year.end() && it->first <= slice.end; ++it) {
      for (const auto& entry : it->second) {
        if (entry.first >= config.min_citations) ranked.push_back(entry);
      }
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    if (ranked.size() > config.top_n) ranked.resize(config.top_n);
    for (auto& [count, id] : ranked) slice.citers.push_back(std::move(id));
    slices.push_back(std::move(slice));
  }
  return slices;
}

// References of `citer` that are resolvable, have a year, and satisfy
// citer.year - lby <= ref.year <= citer.year. Sorted ascending.
inline std::vector<Id> eligible_references(const ArticleRecord& citer, const CitationSource& source,
                                           int lby) {
  std::vector<Id> refs;
  if (!citer.year) return refs;
  for (const auto& ref : citer.reference_ids) {
    const ArticleRecord* r = source.record(ref);
    if (!r || !r->year) continue;
    if (*r->year > *citer.year) continue;
    if (lby != kUnlimitedLookBack && static_cast<long long>(*citer.year) - *r->year > lby) continue;
    refs.push_back(ref);
  }
  std::sort(refs.begin(), refs.end());
  refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
  return refs;
}

inline std::set<EdgeKey> cocite_pairs(const ArticleRecord& citer, const CitationSource& source,
                                      const NetworkConfig& config) {
  std::set<EdgeKey> pairs;
  auto refs = eligible_references(citer, source, config.lby);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (std::size_t j = i + 1; j < refs.size(); ++j) pairs.emplace(refs[i], refs[j]);
  }
  return pairs;
}

namespace detail {

inline bool stronger_edge(const std::pair<const EdgeKey, EdgeInfo>* a,
                          const std::pair<const EdgeKey, EdgeInfo>* b) {
  if (a->second.weight != b->second.weight) return a->second.weight > b->second.weight;
  if (a->second.first_cocited_year != b->second.first_cocited_year) {
    return a->second.first_cocited_year < b->second.first_cocited_year;
  }
  return a->first < b->first;
}

inline void accumulate_citer(CoCitationNetwork& net, const ArticleRecord& citer,
                             const CitationSource& source) {
  auto refs = eligible_references(citer, source, net.config.lby);
  if (refs.size() < 2) return;
  int year = *citer.year;
  for (const auto& ref : refs) {
    auto [it, inserted] = net.nodes.try_emplace(ref);
    auto& node = it->second;
    if (inserted) {
      node.year = source.record(ref)->year;
      node.first_cited_year = year;
    }
    node.first_cited_year = std::min(node.first_cited_year, year);
    ++node.citations;
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (std::size_t j = i + 1; j < refs.size(); ++j) net.add_pair(refs[i], refs[j], year);
  }
}

inline void merge_into(CoCitationNetwork& total, const CoCitationNetwork& part) {
  for (const auto& [id, info] : part.nodes) {
    auto [it, inserted] = total.nodes.try_emplace(id, info);
    if (!inserted) {
      it->second.citations += info.citations;
      it->second.first_cited_year = std::min(it->second.first_cited_year, info.first_cited_year);
    }
  }
  for (const auto& [key, info] : part.edges) {
    auto [it, inserted] = total.edges.try_emplace(key, info);
    if (!inserted) {
      it->second.count += info.count;
      it->second.weight += info.weight;
      it->second.first_cocited_year = std::min(it->second.first_cocited_year, info.first_cocited_year);
    }
  }
}

}  // namespace detail

// Keeps the floor(lrf * |nodes|) strongest edges (weight desc, earlier
// first_cocited_year, then pair order). Nodes are never removed.
inline CoCitationNetwork prune_links(CoCitationNetwork net, double lrf) {
  if (!(lrf > 0)) fail(ErrorKind::validation, "lrf must be > 0");
  auto budget = static_cast<std::size_t>(std::floor(lrf * static_cast<double>(net.nodes.size())));
  if (net.edges.size() <= budget) return net;
  std::vector<const std::pair<const EdgeKey, EdgeInfo>*> ranked;
  ranked.reserve(net.edges.size());
  for (const auto& e : net.edges) ranked.push_back(&e);
  std::sort(ranked.begin(), ranked.end(), detail::stronger_edge);
  std::map<EdgeKey, EdgeInfo> kept;
  for (std::size_t i = 0; i < budget; ++i) kept.emplace(ranked[i]->first, ranked[i]->second);
  net.edges = std::move(kept);
  return net;
}

inline void normalize_weights(CoCitationNetwork& net, WeightNormalization mode) {
  if (mode == WeightNormalization::none) return;
  for (auto& [key, e] : net.edges) {
    double ca = static_cast<double>(net.nodes.at(key.first).citations);
    double cb = static_cast<double>(net.nodes.at(key.second).citations);
    double c = static_cast<double>(e.count);
    e.weight = mode == WeightNormalization::cosine ? c / std::sqrt(ca * cb) : 2.0 * c / (ca + cb);
  }
}

// Co-citation counts before any pruning.
inline CoCitationNetwork count_cocitations(const Dataset& dataset, const CitationSource& source,
                                           const NetworkConfig& config) {
  CoCitationNetwork net;
  net.config = config;
  net.slices = slice_citers(dataset, source, config);
  for (const auto& slice : net.slices) {
    for (const auto& id : slice.citers) detail::accumulate_citer(net, *source.record(id), source);
  }
  return net;
}

inline CoCitationNetwork build_network(const Dataset& dataset, const CitationSource& source,
                                       const NetworkConfig& config,
                                       std::vector<std::string>* warnings = nullptr) {
  CoCitationNetwork net;
  if (!config.per_slice_pruning) {
    net = count_cocitations(dataset, source, config);
  } else {
    net.config = config;
    net.slices = slice_citers(dataset, source, config);
    for (const auto& slice : net.slices) {
      CoCitationNetwork part;
      part.config = config;
      for (const auto& id : slice.citers) detail::accumulate_citer(part, *source.record(id), source);
      detail::merge_into(net, prune_links(std::move(part), config.lrf));
    }
  }
  if (net.edges.empty() && warnings) warnings->push_back("dataset " + dataset.name + " produced no co-cited pairs");
  net = prune_links(std::move(net), config.lrf);
  normalize_weights(net, config.normalization);
  return net;
}

struct LccResult {
  std::vector<Id> members;  // sorted
  int percent_rounded = 0;
  int percent_truncated = 0;
  double fraction = 0;
};

namespace detail {

// Largest component; equal sizes resolve to the one holding the smallest id.
inline LccResult finish_lcc(const IndexedGraph& g, const std::vector<std::size_t>& component) {
  std::map<std::size_t, std::size_t> sizes;
  for (auto c : component) ++sizes[c];
  std::size_t best_size = 0;
  for (const auto& [c, n] : sizes) best_size = std::max(best_size, n);
  // ids are sorted, so the first hit belongs to the component with the smallest id
  std::size_t best = 0;
  for (std::size_t i = 0; i < component.size(); ++i) {
    if (sizes[component[i]] == best_size) {
      best = component[i];
      break;
    }
  }
  LccResult out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (component[i] == best) out.members.push_back(g.ids[i]);
  }
  out.fraction = static_cast<double>(out.members.size()) / static_cast<double>(g.size());
  out.percent_rounded = static_cast<int>(std::lround(100.0 * out.fraction));
  out.percent_truncated = static_cast<int>(out.members.size() * 100 / g.size());
  return out;
}

}  // namespace detail

inline LccResult largest_connected_component_bfs(const CoCitationNetwork& net) {
  if (net.empty()) fail(ErrorKind::validation, "network is empty");
  auto g = IndexedGraph::from(net);
  constexpr std::size_t unseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> component(g.size(), unseen);
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (component[start] != unseen) continue;
    std::deque<std::size_t> queue{start};
    component[start] = start;
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      for (const auto& [u, w] : g.adj[v]) {
        if (component[u] == unseen) {
          component[u] = start;
          queue.push_back(u);
        }
      }
    }
  }
  return detail::finish_lcc(g, component);
}

inline LccResult largest_connected_component_dsu(const CoCitationNetwork& net) {
  if (net.empty()) fail(ErrorKind::validation, "network is empty");
  auto g = IndexedGraph::from(net);
  UnionFind uf(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    for (const auto& [u, w] : g.adj[v]) uf.unite(v, u);
  }
  std::vector<std::size_t> component(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) component[v] = uf.find(v);
  return detail::finish_lcc(g, component);
}

inline LccResult largest_connected_component(const CoCitationNetwork& net) {
  return largest_connected_component_bfs(net);
}

struct NetworkStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t lcc_size = 0;
  int lcc_percent = 0;
  int lcc_percent_truncated = 0;
  double density = 0;
};

inline NetworkStats network_stats(const CoCitationNetwork& net) {
  NetworkStats s;
  s.nodes = net.nodes.size();
  s.edges = net.edges.size();
  if (s.nodes == 0) return s;
  auto lcc = largest_connected_component(net);
  s.lcc_size = lcc.members.size();
  s.lcc_percent = lcc.percent_rounded;
  s.lcc_percent_truncated = lcc.percent_truncated;
  if (s.nodes > 1) {
    s.density = 2.0 * static_cast<double>(s.edges) /
                (static_cast<double>(s.nodes) * static_cast<double>(s.nodes - 1));
  }
  return s;
}

}  // namespace citecascade

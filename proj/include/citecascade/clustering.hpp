#pragma once

// Community detection on co-citation networks and partition quality scores.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "citecascade/cocitation.hpp"
#include "citecascade/error.hpp"

namespace citecascade {

using Assignment = std::map<Id, int>;

struct ClusterPartition {
  Assignment assignment;                   // node id -> cluster index
  std::vector<std::vector<Id>> clusters;   // index order; members sorted
  double modularity = 0;
  std::vector<double> silhouette;          // per cluster
  double mean_silhouette = 0;              // unweighted mean over clusters
  std::vector<std::string> labels;         // filled by labeling
  int level = 1;
  std::optional<int> parent;               // parent cluster index at level 2
  std::vector<std::string> warnings;

  std::size_t size() const { return clusters.size(); }

  // "#3" at level 1, "#0^2" at level 2.
  std::string display_name(std::size_t index) const {
    if (level == 2 && parent) return "#" + std::to_string(*parent) + "^" + std::to_string(index);
    return "#" + std::to_string(index);
  }
};

// Weighted Newman modularity: sum_c (w_c / W - (s_c / 2W)^2).
inline double modularity(const CoCitationNetwork& net, const Assignment& assignment) {
  for (const auto& [id, info] : net.nodes) {
    if (!assignment.count(id)) fail(ErrorKind::validation, "partition does not cover node " + id);
  }
  double total = 0;
  std::map<int, double> intra;
  std::map<int, double> strength;
  for (const auto& [key, e] : net.edges) {
    int ca = assignment.at(key.first);
    int cb = assignment.at(key.second);
    total += e.weight;
    strength[ca] += e.weight;
    strength[cb] += e.weight;
    if (ca == cb) intra[ca] += e.weight;
  }
  if (total <= 0) return 0.0;
  double q = 0;
  for (const auto& [c, s] : strength) {
    double share = s / (2 * total);
    q += intra[c] / total - share * share;
  }
  return q;
}

namespace detail {

inline double mean_year(const CoCitationNetwork& net, const std::vector<Id>& members) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& id : members) {
    const auto& info = net.nodes.at(id);
    if (info.year) {
      sum += *info.year;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::infinity();
}

}  // namespace detail

// Renumbers clusters: size desc, then older mean publication year, then
// smallest member id. Members of each cluster are sorted.
inline void order_clusters(const CoCitationNetwork& net, ClusterPartition& p) {
  for (auto& members : p.clusters) std::sort(members.begin(), members.end());
  std::vector<std::tuple<std::size_t, double, Id, std::size_t>> keys;
  for (std::size_t i = 0; i < p.clusters.size(); ++i) {
    const auto& m = p.clusters[i];
    keys.emplace_back(m.size(), detail::mean_year(net, m), m.empty() ? Id{} : m.front(), i);
  }
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });
  std::vector<std::vector<Id>> ordered;
  for (const auto& k : keys) ordered.push_back(std::move(p.clusters[std::get<3>(k)]));
  p.clusters = std::move(ordered);
  p.assignment.clear();
  for (std::size_t c = 0; c < p.clusters.size(); ++c) {
    for (const auto& id : p.clusters[c]) p.assignment[id] = static_cast<int>(c);
  }
}

inline ClusterPartition partition_from_assignment(const CoCitationNetwork& net, const Assignment& assignment) {
  std::map<int, std::vector<Id>> groups;
  for (const auto& [id, c] : assignment) groups[c].push_back(id);
  ClusterPartition p;
  for (auto& [c, members] : groups) p.clusters.push_back(std::move(members));
  order_clusters(net, p);
  return p;
}

struct SilhouetteResult {
  std::map<Id, double> per_node;
  std::vector<double> per_cluster;
  double mean = 0;
  std::vector<std::string> warnings;
};

// Distance d(a, b) = 1 - cosine similarity of weighted adjacency rows. A
// node with an all-zero row has similarity 0 to everything. Singleton
// clusters score 0, as do nodes with a_i = b_i = 0.
inline SilhouetteResult silhouette(const CoCitationNetwork& net, const Assignment& assignment) {
  SilhouetteResult out;
  auto g = IndexedGraph::from(net);
  const std::size_t n = g.size();
  std::vector<int> cluster_of(n);
  int k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = assignment.find(g.ids[i]);
    if (it == assignment.end()) fail(ErrorKind::validation, "partition does not cover node " + g.ids[i]);
    cluster_of[i] = it->second;
    k = std::max(k, it->second + 1);
  }
  std::vector<std::size_t> cluster_size(static_cast<std::size_t>(k), 0);
  for (auto c : cluster_of) ++cluster_size[static_cast<std::size_t>(c)];
  out.per_cluster.assign(static_cast<std::size_t>(k), 0.0);
  std::size_t non_empty = std::count_if(cluster_size.begin(), cluster_size.end(), [](auto s) { return s > 0; });
  if (non_empty < 2) {
    out.warnings.push_back("silhouette undefined for a single cluster; reported as 0");
    for (const auto& id : g.ids) out.per_node[id] = 0.0;
    return out;
  }

  std::vector<double> norm(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, w] : g.adj[i]) norm[i] += w * w;
    norm[i] = std::sqrt(norm[i]);
  }

  std::vector<double> dot(n, 0.0);
  std::vector<std::size_t> touched;
  std::vector<double> similarity_sum(static_cast<std::size_t>(k));
  std::vector<double> cluster_score_sum(static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto own = static_cast<std::size_t>(cluster_of[i]);
    double s = 0.0;
    if (cluster_size[own] > 1) {
      touched.clear();
      for (const auto& [mid, w_im] : g.adj[i]) {
        for (const auto& [j, w_mj] : g.adj[mid]) {
          if (j == i) continue;
          if (dot[j] == 0.0) touched.push_back(j);
          dot[j] += w_im * w_mj;
        }
      }
      std::fill(similarity_sum.begin(), similarity_sum.end(), 0.0);
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      for (auto j : touched) {
        if (norm[i] > 0 && norm[j] > 0) {
          similarity_sum[static_cast<std::size_t>(cluster_of[j])] += dot[j] / (norm[i] * norm[j]);
        }
        dot[j] = 0.0;
      }
      double a = (static_cast<double>(cluster_size[own] - 1) - similarity_sum[own]) /
                 static_cast<double>(cluster_size[own] - 1);
      double b = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
        if (c == own || cluster_size[c] == 0) continue;
        double mean_d = (static_cast<double>(cluster_size[c]) - similarity_sum[c]) /
                        static_cast<double>(cluster_size[c]);
        b = std::min(b, mean_d);
      }
      double denom = std::max(a, b);
      s = denom > 0 ? (b - a) / denom : 0.0;
    }
    out.per_node[g.ids[i]] = s;
    cluster_score_sum[own] += s;
  }
  double total = 0;
  for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
    if (cluster_size[c] > 0) out.per_cluster[c] = cluster_score_sum[c] / static_cast<double>(cluster_size[c]);
    total += out.per_cluster[c];
  }
  out.mean = total / static_cast<double>(non_empty);
  return out;
}

namespace detail {

struct MergeCandidate {
  double delta;
  std::size_t a, b;  // a < b
  std::size_t version_a, version_b;
};

// Largest delta first; equal deltas resolve to the smallest (a, b).
struct MergeOrder {
  bool operator()(const MergeCandidate& x, const MergeCandidate& y) const {
    if (x.delta != y.delta) return x.delta < y.delta;
    return std::tie(x.a, x.b) > std::tie(y.a, y.b);
  }
};

inline constexpr double kMinGain = 1e-12;

}  // namespace detail

inline void score_partition(const CoCitationNetwork& net, ClusterPartition& p) {
  p.modularity = modularity(net, p.assignment);
  auto sil = silhouette(net, p.assignment);
  p.silhouette = sil.per_cluster;
  p.mean_silhouette = sil.mean;
  p.warnings.insert(p.warnings.end(), sil.warnings.begin(), sil.warnings.end());
}

// Greedy agglomerative modularity maximization: repeatedly merge the
// connected pair of communities with the largest positive gain
// dQ = 2 (e_ij - a_i a_j); stop when no merge improves Q.
inline ClusterPartition detect_communities(const CoCitationNetwork& net) {
  if (net.empty()) fail(ErrorKind::validation, "network is empty");
  auto g = IndexedGraph::from(net);
  const std::size_t n = g.size();
  double total = 0;
  for (const auto& [key, e] : net.edges) total += e.weight;

  std::vector<std::size_t> community(n);
  for (std::size_t i = 0; i < n; ++i) community[i] = i;

  if (total > 0) {
    const double two_w = 2 * total;
    std::vector<double> share(n, 0.0);  // a_i
    std::vector<std::map<std::size_t, double>> links(n);  // e_ij, both directions
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& [j, w] : g.adj[i]) {
        share[i] += w / two_w;
        links[i][j] += w / two_w;
      }
    }
    std::vector<bool> alive(n, true);
    std::vector<std::size_t> version(n, 0);
    std::priority_queue<detail::MergeCandidate, std::vector<detail::MergeCandidate>, detail::MergeOrder> heap;
    auto push = [&](std::size_t a, std::size_t b) {
      if (a > b) std::swap(a, b);
      double delta = 2 * (links[a].at(b) - share[a] * share[b]);
      if (delta > detail::kMinGain) heap.push({delta, a, b, version[a], version[b]});
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& [j, e] : links[i]) {
        if (i < j) push(i, j);
      }
    }
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    while (!heap.empty()) {
      auto top = heap.top();
      heap.pop();
      if (!alive[top.a] || !alive[top.b] || version[top.a] != top.version_a || version[top.b] != top.version_b) {
        continue;
      }
      std::size_t keep = top.a, gone = top.b;
      for (const auto& [k, e] : links[gone]) {
        if (k == keep) continue;
        links[keep][k] += e;
        links[k].erase(gone);
        links[k][keep] += e;
      }
      links[keep].erase(gone);
      links[gone].clear();
      share[keep] += share[gone];
      alive[gone] = false;
      parent[gone] = keep;
      ++version[keep];
      for (const auto& [k, e] : links[keep]) push(keep, k);
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t c = i;
      while (parent[c] != c) c = parent[c];
      community[i] = c;
    }
  }

  Assignment raw;
  for (std::size_t i = 0; i < n; ++i) raw[g.ids[i]] = static_cast<int>(community[i]);
  ClusterPartition p = partition_from_assignment(net, raw);
  score_partition(net, p);
  return p;
}

inline CoCitationNetwork induced_subgraph(const CoCitationNetwork& net, const std::vector<Id>& members) {
  CoCitationNetwork sub;
  sub.config = net.config;
  for (const auto& id : members) sub.nodes.emplace(id, net.nodes.at(id));
  for (const auto& [key, e] : net.edges) {
    if (sub.nodes.count(key.first) && sub.nodes.count(key.second)) sub.edges.emplace(key, e);
  }
  return sub;
}

// Second-level decomposition of one top-level cluster, on the subgraph
// induced by its members with original weights.
inline ClusterPartition sub_cluster(const CoCitationNetwork& net, const ClusterPartition& top, std::size_t parent) {
  if (parent >= top.clusters.size()) fail(ErrorKind::validation, "no cluster #" + std::to_string(parent));
  const auto& members = top.clusters[parent];
  auto sub = induced_subgraph(net, members);
  ClusterPartition p;
  if (members.size() < 3) {
    p.clusters = {members};
    order_clusters(sub, p);
    score_partition(sub, p);
    p.warnings.push_back("cluster #" + std::to_string(parent) + " has fewer than 3 members; not subdivided");
  } else {
    p = detect_communities(sub);
  }
  p.level = 2;
  p.parent = static_cast<int>(parent);
  return p;
}

}  // namespace citecascade

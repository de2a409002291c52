#pragma once

// Cluster labels from citing-article titles, top citing articles, and
// phrase-containment concept trees.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "citecascade/citation_source.hpp"
#include "citecascade/clustering.hpp"
#include "citecascade/text.hpp"

namespace citecascade {

// The articles whose titles are scored: by default every citer selected
// while building the network.
inline IdSet citing_universe(const CoCitationNetwork& net) {
  IdSet out;
  for (const auto& s : net.slices) out.insert(s.citers.begin(), s.citers.end());
  return out;
}

// Members of `universe` citing at least one of `members`.
inline IdSet cluster_citers(const std::vector<Id>& members, const CitationSource& source, const IdSet& universe) {
  IdSet out;
  for (const auto& m : members) {
    for (const auto& c : source.citers(m).ids) {
      if (universe.count(c)) out.insert(c);
    }
  }
  return out;
}

// Dunning log-likelihood ratio (G^2) for a phrase occurring in k1 of n1
// cluster documents and k2 of n2 other documents.
inline double log_likelihood_ratio(double k1, double n1, double k2, double n2) {
  double cells[2][2] = {{k1, n1 - k1}, {k2, n2 - k2}};
  double rows[2] = {n1, n2};
  double cols[2] = {k1 + k2, n1 + n2 - k1 - k2};
  double total = n1 + n2;
  double g2 = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (cells[i][j] > 0) g2 += cells[i][j] * std::log(cells[i][j] * total / (rows[i] * cols[j]));
    }
  }
  return 2 * g2;
}

using PhraseScorer = std::function<double(double k1, double n1, double k2, double n2)>;

struct LabelOptions {
  std::size_t min_words = 2;
  std::size_t max_words = 4;
  double min_score = 3.84;  // chi-square 1 dof, p < 0.05
  PhraseScorer scorer = log_likelihood_ratio;
  const std::unordered_set<std::string>* stopwords = nullptr;
};

namespace detail {

using PhraseCounts = std::map<std::string, std::size_t>;

inline PhraseCounts count_title_phrases(const IdSet& docs, const CitationSource& source, std::size_t min_words,
                                        std::size_t max_words, const std::unordered_set<std::string>& stopwords) {
  PhraseCounts counts;
  for (const auto& id : docs) {
    const ArticleRecord* r = source.record(id);
    if (!r) continue;
    for (const auto& p : text::phrases(r->title, min_words, max_words, stopwords)) ++counts[p];
  }
  return counts;
}

inline std::string most_frequent(const PhraseCounts& counts) {
  std::string best;
  std::size_t best_n = 0;
  for (const auto& [p, n] : counts) {
    if (n > best_n) {
      best = p;
      best_n = n;
    }
  }
  return best;
}

}  // namespace detail

// Highest-scoring multi-word title phrase of the cluster's citers against
// all citers in `universe`, over-represented in the cluster and scoring at
// least min_score. Ties: frequency, then alphabetical. Falls back to the
// most frequent title bigram (then word); "unlabeled-<index>" when the
// cluster has no citers.
inline std::string label_cluster(const std::vector<Id>& members, std::size_t index, const CitationSource& source,
                                 const IdSet& universe, const LabelOptions& options = {}) {
  const auto& stopwords = options.stopwords ? *options.stopwords : text::default_stopwords();
  IdSet inside = cluster_citers(members, source, universe);
  if (inside.empty()) return "unlabeled-" + std::to_string(index);
  IdSet outside;
  std::set_difference(universe.begin(), universe.end(), inside.begin(), inside.end(),
                      std::inserter(outside, outside.end()));
  auto in_counts = detail::count_title_phrases(inside, source, options.min_words, options.max_words, stopwords);
  auto out_counts = detail::count_title_phrases(outside, source, options.min_words, options.max_words, stopwords);
  const double n1 = static_cast<double>(inside.size());
  const double n2 = static_cast<double>(outside.size());

  std::string best;
  double best_score = 0;
  std::size_t best_freq = 0;
  if (n2 > 0) {
    for (const auto& [phrase, k1] : in_counts) {
      auto it = out_counts.find(phrase);
      double k2 = it == out_counts.end() ? 0.0 : static_cast<double>(it->second);
      if (static_cast<double>(k1) / n1 <= k2 / n2) continue;
      double score = options.scorer(static_cast<double>(k1), n1, k2, n2);
      if (score < options.min_score) continue;
      bool better = best.empty() || score > best_score || (score == best_score && k1 > best_freq);
      if (better) {
        best = phrase;
        best_score = score;
        best_freq = k1;
      }
    }
  }
  if (!best.empty()) return best;
  auto bigrams = detail::count_title_phrases(inside, source, 2, 2, stopwords);
  if (!bigrams.empty()) return detail::most_frequent(bigrams);
  auto words = detail::count_title_phrases(inside, source, 1, 1, stopwords);
  if (!words.empty()) return detail::most_frequent(words);
  return "unlabeled-" + std::to_string(index);
}

inline void label_partition(ClusterPartition& p, const CitationSource& source, const IdSet& universe,
                            const LabelOptions& options = {}) {
  p.labels.clear();
  for (std::size_t c = 0; c < p.clusters.size(); ++c) {
    p.labels.push_back(label_cluster(p.clusters[c], c, source, universe, options));
  }
}

struct CitingArticle {
  Id id;
  std::size_t members_cited = 0;
  std::int64_t global_citations = 0;

  bool operator==(const CitingArticle&) const = default;
};

// Citers in `universe` ranked by distinct members cited, then citation
// count, then id.
inline std::vector<CitingArticle> top_citing_articles(const std::vector<Id>& members, const CitationSource& source,
                                                      const IdSet& universe, std::size_t k) {
  std::map<Id, std::size_t> cited;
  for (const auto& m : members) {
    for (const auto& c : source.citers(m).ids) {
      if (universe.count(c)) ++cited[c];
    }
  }
  std::vector<CitingArticle> ranked;
  for (const auto& [id, n] : cited) ranked.push_back({id, n, source.citation_count(id).count});
  std::sort(ranked.begin(), ranked.end(), [](const CitingArticle& a, const CitingArticle& b) {
    if (a.members_cited != b.members_cited) return a.members_cited > b.members_cited;
    if (a.global_citations != b.global_citations) return a.global_citations > b.global_citations;
    return a.id < b.id;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

struct ConceptNode {
  std::string phrase;
  std::size_t support = 0;
  std::vector<ConceptNode> children;
};

// Forest under a virtual root (root.phrase is empty).
struct ConceptTree {
  ConceptNode root;

  bool empty() const { return root.children.empty(); }

  std::string to_text() const {
    std::string out;
    std::function<void(const ConceptNode&, int)> walk = [&](const ConceptNode& node, int depth) {
      out += std::string(static_cast<std::size_t>(depth) * 2, ' ') + node.phrase + " (" +
             std::to_string(node.support) + ")\n";
      for (const auto& c : node.children) walk(c, depth + 1);
    };
    for (const auto& c : root.children) walk(c, 0);
    return out;
  }

  nlohmann::ordered_json to_json() const {
    std::function<nlohmann::ordered_json(const ConceptNode&)> walk = [&](const ConceptNode& node) {
      nlohmann::ordered_json j;
      j["phrase"] = node.phrase;
      j["support"] = node.support;
      j["children"] = nlohmann::ordered_json::array();
      for (const auto& c : node.children) j["children"].push_back(walk(c));
      return j;
    };
    nlohmann::ordered_json roots = nlohmann::ordered_json::array();
    for (const auto& c : root.children) roots.push_back(walk(c));
    return roots;
  }
};

struct ConceptTreeOptions {
  std::size_t max_words = 4;
  std::size_t min_support = 2;
  std::size_t max_phrases = 40;
  const std::unordered_set<std::string>* stopwords = nullptr;
};

// Builds the containment hierarchy from phrase supports. A phrase's parent
// is the most frequent shorter phrase whose words are a subset of its own
// and whose support is at least its own (ties: more words, then
// alphabetical).
inline ConceptTree concept_tree_from_supports(const std::map<std::string, std::size_t>& supports) {
  struct Entry {
    std::string phrase;
    std::size_t support;
    std::set<std::string> words;
    std::size_t length;
  };
  std::vector<Entry> entries;
  for (const auto& [p, s] : supports) {
    auto words = text::split_words(p);
    entries.push_back({p, s, std::set<std::string>(words.begin(), words.end()), words.size()});
  }
  std::vector<std::ptrdiff_t> parent(entries.size(), -1);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = 0; j < entries.size(); ++j) {
      const auto& q = entries[j];
      const auto& p = entries[i];
      if (q.length >= p.length || q.support < p.support) continue;
      if (!std::includes(p.words.begin(), p.words.end(), q.words.begin(), q.words.end())) continue;
      if (parent[i] >= 0) {
        const auto& cur = entries[static_cast<std::size_t>(parent[i])];
        if (q.support < cur.support) continue;
        if (q.support == cur.support && q.length < cur.length) continue;
        if (q.support == cur.support && q.length == cur.length && q.phrase > cur.phrase) continue;
      }
      parent[i] = static_cast<std::ptrdiff_t>(j);
    }
  }
  std::function<ConceptNode(std::size_t)> build = [&](std::size_t i) {
    ConceptNode node{entries[i].phrase, entries[i].support, {}};
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (parent[j] == static_cast<std::ptrdiff_t>(i)) node.children.push_back(build(j));
    }
    std::sort(node.children.begin(), node.children.end(), [](const ConceptNode& a, const ConceptNode& b) {
      return a.support != b.support ? a.support > b.support : a.phrase < b.phrase;
    });
    return node;
  };
  ConceptTree tree;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (parent[i] < 0) tree.root.children.push_back(build(i));
  }
  std::sort(tree.root.children.begin(), tree.root.children.end(), [](const ConceptNode& a, const ConceptNode& b) {
    return a.support != b.support ? a.support > b.support : a.phrase < b.phrase;
  });
  return tree;
}

// Phrases come from titles and abstracts of the cluster's citing articles;
// support counts the articles containing a phrase.
inline ConceptTree build_concept_tree(const std::vector<Id>& members, const CitationSource& source,
                                      const IdSet& universe, const ConceptTreeOptions& options = {}) {
  const auto& stopwords = options.stopwords ? *options.stopwords : text::default_stopwords();
  std::map<std::string, std::size_t> counts;
  for (const auto& id : cluster_citers(members, source, universe)) {
    const ArticleRecord* r = source.record(id);
    if (!r) continue;
    std::set<std::string> seen;
    for (auto& p : text::phrases(r->title, 1, options.max_words, stopwords)) seen.insert(std::move(p));
    if (r->abstract) {
      for (auto& p : text::phrases(*r->abstract, 1, options.max_words, stopwords)) seen.insert(std::move(p));
    }
    for (const auto& p : seen) ++counts[p];
  }
  std::vector<std::pair<std::size_t, std::string>> ranked;
  for (const auto& [p, n] : counts) {
    if (n >= options.min_support) ranked.emplace_back(n, p);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  if (ranked.size() > options.max_phrases) ranked.resize(options.max_phrases);
  std::map<std::string, std::size_t> kept;
  for (const auto& [n, p] : ranked) kept.emplace(p, n);
  return concept_tree_from_supports(kept);
}

}  // namespace citecascade

#include <gtest/gtest.h>

#include "citecascade/labeling.hpp"
#include "support/fixtures.hpp"

using namespace citecascade;
using fixtures::rec;

namespace {

// Members a1..a3 and b1..b3. Cluster A citers share "protein interaction",
// cluster B citers share "computational drug"; every other word is unique.
RecordStore planted_corpus() {
  std::vector<ArticleRecord> records;
  for (const char* m : {"a1", "a2", "a3", "b1", "b2", "b3"}) records.push_back(rec(m, 2000));
  for (int i = 0; i < 6; ++i) {
    std::string s = std::to_string(i);
    records.push_back(rec("ca" + s, 2005, {"a" + std::to_string(1 + i % 3)}, 3,
                          "Protein interaction in yeast" + std::string(1, static_cast<char>('a' + i)) + " x" + s));
    records.push_back(rec("cb" + s, 2006, {"b" + std::to_string(1 + i % 3)}, 3,
                          "Computational drug for kinase" + std::string(1, static_cast<char>('a' + i)) +
                              " y" + s));
  }
  return fixtures::store_of(std::move(records));
}

IdSet citer_ids(const RecordStore& store) {
  IdSet out;
  for (const auto& r : store.records()) {
    if (r.id[0] == 'c') out.insert(r.id);
  }
  return out;
}

void check_tree(const ConceptNode& node, std::set<std::string> path) {
  for (const auto& child : node.children) {
    if (!node.phrase.empty()) {
      EXPECT_LE(child.support, node.support);
    }
    EXPECT_FALSE(path.count(child.phrase));
    auto next = path;
    next.insert(child.phrase);
    check_tree(child, next);
  }
}

}  // namespace

TEST(LogLikelihood, HandValues) {
  // perfectly separated 5/5 vs 0/5: G^2 = 20 ln 2
  EXPECT_NEAR(log_likelihood_ratio(5, 5, 0, 5), 20 * std::log(2.0), 1e-12);
  EXPECT_NEAR(log_likelihood_ratio(2, 4, 2, 4), 0.0, 1e-12);
}

TEST(LabelCluster, UnanimousPhrase) {
  std::vector<ArticleRecord> records{rec("m", 2000), rec("other", 2000)};
  const char* targets[] = {"kinases", "receptors", "channels", "transporters"};
  for (int i = 0; i < 4; ++i) {
    records.push_back(rec("c" + std::to_string(i), 2010, {"m"}, 1, std::string("Advances in drug discovery for ") + targets[i]));
    records.push_back(rec("o" + std::to_string(i), 2010, {"other"}, 1, "Soil ecology survey " + std::to_string(i)));
  }
  auto store = fixtures::store_of(records);
  SnapshotSource source(store);
  IdSet universe;
  for (const auto& r : store.records()) {
    if (r.id != "m" && r.id != "other") universe.insert(r.id);
  }
  EXPECT_EQ(label_cluster({"m"}, 0, source, universe), "drug discovery");
}

TEST(LabelCluster, PlantedBigramsPerCluster) {
  auto store = planted_corpus();
  SnapshotSource source(store);
  auto universe = citer_ids(store);
  ClusterPartition p;
  p.clusters = {{"a1", "a2", "a3"}, {"b1", "b2", "b3"}};
  label_partition(p, source, universe);
  EXPECT_EQ(p.labels, (std::vector<std::string>{"protein interaction", "computational drug"}));
}

TEST(LabelCluster, FallbacksAndUnlabeled) {
  auto store = planted_corpus();
  SnapshotSource source(store);
  // universe restricted to cluster A citers: nothing is over-represented, so
  // the most frequent bigram wins, alphabetically first among equals
  IdSet only_a;
  for (const auto& id : citer_ids(store)) {
    if (id.rfind("ca", 0) == 0) only_a.insert(id);
  }
  EXPECT_EQ(label_cluster({"a1", "a2", "a3"}, 0, source, only_a), "protein interaction");
  EXPECT_EQ(label_cluster({"b1"}, 4, source, only_a), "unlabeled-4");
}

TEST(TopCitingArticles, RankingRules) {
  auto store = fixtures::store_of({rec("m1", 2000), rec("m2", 2000), rec("m3", 2000),
                                   rec("all", 2005, {"m1", "m2", "m3"}, 1), rec("one", 2005, {"m1"}, 100),
                                   rec("ten", 2005, {"m2"}, 10), rec("five", 2005, {"m3"}, 5)});
  SnapshotSource source(store);
  IdSet universe{"all", "one", "ten", "five"};
  auto top = top_citing_articles({"m1", "m2", "m3"}, source, universe, 3);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0], (CitingArticle{"all", 3, 1}));
  EXPECT_EQ(top[1].id, "one");
  EXPECT_EQ(top[2].id, "ten");  // 10 before 5
}

TEST(TopCitingArticles, MatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto store = fixtures::random_cocitation_corpus(seed, 80, 30, 6);
    SnapshotSource source(store);
    IdSet universe;
    for (const auto& r : store.records()) {
      if (r.id[0] == 'c') universe.insert(r.id);
    }
    std::vector<Id> members{"r1", "r2", "r3", "r5", "r8", "r13"};
    std::vector<std::tuple<std::size_t, std::int64_t, Id>> brute;
    for (const auto& id : universe) {
      const auto* r = store.find(id);
      std::size_t n = 0;
      for (const auto& m : members) {
        n += std::count(r->reference_ids.begin(), r->reference_ids.end(), m) ? 1 : 0;
      }
      if (n) brute.emplace_back(n, *r->global_citation_count, id);
    }
    std::sort(brute.begin(), brute.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
      if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
      return std::get<2>(a) < std::get<2>(b);
    });
    auto top = top_citing_articles(members, source, universe, 7);
    ASSERT_EQ(top.size(), std::min<std::size_t>(7, brute.size()));
    for (std::size_t i = 0; i < top.size(); ++i) {
      EXPECT_EQ(top[i].id, std::get<2>(brute[i]));
      EXPECT_EQ(top[i].members_cited, std::get<0>(brute[i]));
    }
  }
}

TEST(ConceptTree, ContainmentHierarchy) {
  auto tree = concept_tree_from_supports({{"fish oil", 10},
                                          {"fish oil supplementation", 4},
                                          {"fish", 12},
                                          {"oil", 11},
                                          {"raynaud syndrome", 6},
                                          {"blood viscosity", 3}});
  // the most frequent contained phrase wins, so "fish" outranks "fish oil"
  EXPECT_EQ(tree.to_text(),
            "fish (12)\n"
            "  fish oil (10)\n"
            "  fish oil supplementation (4)\n"
            "oil (11)\n"
            "raynaud syndrome (6)\n"
            "blood viscosity (3)\n");
  auto two = concept_tree_from_supports({{"fish oil", 10}, {"fish oil supplementation", 4}});
  ASSERT_EQ(two.root.children.size(), 1u);
  EXPECT_EQ(two.root.children[0].children[0].phrase, "fish oil supplementation");
}

TEST(ConceptTree, UnrelatedPhrasesFormForest) {
  auto tree = concept_tree_from_supports({{"gene expression", 3}, {"neural network", 5}});
  ASSERT_EQ(tree.root.children.size(), 2u);
  EXPECT_EQ(tree.root.children[0].phrase, "neural network");
  EXPECT_TRUE(tree.root.children[0].children.empty());
  EXPECT_TRUE(concept_tree_from_supports({}).empty());
}

TEST(ConceptTree, FromCitingArticles) {
  std::vector<ArticleRecord> records{rec("m", 1980)};
  const char* titles[] = {"Fish oil supplementation in Raynaud syndrome", "Fish oil and blood viscosity",
                          "Dietary fish oil supplementation", "Fish oil and platelet aggregation"};
  for (int i = 0; i < 4; ++i) records.push_back(rec("c" + std::to_string(i), 1985, {"m"}, 1, titles[i]));
  records[4].abstract = "Blood viscosity was reduced.";
  auto store = fixtures::store_of(records);
  SnapshotSource source(store);
  auto tree = build_concept_tree({"m"}, source, {"c0", "c1", "c2", "c3"});
  ASSERT_FALSE(tree.empty());
  EXPECT_EQ(tree.root.children[0].phrase, "fish");
  ASSERT_EQ(tree.root.children[0].children.size(), 1u);
  EXPECT_EQ(tree.root.children[0].children[0].phrase, "fish oil");
  EXPECT_EQ(tree.root.children[0].children[0].support, 4u);
  check_tree(tree.root, {});
  auto text = tree.to_text();
  EXPECT_NE(text.find("    fish oil supplementation (2)\n"), std::string::npos);
  EXPECT_NE(text.find("blood viscosity (2)"), std::string::npos);  // one title, one abstract
  EXPECT_TRUE(build_concept_tree({"m"}, source, {}).empty());
}

TEST(ConceptTree, InvariantsOnPlantedCorpus) {
  auto store = planted_corpus();
  SnapshotSource source(store);
  auto tree = build_concept_tree({"a1", "a2", "a3", "b1"}, source, citer_ids(store));
  check_tree(tree.root, {});
  EXPECT_EQ(tree.to_json().size(), tree.root.children.size());
}

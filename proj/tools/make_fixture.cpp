// Writes the bundled synthetic corpus: 500 articles, 1990-2018, in four
// topics. Most references stay inside the citing article's topic, so the
// co-citation network has clusters a labeler can name.
//
//   make-fixture OUT.jsonl [--seed N]

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "citecascade/record_store.hpp"

namespace {

using citecascade::ArticleRecord;

struct Topic {
  std::string phrase;
  std::vector<std::string> modifiers;
  std::vector<std::string> objects;
};

const std::vector<Topic> kTopics = {
    {"fish oil", {"dietary", "omega", "marine", "clinical"}, {"raynaud syndrome", "blood viscosity", "platelet aggregation"}},
    {"protein folding", {"molecular", "kinetic", "chaperone", "misfolded"}, {"amyloid fibrils", "energy landscapes", "prion disease"}},
    {"citation analysis", {"bibliometric", "scientometric", "journal", "patent"}, {"research fronts", "impact factors", "science maps"}},
    {"neural network", {"deep", "recurrent", "convolutional", "sparse"}, {"image recognition", "speech synthesis", "language models"}},
};

constexpr std::size_t kArticles = 500;
constexpr int kFirstYear = 1990;
constexpr int kLastYear = 2018;

std::uint64_t pick(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make-fixture OUT.jsonl [--seed N]\n";
    return 2;
  }
  std::uint64_t seed = 20190101;
  if (argc == 4 && std::string(argv[2]) == "--seed") seed = std::stoull(argv[3]);
  std::mt19937_64 rng(seed);

  std::vector<ArticleRecord> records;
  std::vector<std::size_t> topic_of;
  std::vector<std::int64_t> cited(kArticles, 0);
  for (std::size_t i = 0; i < kArticles; ++i) {
    std::size_t t = pick(rng, kTopics.size());
    const auto& topic = kTopics[t];
    ArticleRecord r;
    r.id = "syn" + std::to_string(1000 + i);
    r.year = kFirstYear + static_cast<int>(i * (kLastYear - kFirstYear + 1) / kArticles);
    r.title = topic.modifiers[pick(rng, topic.modifiers.size())] + " " + topic.phrase + " and " +
              topic.objects[pick(rng, topic.objects.size())];
    if (pick(rng, 3) == 0) {
      r.abstract = "We study " + topic.phrase + " in " + topic.objects[pick(rng, topic.objects.size())] + ".";
    }
    r.venue = "Journal of " + topic.phrase;
    r.authors = {"Author " + std::to_string(pick(rng, 60))};
    r.source_tag = "synthetic";
    // references go to earlier articles; early ones are preferred so a core
    // of highly cited work emerges in every topic
    if (i >= 8) {
      std::size_t want = 4 + pick(rng, 9);
      for (std::size_t k = 0; k < want * 4 && r.reference_ids.size() < want; ++k) {
        std::size_t a = pick(rng, i), b = pick(rng, i);
        std::size_t j = std::min(a, b);
        bool same = topic_of[j] == t;
        if (!same && pick(rng, 10) != 0) continue;
        r.reference_ids.push_back(records[j].id);
      }
      citecascade::sanitize_references(r);
      for (const auto& ref : r.reference_ids) ++cited[std::stoul(ref.substr(3)) - 1000];
    }
    topic_of.push_back(t);
    records.push_back(std::move(r));
  }
  // a few records carry no global count so the snapshot-local fallback runs
  for (std::size_t i = 0; i < kArticles; ++i) {
    if (i % 17 != 5) records[i].global_citation_count = cited[i] + static_cast<std::int64_t>(i % 5);
  }

  std::ofstream out(argv[1], std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << argv[1] << "\n";
    return 5;
  }
  for (const auto& r : records) out << citecascade::RecordStore::record_to_json(r).dump() << '\n';
  return 0;
}

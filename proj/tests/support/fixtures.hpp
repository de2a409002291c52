#pragma once

// Test-only corpus builders and brute-force oracles. Nothing here calls the
// library code paths it is used to check.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "citecascade/record_store.hpp"

namespace fixtures {

using citecascade::ArticleRecord;
using citecascade::Id;
using citecascade::IdSet;
using citecascade::RecordStore;

inline ArticleRecord rec(const Id& id, std::optional<int> year, std::vector<Id> refs = {},
                         std::optional<std::int64_t> citations = std::nullopt, std::string title = "") {
  ArticleRecord r;
  r.id = id;
  r.year = year;
  r.reference_ids = std::move(refs);
  r.global_citation_count = citations;
  r.title = title.empty() ? "article " + id : std::move(title);
  return r;
}

inline RecordStore store_of(std::vector<ArticleRecord> records) {
  RecordStore s;
  for (auto& r : records) s.upsert(std::move(r));
  return s;
}

inline citecascade::Dataset dataset_of(const std::string& name, const IdSet& ids) {
  citecascade::Dataset d;
  d.name = name;
  d.member_ids = ids;
  return d;
}

inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

// Random citation DAG: node i may only cite nodes with smaller index, and
// years are non-decreasing in index. Some records omit the global count so
// the snapshot-local path is exercised.
inline RecordStore random_dag(std::uint64_t seed, std::size_t n, std::size_t max_refs, double count_missing = 0.3) {
  std::mt19937_64 rng(seed);
  std::vector<ArticleRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    ArticleRecord r;
    r.id = "p" + std::to_string(i);
    r.title = "paper " + std::to_string(i);
    r.year = 1980 + static_cast<int>(i * 40 / std::max<std::size_t>(n, 1));
    if (i > 0) {
      auto k = draw(rng, max_refs + 1);
      for (std::size_t j = 0; j < k; ++j) r.reference_ids.push_back("p" + std::to_string(draw(rng, i)));
      if (draw(rng, 10) == 0) r.reference_ids.push_back("ghost" + std::to_string(i));  // unresolvable
    }
    if (static_cast<double>(draw(rng, 1000)) / 1000.0 >= count_missing) {
      r.global_citation_count = static_cast<std::int64_t>(draw(rng, 6));
    }
    records.push_back(std::move(r));
  }
  return store_of(std::move(records));
}

// Brute-force citation count: reported count, else a full scan.
inline std::int64_t brute_count(const RecordStore& store, const Id& id) {
  const auto* r = store.find(id);
  if (r->global_citation_count) return *r->global_citation_count;
  std::int64_t n = 0;
  for (const auto& other : store.records()) {
    n += std::count(other.reference_ids.begin(), other.reference_ids.end(), id) > 0 ? 1 : 0;
  }
  return n;
}

// Independent filtered breadth-first traversal over the raw reference lists.
// stages: (forward?, generations).
inline IdSet brute_cascade(const RecordStore& store, const IdSet& seeds,
                           const std::vector<std::pair<bool, int>>& stages, std::int64_t theta_citer,
                           std::int64_t theta_ref) {
  IdSet acc = seeds;
  for (const auto& [forward, gens] : stages) {
    IdSet frontier = acc;
    for (int g = 0; g < gens && !frontier.empty(); ++g) {
      IdSet next;
      for (const auto& r : store.records()) {
        if (forward) {
          // r joins if it cites something in the frontier
          bool cites = false;
          for (const auto& ref : r.reference_ids) cites = cites || frontier.count(ref);
          if (cites && !acc.count(r.id) && brute_count(store, r.id) >= theta_citer) next.insert(r.id);
        } else if (frontier.count(r.id)) {
          for (const auto& ref : r.reference_ids) {
            if (store.contains(ref) && !acc.count(ref) && brute_count(store, ref) >= theta_ref) next.insert(ref);
          }
        }
      }
      acc.insert(next.begin(), next.end());
      frontier = next;
    }
  }
  return acc;
}

// Corpus of `citers` articles citing from a pool of references with years.
inline RecordStore random_cocitation_corpus(std::uint64_t seed, std::size_t citers, std::size_t pool,
                                            std::size_t max_refs) {
  std::mt19937_64 rng(seed);
  std::vector<ArticleRecord> records;
  for (std::size_t i = 0; i < pool; ++i) {
    records.push_back(rec("r" + std::to_string(i), 1970 + static_cast<int>(draw(rng, 45)), {},
                          static_cast<std::int64_t>(draw(rng, 50))));
  }
  for (std::size_t i = 0; i < citers; ++i) {
    ArticleRecord r = rec("c" + std::to_string(i), 1990 + static_cast<int>(draw(rng, 25)), {},
                          static_cast<std::int64_t>(draw(rng, 30)));
    auto k = draw(rng, max_refs + 1);
    for (std::size_t j = 0; j < k; ++j) r.reference_ids.push_back("r" + std::to_string(draw(rng, pool)));
    if (draw(rng, 5) == 0) r.reference_ids.push_back("missing" + std::to_string(i));
    records.push_back(std::move(r));
  }
  return store_of(std::move(records));
}

struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("citecascade-" + tag + "-" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace fixtures

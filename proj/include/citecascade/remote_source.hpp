#pragma once

// Remote citation-API adapter contract. The transport is injected so the
// adapter runs against any HTTP client (or a fake in tests); this header
// implements throttling, retry with exponential backoff, bounded in-flight
// requests and the write-through disk cache.
//
// Wire contract (response bodies, JSON):
//   op "record"  <id>    -> one record object in the store JSONL schema
//   op "citers"  <id>    -> array of citing ids
//   op "search"  <q>#<n> -> {"ids": [...], "next_page": <int or null>}
// Status 200 = ok, 404 = not found, 429/503 = throttled (retry with backoff).

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <semaphore>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "citecascade/citation_source.hpp"

namespace citecascade {

struct RemoteConfig {
  std::string base_url;
  std::string token_env = "CITESRC_TOKEN";
  double requests_per_second = 5.0;
  std::size_t max_in_flight = 4;
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{500};
  double backoff_factor = 2.0;
  std::filesystem::path cache_dir = "cache";

  std::optional<std::string> token() const {
    if (const char* v = std::getenv(token_env.c_str())) return std::string(v);
    return std::nullopt;
  }

  // Delay before retry number `attempt` (1-based).
  std::chrono::milliseconds backoff_delay(int attempt) const {
    double ms = static_cast<double>(initial_backoff.count());
    for (int i = 1; i < attempt; ++i) ms *= backoff_factor;
    return std::chrono::milliseconds(static_cast<long long>(ms));
  }
};

struct TransportResponse {
  int status = 0;
  std::string body;
};

using Transport = std::function<TransportResponse(const std::string& op, const std::string& argument)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Layout: <root>/<op>/<key>.json. Keys are escaped so any id maps to one
// file name.
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path root) : root_(std::move(root)) {}

  std::filesystem::path path_for(const std::string& op, const std::string& key) const {
    return root_ / op / (escape(key) + ".json");
  }

  std::optional<std::string> get(const std::string& op, const std::string& key) const {
    std::ifstream in(path_for(op, key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void put(const std::string& op, const std::string& key, const std::string& body) const {
    auto path = path_for(op, key);
    std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) fail(ErrorKind::io, "cannot write cache file: " + tmp.string());
      out << body;
    }
    std::filesystem::rename(tmp, path);
  }

  static std::string escape(const std::string& key) {
    std::string out;
    for (unsigned char c : key) {
      if (std::isalnum(c) || c == '.' || c == '-' || c == '_') {
        out.push_back(static_cast<char>(c));
      } else {
        static constexpr char hex[] = "0123456789ABCDEF";
        out.push_back('%');
        out.push_back(hex[c >> 4]);
        out.push_back(hex[c & 0x0f]);
      }
    }
    return out;
  }

 private:
  std::filesystem::path root_;
};

class RemoteSource : public CitationSource {
 public:
  RemoteSource(RemoteConfig config, Transport transport,
               Sleeper sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })
      : config_(std::move(config)),
        transport_(std::move(transport)),
        sleeper_(std::move(sleeper)),
        cache_(config_.cache_dir),
        in_flight_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, config_.max_in_flight))) {}

  const ArticleRecord* record(const Id& id) const override {
    {
      std::lock_guard lock(mutex_);
      if (auto it = records_.find(id); it != records_.end()) return it->second ? &*it->second : nullptr;
    }
    auto body = fetch("record", id);
    std::optional<ArticleRecord> parsed;
    if (body) {
      parsed = RecordStore::record_from_json(nlohmann::json::parse(*body));
      sanitize_references(*parsed);
    }
    std::lock_guard lock(mutex_);
    auto [it, inserted] = records_.emplace(id, std::move(parsed));
    return it->second ? &*it->second : nullptr;
  }

  LinkLookup references(const Id& id) const override {
    LinkLookup out;
    const ArticleRecord* r = record(id);
    if (!r) return out;
    out.found = true;
    auto refs = r->reference_ids;
    prefetch(refs);
    for (const auto& ref : refs) (record(ref) ? out.ids : out.unresolved).push_back(ref);
    return out;
  }

  LinkLookup citers(const Id& id) const override {
    LinkLookup out;
    if (!record(id)) return out;
    out.found = true;
    if (auto body = fetch("citers", id)) {
      auto ids = nlohmann::json::parse(*body).get<std::vector<std::string>>();
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      std::erase(ids, id);
      out.ids = std::move(ids);
    }
    return out;
  }

  CitationCount citation_count(const Id& id) const override {
    CitationCount out;
    const ArticleRecord* r = record(id);
    if (!r) return out;
    out.found = true;
    if (r->global_citation_count) {
      out.count = *r->global_citation_count;
    } else {
      out.count = static_cast<std::int64_t>(citers(id).ids.size());
      out.snapshot_local = true;
    }
    return out;
  }

  // Paged search; pages are followed until next_page is null.
  Dataset search(const SourceQuery& query, const std::string& name) const override {
    if (query.phrases.empty()) fail(ErrorKind::validation, "search needs at least one phrase");
    Dataset out;
    out.name = name;
    out.provenance = {Provenance::Kind::query, query.describe()};
    out.created_at = timestamp_now();
    std::optional<int> page = 0;
    while (page) {
      auto body = fetch("search", query.describe() + "#" + std::to_string(*page));
      if (!body) break;
      auto j = nlohmann::json::parse(*body);
      for (const auto& id : j.at("ids")) out.member_ids.insert(id.get<std::string>());
      page = j.contains("next_page") && !j["next_page"].is_null()
                 ? std::optional<int>(j["next_page"].get<int>())
                 : std::nullopt;
    }
    return out;
  }

  // Fetches records concurrently, at most max_in_flight at once.
  void prefetch(const std::vector<Id>& ids) const {
    std::vector<Id> missing;
    {
      std::lock_guard lock(mutex_);
      for (const auto& id : ids) {
        if (!records_.count(id)) missing.push_back(id);
      }
    }
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::vector<std::jthread> workers;
    workers.reserve(missing.size());
    for (const auto& id : missing) {
      workers.emplace_back([this, id] { record(id); });
    }
  }

  std::size_t requests_made() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }

  std::size_t peak_in_flight() const {
    std::lock_guard lock(mutex_);
    return peak_in_flight_;
  }

 private:
  // Cache first; then transport with retry. nullopt = not found.
  std::optional<std::string> fetch(const std::string& op, const std::string& key) const {
    if (auto cached = cache_.get(op, key)) {
      if (*cached == kNotFoundMarker) return std::nullopt;
      return cached;
    }
    for (int attempt = 0;; ++attempt) {
      if (attempt > 0) sleeper_(config_.backoff_delay(attempt));
      TransportResponse response = call(op, key);
      if (response.status == 200) {
        cache_.put(op, key, response.body);
        return response.body;
      }
      if (response.status == 404) {
        cache_.put(op, key, kNotFoundMarker);
        return std::nullopt;
      }
      bool throttled = response.status == 429 || response.status == 503;
      if (!throttled || attempt >= config_.max_retries) {
        fail(ErrorKind::io, "remote " + op + " " + key + " failed with status " +
                                std::to_string(response.status));
      }
    }
  }

  TransportResponse call(const std::string& op, const std::string& key) const {
    in_flight_.acquire();
    {
      std::lock_guard lock(mutex_);
      ++requests_;
      ++current_in_flight_;
      peak_in_flight_ = std::max(peak_in_flight_, current_in_flight_);
    }
    if (config_.requests_per_second > 0) {
      auto spacing = std::chrono::milliseconds(static_cast<long long>(1000.0 / config_.requests_per_second));
      std::unique_lock lock(rate_mutex_);
      auto now = std::chrono::steady_clock::now();
      if (now < next_slot_) {
        auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(next_slot_ - now);
        next_slot_ += spacing;
        lock.unlock();
        sleeper_(wait);
      } else {
        next_slot_ = now + spacing;
      }
    }
    TransportResponse response;
    try {
      response = transport_(op, key);
    } catch (...) {
      release();
      throw;
    }
    release();
    return response;
  }

  void release() const {
    {
      std::lock_guard lock(mutex_);
      --current_in_flight_;
    }
    in_flight_.release();
  }

  static constexpr const char* kNotFoundMarker = "{\"__not_found__\":true}";

  RemoteConfig config_;
  Transport transport_;
  Sleeper sleeper_;
  DiskCache cache_;
  mutable std::counting_semaphore<> in_flight_;
  mutable std::mutex mutex_;
  mutable std::mutex rate_mutex_;
  mutable std::chrono::steady_clock::time_point next_slot_{};
  mutable std::map<Id, std::optional<ArticleRecord>> records_;
  mutable std::size_t requests_ = 0;
  mutable std::size_t current_in_flight_ = 0;
  mutable std::size_t peak_in_flight_ = 0;
};

}  // namespace citecascade

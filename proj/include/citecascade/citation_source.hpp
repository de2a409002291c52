#pragma once

// Uniform citation-link access: references (backward) and citers (forward).

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "citecascade/error.hpp"
#include "citecascade/record_store.hpp"

namespace citecascade {

// `found == false` means the queried id is unknown to the source, which is
// distinct from a known record with no links.
struct LinkLookup {
  bool found = false;
  std::vector<Id> ids;
  std::vector<Id> unresolved;
};

struct CitationCount {
  bool found = false;
  std::int64_t count = 0;
  bool snapshot_local = false;  // no source-reported count; counted in-snapshot
};

struct SourceQuery {
  enum class Kind { fulltext_proxy, title_abstract, id_lookup };
  Kind kind = Kind::title_abstract;
  std::vector<std::string> phrases;  // OR-combined

  std::string describe() const {
    std::string out;
    for (std::size_t i = 0; i < phrases.size(); ++i) {
      if (i) out += " OR ";
      out += "\"" + phrases[i] + "\"";
    }
    switch (kind) {
      case Kind::fulltext_proxy: return "fulltext-proxy(title+abstract): " + out;
      case Kind::title_abstract: return "title-abstract: " + out;
      case Kind::id_lookup: return "id-lookup: " + out;
    }
    return out;
  }
};

inline SourceQuery::Kind parse_query_kind(const std::string& s) {
  if (s == "phrase-in-fulltext-proxy") return SourceQuery::Kind::fulltext_proxy;
  if (s == "phrase-in-title-abstract") return SourceQuery::Kind::title_abstract;
  if (s == "id-lookup") return SourceQuery::Kind::id_lookup;
  fail(ErrorKind::validation, "unknown query kind: " + s);
}

class CitationSource {
 public:
  virtual ~CitationSource() = default;

  virtual const ArticleRecord* record(const Id& id) const = 0;
  virtual LinkLookup references(const Id& id) const = 0;
  virtual LinkLookup citers(const Id& id) const = 0;
  virtual CitationCount citation_count(const Id& id) const = 0;
  virtual Dataset search(const SourceQuery& query, const std::string& name) const = 0;

  bool resolvable(const Id& id) const { return record(id) != nullptr; }
};

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Matches a phrase against the searchable text of a record (title and
// abstract; snapshots carry no full text, so the fulltext kind is a proxy).
inline bool phrase_matches(const ArticleRecord& r, const std::string& lowered_phrase) {
  if (ascii_lower(r.title).find(lowered_phrase) != std::string::npos) return true;
  return r.abstract && ascii_lower(*r.abstract).find(lowered_phrase) != std::string::npos;
}

// Offline backend over an immutable record store.
class SnapshotSource : public CitationSource {
 public:
  explicit SnapshotSource(const RecordStore& store) : store_(store) {
    for (const auto& r : store_.records()) {
      for (const auto& ref : r.reference_ids) citer_index_[ref].push_back(r.id);
    }
    for (auto& [id, list] : citer_index_) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }

  const RecordStore& store() const { return store_; }

  const ArticleRecord* record(const Id& id) const override { return store_.find(id); }

  LinkLookup references(const Id& id) const override {
    LinkLookup out;
    const ArticleRecord* r = store_.find(id);
    if (!r) return out;
    out.found = true;
    for (const auto& ref : r->reference_ids) {
      (store_.contains(ref) ? out.ids : out.unresolved).push_back(ref);
    }
    return out;
  }

  LinkLookup citers(const Id& id) const override {
    LinkLookup out;
    if (!store_.contains(id)) return out;
    out.found = true;
    if (auto it = citer_index_.find(id); it != citer_index_.end()) out.ids = it->second;
    return out;
  }

  CitationCount citation_count(const Id& id) const override {
    CitationCount out;
    const ArticleRecord* r = store_.find(id);
    if (!r) return out;
    out.found = true;
    if (r->global_citation_count) {
      out.count = *r->global_citation_count;
    } else {
      auto it = citer_index_.find(id);
      out.count = it == citer_index_.end() ? 0 : static_cast<std::int64_t>(it->second.size());
      out.snapshot_local = true;
    }
    return out;
  }

  Dataset search(const SourceQuery& query, const std::string& name) const override {
    if (query.phrases.empty()) fail(ErrorKind::validation, "search needs at least one phrase");
    Dataset out;
    out.name = name;
    out.provenance = {Provenance::Kind::query, query.describe()};
    out.created_at = timestamp_now();
    if (query.kind == SourceQuery::Kind::id_lookup) {
      for (const auto& id : query.phrases) {
        if (store_.contains(id)) out.member_ids.insert(id);
      }
      return out;
    }
    std::vector<std::string> lowered;
    for (const auto& p : query.phrases) {
      if (p.empty()) fail(ErrorKind::validation, "search phrase is empty");
      lowered.push_back(ascii_lower(p));
    }
    for (const auto& r : store_.records()) {
      for (const auto& p : lowered) {
        if (phrase_matches(r, p)) {
          out.member_ids.insert(r.id);
          break;
        }
      }
    }
    return out;
  }

  // Raw inverse index, including references to ids with no record.
  const std::unordered_map<Id, std::vector<Id>>& citer_index() const { return citer_index_; }

 private:
  const RecordStore& store_;
  std::unordered_map<Id, std::vector<Id>> citer_index_;
};

}  // namespace citecascade

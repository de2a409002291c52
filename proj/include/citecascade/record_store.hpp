#pragma once

// Bibliographic records, named datasets, ingestion and per-dataset year
// statistics.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "citecascade/csv.hpp"
#include "citecascade/error.hpp"
#include "citecascade/text.hpp"

namespace citecascade {

using Id = std::string;
using IdSet = std::set<Id>;

inline constexpr int kMinYear = 1500;

inline int current_year() {
  std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  return utc.tm_year + 1900;
}

// Timestamp for provenance fields. SOURCE_DATE_EPOCH pins it so repeated
// runs produce identical artifacts.
inline std::string timestamp_now() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

struct ArticleRecord {
  Id id;
  std::string title;
  std::optional<int> year;  // nullopt = unknown
  std::optional<std::string> venue;
  std::vector<std::string> authors;
  std::optional<std::string> abstract;
  std::vector<Id> reference_ids;
  std::optional<std::int64_t> global_citation_count;
  std::string source_tag;

  bool operator==(const ArticleRecord&) const = default;
};

// sha1(normalized_title + ":" + year), used when the source has no id.
inline Id derive_id(std::string_view title, int year) {
  return text::sha1_hex(text::normalize_title(title) + ":" + std::to_string(year));
}

// Drops duplicate and self references, keeping first occurrence order.
inline void sanitize_references(ArticleRecord& record) {
  std::unordered_set<Id> seen;
  std::vector<Id> kept;
  kept.reserve(record.reference_ids.size());
  for (auto& ref : record.reference_ids) {
    if (ref.empty() || ref == record.id) continue;
    if (seen.insert(ref).second) kept.push_back(std::move(ref));
  }
  record.reference_ids = std::move(kept);
}

struct Provenance {
  enum class Kind { query, expansion, union_of, imported };
  Kind kind = Kind::imported;
  std::string detail;

  bool operator==(const Provenance&) const = default;
};

inline const char* to_string(Provenance::Kind kind) {
  switch (kind) {
    case Provenance::Kind::query: return "query";
    case Provenance::Kind::expansion: return "expansion";
    case Provenance::Kind::union_of: return "union";
    case Provenance::Kind::imported: return "imported";
  }
  return "imported";
}

inline Provenance::Kind provenance_kind_from(const std::string& s) {
  if (s == "query") return Provenance::Kind::query;
  if (s == "expansion") return Provenance::Kind::expansion;
  if (s == "union") return Provenance::Kind::union_of;
  if (s == "imported") return Provenance::Kind::imported;
  fail(ErrorKind::data, "unknown provenance kind: " + s);
}

struct Dataset {
  std::string name;
  IdSet member_ids;
  Provenance provenance;
  std::string created_at;

  std::size_t size() const { return member_ids.size(); }
  bool contains(const Id& id) const { return member_ids.count(id) > 0; }
};

inline nlohmann::ordered_json to_json(const Dataset& d) {
  nlohmann::ordered_json j;
  j["name"] = d.name;
  j["provenance"] = {{"kind", to_string(d.provenance.kind)}, {"detail", d.provenance.detail}};
  j["created_at"] = d.created_at;
  j["member_ids"] = std::vector<Id>(d.member_ids.begin(), d.member_ids.end());
  return j;
}

inline Dataset dataset_from_json(const nlohmann::json& j) {
  Dataset d;
  d.name = j.at("name").get<std::string>();
  d.provenance.kind = provenance_kind_from(j.at("provenance").at("kind").get<std::string>());
  d.provenance.detail = j.at("provenance").at("detail").get<std::string>();
  d.created_at = j.value("created_at", "");
  for (const auto& id : j.at("member_ids")) d.member_ids.insert(id.get<std::string>());
  return d;
}

struct Reject {
  std::size_t line = 0;
  std::string reason;
};

struct LoadReport {
  std::size_t loaded = 0;  // valid rows accepted (new or merged)
  std::size_t inserted = 0;
  std::size_t merged = 0;
  std::vector<Reject> rejects;

  std::string to_csv() const {
    std::string out = "line_number,reason\n";
    for (const auto& r : rejects) out += csv::join_row({std::to_string(r.line), r.reason});
    return out;
  }
};

enum class InputFormat { dimensions_csv, jsonl };

inline InputFormat parse_format(const std::string& name) {
  if (name == "dimensions-csv") return InputFormat::dimensions_csv;
  if (name == "jsonl") return InputFormat::jsonl;
  fail(ErrorKind::validation, "unknown format: " + name);
}

struct EnrichReport {
  std::size_t enriched = 0;
  std::size_t already_present = 0;
  std::vector<std::string> unmatched;  // keys that matched no record
  std::vector<Reject> malformed;
};

struct YearDistribution {
  std::string dataset_name;
  std::map<int, std::size_t> counts;
  std::size_t unknown = 0;
  std::optional<std::pair<int, int>> range;
  std::map<int, double> log_counts;  // ln(1 + count)

  std::size_t total() const {
    std::size_t sum = unknown;
    for (const auto& [year, n] : counts) sum += n;
    return sum;
  }
};

// Field-wise merge of a duplicate into the stored record. Identity fields
// (id, title, year) never change; the longer reference list wins, ties keep
// the stored list; optional fields come from the richer record when present.
inline bool merge_into(ArticleRecord& stored, const ArticleRecord& incoming) {
  bool incoming_richer = incoming.reference_ids.size() > stored.reference_ids.size();
  ArticleRecord before = stored;
  if (incoming_richer) stored.reference_ids = incoming.reference_ids;
  auto pick = [incoming_richer](auto& mine, const auto& theirs) {
    if (!theirs) return;
    if (!mine || incoming_richer) mine = theirs;
  };
  pick(stored.venue, incoming.venue);
  pick(stored.abstract, incoming.abstract);
  pick(stored.global_citation_count, incoming.global_citation_count);
  if (!incoming.authors.empty() && (stored.authors.empty() || incoming_richer)) {
    stored.authors = incoming.authors;
  }
  if (stored.source_tag.empty()) stored.source_tag = incoming.source_tag;
  return !(before == stored);
}

// In-memory record index with single-writer mutation. Analytics read a const
// reference (immutable snapshot).
class RecordStore {
 public:
  // Inserts or merges; returns true when a new record was created.
  bool upsert(ArticleRecord record) {
    sanitize_references(record);
    validate(record);
    auto it = index_.find(record.id);
    if (it != index_.end()) {
      merge_into(records_[it->second], record);
      return false;
    }
    index_.emplace(record.id, records_.size());
    records_.push_back(std::move(record));
    return true;
  }

  const ArticleRecord* find(const Id& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &records_[it->second];
  }

  bool contains(const Id& id) const { return index_.count(id) > 0; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<ArticleRecord>& records() const { return records_; }

  bool operator==(const RecordStore& other) const { return records_ == other.records_; }

  LoadReport ingest(const std::string& path, InputFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot read file: " + path);
    return format == InputFormat::jsonl ? ingest_jsonl(in) : ingest_dimensions_csv(in);
  }

  LoadReport ingest_jsonl(std::istream& in) {
    LoadReport report;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      try {
        accept(record_from_json(nlohmann::json::parse(line)), report);
      } catch (const nlohmann::json::exception& e) {
        report.rejects.push_back({line_no, std::string("malformed json: ") + e.what()});
      } catch (const Error& e) {
        report.rejects.push_back({line_no, e.what()});
      }
    }
    return report;
  }

  // Header-driven; leading preamble lines before the header row are skipped.
  LoadReport ingest_dimensions_csv(std::istream& in) {
    LoadReport report;
    csv::Reader reader(in);
    csv::Row row;
    std::map<std::string, std::size_t> columns;
    while (reader.next(row)) {
      bool has_id = std::find(row.fields.begin(), row.fields.end(), "Publication ID") != row.fields.end();
      if (has_id) {
        for (std::size_t i = 0; i < row.fields.size(); ++i) columns.emplace(row.fields[i], i);
        break;
      }
    }
    for (const char* required : {"Publication ID", "Title", "PubYear"}) {
      if (!columns.count(required)) {
        fail(ErrorKind::data, std::string("dimensions-csv missing required column: ") + required);
      }
    }
    auto cell = [&](const char* name) -> std::optional<std::string> {
      auto it = columns.find(name);
      if (it == columns.end() || it->second >= row.fields.size()) return std::nullopt;
      return row.fields[it->second];
    };
    while (reader.next(row)) {
      if (row.fields.size() == 1 && row.fields[0].empty()) continue;
      try {
        ArticleRecord record;
        record.id = trim(cell("Publication ID").value_or(""));
        record.title = cell("Title").value_or("");
        record.year = parse_year(cell("PubYear").value_or(""));
        if (auto refs = cell("Cited references")) {
          std::stringstream ss(*refs);
          std::string ref;
          while (std::getline(ss, ref, ';')) {
            ref = trim(ref);
            if (!ref.empty()) record.reference_ids.push_back(ref);
          }
        }
        if (auto cited = cell("Times cited"); cited && !trim(*cited).empty()) {
          record.global_citation_count = parse_count(*cited);
        }
        record.source_tag = "dimensions-csv";
        accept(std::move(record), report);
      } catch (const Error& e) {
        report.rejects.push_back({row.line, e.what()});
      }
    }
    return report;
  }

  // Each line: {"id": ..., "abstract": ...} or {"title": ..., "year": ..., "abstract": ...}.
  EnrichReport enrich_abstracts(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot read file: " + path);
    return enrich_abstracts(in);
  }

  EnrichReport enrich_abstracts(std::istream& in) {
    std::unordered_map<std::string, std::size_t> by_title_year;
    for (std::size_t i = 0; i < records_.size(); ++i) {
      if (records_[i].year) by_title_year.emplace(title_year_key(records_[i].title, *records_[i].year), i);
    }
    EnrichReport report;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        report.malformed.push_back({line_no, "malformed json"});
        continue;
      }
      if (!j.is_object() || !j.contains("abstract") || !j["abstract"].is_string()) {
        report.malformed.push_back({line_no, "missing abstract"});
        continue;
      }
      std::optional<std::size_t> target;
      std::string key;
      if (j.contains("id") && j["id"].is_string()) {
        key = j["id"].get<std::string>();
        if (auto it = index_.find(key); it != index_.end()) target = it->second;
      } else if (j.contains("title") && j["title"].is_string() && j.contains("year") &&
                 j["year"].is_number_integer()) {
        key = title_year_key(j["title"].get<std::string>(), j["year"].get<int>());
        if (auto it = by_title_year.find(key); it != by_title_year.end()) target = it->second;
      } else {
        report.malformed.push_back({line_no, "needs id or title+year"});
        continue;
      }
      if (!target) {
        report.unmatched.push_back(key);
        continue;
      }
      auto& record = records_[*target];
      if (record.abstract && !record.abstract->empty()) {
        ++report.already_present;
        continue;
      }
      record.abstract = j["abstract"].get<std::string>();
      ++report.enriched;
    }
    return report;
  }

  // Canonical store file: one JSON object per line, insertion order.
  void save_jsonl(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write file: " + path);
    for (const auto& r : records_) out << record_to_json(r).dump() << '\n';
  }

  // Replays lines; repeated ids merge by the duplicate rule.
  static RecordStore load_jsonl(const std::string& path) {
    RecordStore store;
    std::ifstream in(path, std::ios::binary);
    if (!in) return store;
    auto report = store.ingest_jsonl(in);
    if (!report.rejects.empty()) {
      fail(ErrorKind::data, "store file " + path + " has invalid line " +
                                std::to_string(report.rejects.front().line) + ": " +
                                report.rejects.front().reason);
    }
    return store;
  }

  static nlohmann::ordered_json record_to_json(const ArticleRecord& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["title"] = r.title;
    j["year"] = r.year ? nlohmann::ordered_json(*r.year) : nlohmann::ordered_json(nullptr);
    if (r.venue) j["venue"] = *r.venue;
    if (!r.authors.empty()) j["authors"] = r.authors;
    if (r.abstract) j["abstract"] = *r.abstract;
    j["reference_ids"] = r.reference_ids;
    if (r.global_citation_count) j["global_citation_count"] = *r.global_citation_count;
    if (!r.source_tag.empty()) j["source_tag"] = r.source_tag;
    return j;
  }

  // id may be absent when title and year allow deriving one. year must be
  // present as a key; an explicit null marks an unknown year.
  static ArticleRecord record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(ErrorKind::data, "record is not an object");
    static const std::set<std::string> allowed = {"id",       "title",         "year",
                                                  "venue",    "authors",       "abstract",
                                                  "reference_ids", "global_citation_count",
                                                  "source_tag"};
    for (const auto& [key, value] : j.items()) {
      if (!allowed.count(key)) fail(ErrorKind::data, "unknown field: " + key);
    }
    ArticleRecord r;
    r.title = j.contains("title") && j["title"].is_string() ? j["title"].get<std::string>() : "";
    if (!j.contains("year")) fail(ErrorKind::data, "missing year");
    if (!j["year"].is_null()) {
      if (!j["year"].is_number_integer()) fail(ErrorKind::data, "year is not an integer");
      r.year = j["year"].get<int>();
    }
    if (j.contains("id") && !j["id"].is_null()) {
      if (!j["id"].is_string()) fail(ErrorKind::data, "id is not a string");
      r.id = j["id"].get<std::string>();
    }
    if (r.id.empty()) {
      if (r.title.empty() || !r.year) fail(ErrorKind::data, "missing id");
      r.id = derive_id(r.title, *r.year);
    }
    if (j.contains("venue") && j["venue"].is_string()) r.venue = j["venue"].get<std::string>();
    if (j.contains("authors")) r.authors = j["authors"].get<std::vector<std::string>>();
    if (j.contains("abstract") && j["abstract"].is_string()) r.abstract = j["abstract"].get<std::string>();
    if (!j.contains("reference_ids")) fail(ErrorKind::data, "missing reference_ids");
    r.reference_ids = j["reference_ids"].get<std::vector<std::string>>();
    if (j.contains("global_citation_count") && !j["global_citation_count"].is_null()) {
      if (!j["global_citation_count"].is_number_integer()) {
        fail(ErrorKind::data, "global_citation_count is not an integer");
      }
      r.global_citation_count = j["global_citation_count"].get<std::int64_t>();
    }
    if (j.contains("source_tag") && j["source_tag"].is_string()) r.source_tag = j["source_tag"].get<std::string>();
    return r;
  }

  static void validate(const ArticleRecord& r) {
    if (r.id.empty()) fail(ErrorKind::data, "missing id");
    if (r.year && (*r.year < kMinYear || *r.year > current_year() + 1)) {
      fail(ErrorKind::data, "year out of range: " + std::to_string(*r.year));
    }
    if (r.global_citation_count && *r.global_citation_count < 0) {
      fail(ErrorKind::data, "negative global_citation_count");
    }
  }

 private:
  void accept(ArticleRecord record, LoadReport& report) {
    if (record.id.empty()) {
      if (record.title.empty() || !record.year) fail(ErrorKind::data, "missing id");
      record.id = derive_id(record.title, *record.year);
    }
    if (upsert(std::move(record))) {
      ++report.inserted;
    } else {
      ++report.merged;
    }
    ++report.loaded;
  }

  static std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
  }

  // Empty cell = unknown year; anything else must be an integer.
  static std::optional<int> parse_year(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (*end != '\0') fail(ErrorKind::data, "unparseable year: " + s);
    return static_cast<int>(v);
  }

  static std::int64_t parse_count(const std::string& raw) {
    std::string s = trim(raw);
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (*end != '\0') fail(ErrorKind::data, "unparseable citation count: " + s);
    return v;
  }

  static std::string title_year_key(const std::string& title, int year) {
    return text::normalize_title(title) + "|" + std::to_string(year);
  }

  std::vector<ArticleRecord> records_;
  std::unordered_map<Id, std::size_t> index_;
};

inline void check_members(const Dataset& dataset, const RecordStore& store) {
  for (const auto& id : dataset.member_ids) {
    if (!store.contains(id)) {
      fail(ErrorKind::data, "dataset " + dataset.name + " references unknown id " + id);
    }
  }
}

inline YearDistribution year_distribution(const Dataset& dataset, const RecordStore& store) {
  if (dataset.member_ids.empty()) {
    fail(ErrorKind::validation, "dataset " + dataset.name + " is empty; nothing to summarize");
  }
  YearDistribution dist;
  dist.dataset_name = dataset.name;
  for (const auto& id : dataset.member_ids) {
    const ArticleRecord* r = store.find(id);
    if (r && r->year) {
      ++dist.counts[*r->year];
    } else {
      ++dist.unknown;
    }
  }
  if (!dist.counts.empty()) dist.range = {dist.counts.begin()->first, dist.counts.rbegin()->first};
  for (const auto& [year, n] : dist.counts) dist.log_counts[year] = std::log1p(static_cast<double>(n));
  return dist;
}

inline Dataset dataset_union(const std::vector<const Dataset*>& inputs, const std::string& name) {
  if (inputs.empty()) fail(ErrorKind::validation, "union needs at least one dataset");
  Dataset out;
  out.name = name;
  out.provenance.kind = Provenance::Kind::union_of;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out.member_ids.insert(inputs[i]->member_ids.begin(), inputs[i]->member_ids.end());
    if (i) out.provenance.detail += ",";
    out.provenance.detail += inputs[i]->name;
  }
  out.created_at = timestamp_now();
  return out;
}

// Named datasets of one comparison session; names are unique.
class DatasetCatalog {
 public:
  const Dataset& add(Dataset dataset) {
    if (datasets_.count(dataset.name)) {
      fail(ErrorKind::validation, "dataset name already in session: " + dataset.name);
    }
    auto name = dataset.name;
    return datasets_.emplace(name, std::move(dataset)).first->second;
  }

  const Dataset& put(Dataset dataset) {
    auto name = dataset.name;
    datasets_.insert_or_assign(name, std::move(dataset));
    return datasets_.at(name);
  }

  const Dataset& get(const std::string& name) const {
    auto it = datasets_.find(name);
    if (it == datasets_.end()) fail(ErrorKind::not_found, "no dataset named " + name);
    return it->second;
  }

  bool contains(const std::string& name) const { return datasets_.count(name) > 0; }

  const Dataset& union_of(const std::vector<std::string>& names, const std::string& out_name) {
    std::vector<const Dataset*> inputs;
    for (const auto& n : names) inputs.push_back(&get(n));
    if (datasets_.count(out_name)) {
      fail(ErrorKind::validation, "dataset name already in session: " + out_name);
    }
    return add(dataset_union(inputs, out_name));
  }

  const std::map<std::string, Dataset>& all() const { return datasets_; }

 private:
  std::map<std::string, Dataset> datasets_;
};

}  // namespace citecascade

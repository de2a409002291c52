#pragma once

// On-disk session used by the command-line tool:
//
//   <dir>/session.json    defaults for every command
//   <dir>/store.jsonl     record store
//   <dir>/datasets/       <name>.json
//   <dir>/networks/       <name>.json, <name>.graphml, <name>.partition.json
//   <dir>/reports/        CSV/JSON/text summaries
//   <dir>/renders/        SVG and HTML
//   <dir>/traces/         expansion traces and specs
//   <dir>/.lock           held while a command runs

#include <fcntl.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citecascade/clustering.hpp"
#include "citecascade/cocitation.hpp"
#include "citecascade/error.hpp"
#include "citecascade/network_io.hpp"
#include "citecascade/record_store.hpp"
#include "citecascade/render.hpp"

namespace citecascade {

struct SessionConfig {
  NetworkConfig network;
  std::int64_t theta_citer = 10;
  std::int64_t theta_ref = 10;
  double coverage_threshold = 0.10;
  double coverage_epsilon = 0.05;
  std::size_t subcluster_top_k = 5;
  std::string stopwords;  // empty: built-in list
  RenderSpec render;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["network"] = config_to_json(network);
    j["expansion"] = {{"theta_citer", theta_citer}, {"theta_ref", theta_ref}};
    j["coverage"] = {{"threshold", coverage_threshold}, {"epsilon", coverage_epsilon}};
    j["cluster"] = {{"subcluster_top_k", subcluster_top_k}, {"stopwords", stopwords}};
    j["render"] = {{"seed", render.seed},
                   {"iterations", render.iterations},
                   {"width", render.width},
                   {"height", render.height},
                   {"label_top_k", render.label_top_k},
                   {"min_radius", render.min_radius},
                   {"max_radius", render.max_radius},
                   {"year_palette", render.year_palette},
                   {"dataset_palette", render.dataset_palette}};
    return j;
  }

  static SessionConfig from_json(const nlohmann::json& j) {
    SessionConfig c;
    try {
      if (j.contains("network")) c.network = config_from_json(j["network"]);
      if (j.contains("expansion")) {
        c.theta_citer = j["expansion"].value("theta_citer", c.theta_citer);
        c.theta_ref = j["expansion"].value("theta_ref", c.theta_ref);
      }
      if (j.contains("coverage")) {
        c.coverage_threshold = j["coverage"].value("threshold", c.coverage_threshold);
        c.coverage_epsilon = j["coverage"].value("epsilon", c.coverage_epsilon);
      }
      if (j.contains("cluster")) {
        c.subcluster_top_k = j["cluster"].value("subcluster_top_k", c.subcluster_top_k);
        c.stopwords = j["cluster"].value("stopwords", c.stopwords);
      }
      if (j.contains("render")) {
        const auto& r = j["render"];
        c.render.seed = r.value("seed", c.render.seed);
        c.render.iterations = r.value("iterations", c.render.iterations);
        c.render.width = r.value("width", c.render.width);
        c.render.height = r.value("height", c.render.height);
        c.render.label_top_k = r.value("label_top_k", c.render.label_top_k);
        c.render.min_radius = r.value("min_radius", c.render.min_radius);
        c.render.max_radius = r.value("max_radius", c.render.max_radius);
        c.render.year_palette = r.value("year_palette", c.render.year_palette);
        c.render.dataset_palette = r.value("dataset_palette", c.render.dataset_palette);
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::data, std::string("malformed session config: ") + e.what());
    }
    c.network.validate();
    c.render.validate();
    return c;
  }
};

inline nlohmann::ordered_json partition_to_json(const ClusterPartition& p) {
  nlohmann::ordered_json j;
  j["level"] = p.level;
  j["parent"] = p.parent ? nlohmann::ordered_json(*p.parent) : nlohmann::ordered_json(nullptr);
  j["modularity"] = p.modularity;
  j["mean_silhouette"] = p.mean_silhouette;
  j["clusters"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < p.clusters.size(); ++c) {
    j["clusters"].push_back({{"index", c},
                             {"name", p.display_name(c)},
                             {"label", c < p.labels.size() ? p.labels[c] : ""},
                             {"size", p.clusters[c].size()},
                             {"silhouette", c < p.silhouette.size() ? p.silhouette[c] : 0.0},
                             {"members", p.clusters[c]}});
  }
  j["warnings"] = p.warnings;
  return j;
}

inline ClusterPartition partition_from_json(const nlohmann::json& j) {
  ClusterPartition p;
  try {
    p.level = j.at("level").get<int>();
    if (!j.at("parent").is_null()) p.parent = j["parent"].get<int>();
    p.modularity = j.at("modularity").get<double>();
    p.mean_silhouette = j.at("mean_silhouette").get<double>();
    for (const auto& c : j.at("clusters")) {
      p.clusters.push_back(c.at("members").get<std::vector<Id>>());
      p.labels.push_back(c.at("label").get<std::string>());
      p.silhouette.push_back(c.at("silhouette").get<double>());
    }
    p.warnings = j.value("warnings", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::data, std::string("malformed partition file: ") + e.what());
  }
  for (std::size_t c = 0; c < p.clusters.size(); ++c) {
    for (const auto& id : p.clusters[c]) p.assignment[id] = static_cast<int>(c);
  }
  return p;
}

// Names become file stems, so they are restricted to a portable set.
inline void check_name(const std::string& kind, const std::string& name) {
  bool ok = !name.empty() && name.size() <= 100 && name[0] != '.';
  for (char c : name) {
    ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.');
  }
  if (!ok) fail(ErrorKind::validation, kind + " name must match [A-Za-z0-9._-]+: '" + name + "'");
}

inline std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

// Exclusive lock on a session directory; released on destruction.
class SessionLock {
 public:
  explicit SessionLock(const std::filesystem::path& path) : path_(path) {
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      fail(ErrorKind::io, "session is locked by another command (remove " + path_.string() + " if stale)");
    }
    auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
  }
  ~SessionLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  SessionLock(const SessionLock&) = delete;
  SessionLock& operator=(const SessionLock&) = delete;

 private:
  std::filesystem::path path_;
};

class Session {
 public:
  explicit Session(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    for (const char* sub : {"datasets", "networks", "reports", "renders", "traces"}) {
      std::filesystem::create_directories(dir_ / sub, ec);
      if (ec) fail(ErrorKind::io, "cannot create session directory " + (dir_ / sub).string());
    }
    lock_.emplace(dir_ / ".lock");
    if (std::filesystem::exists(config_path())) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_text(config_path().string()));
      } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::data, std::string("malformed session config: ") + e.what());
      }
      config_ = SessionConfig::from_json(j);
    } else {
      save_config();
    }
  }

  const std::filesystem::path& dir() const { return dir_; }
  SessionConfig& config() { return config_; }
  std::filesystem::path config_path() const { return dir_ / "session.json"; }
  void save_config() const { write_text(config_path().string(), dump(config_.to_json())); }

  std::filesystem::path path(const std::string& sub, const std::string& file) const { return dir_ / sub / file; }

  RecordStore load_store() const {
    auto p = dir_ / "store.jsonl";
    return std::filesystem::exists(p) ? RecordStore::load_jsonl(p.string()) : RecordStore{};
  }
  void save_store(const RecordStore& store) const { store.save_jsonl((dir_ / "store.jsonl").string()); }

  DatasetCatalog load_catalog() const {
    DatasetCatalog catalog;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir_ / "datasets")) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      try {
        catalog.add(dataset_from_json(nlohmann::json::parse(read_text(f.string()))));
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::data, "malformed dataset file " + f.string() + ": " + e.what());
      }
    }
    return catalog;
  }
  void save_dataset(const Dataset& d) const {
    check_name("dataset", d.name);
    write_text(path("datasets", d.name + ".json").string(), dump(to_json(d)));
  }

  bool has_network(const std::string& name) const { return std::filesystem::exists(path("networks", name + ".json")); }
  CoCitationNetwork load_network(const std::string& name) const {
    if (!has_network(name)) fail(ErrorKind::not_found, "no network named " + name + "; run `network` first");
    try {
      return network_from_json(nlohmann::json::parse(read_text(path("networks", name + ".json").string())));
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::data, std::string("malformed network file: ") + e.what());
    }
  }
  void save_network(const std::string& name, const CoCitationNetwork& net) const {
    check_name("network", name);
    write_text(path("networks", name + ".json").string(), dump(network_to_json(net)));
    write_text(path("networks", name + ".graphml").string(), network_to_graphml(net));
  }

  bool has_partition(const std::string& name) const {
    return std::filesystem::exists(path("networks", name + ".partition.json"));
  }
  ClusterPartition load_partition(const std::string& name) const {
    if (!has_partition(name)) fail(ErrorKind::not_found, "no clustering for network " + name + "; run `cluster` first");
    try {
      return partition_from_json(nlohmann::json::parse(read_text(path("networks", name + ".partition.json").string())));
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::data, std::string("malformed partition file: ") + e.what());
    }
  }
  void save_partition(const std::string& name, const ClusterPartition& p) const {
    write_text(path("networks", name + ".partition.json").string(), dump(partition_to_json(p)));
  }

 private:
  std::filesystem::path dir_;
  std::optional<SessionLock> lock_;
  SessionConfig config_;
};

}  // namespace citecascade

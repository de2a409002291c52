#pragma once

// Multi-dataset comparison: overlap matrix, membership projection onto a
// base network, and per-cluster coverage classes.

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citecascade/clustering.hpp"
#include "citecascade/csv.hpp"
#include "citecascade/error.hpp"
#include "citecascade/record_store.hpp"

namespace citecascade {

inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

inline std::string format2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// values[i][j] = 100 * |D_i ∩ D_j| / |D_j|. Each column is a share of the
// column dataset, which yields the asymmetric matrix with a 100 diagonal; it
// is not Jaccard overlap.
struct OverlapMatrix {
  std::vector<std::string> names;
  std::vector<std::size_t> sizes;
  std::vector<std::vector<std::size_t>> intersections;
  std::vector<std::vector<double>> exact;   // unrounded percentages
  std::vector<std::vector<double>> values;  // rounded to 2 decimals

  std::string to_csv(const std::vector<std::optional<std::pair<int, int>>>& ranges = {}) const {
    std::string out = "# values[row][col] = 100*|row ∩ col|/|col| (share of the column dataset; not |∩|/|∪|)\n";
    std::vector<std::string> header{""};
    header.insert(header.end(), names.begin(), names.end());
    out += csv::join_row(header);
    if (ranges.size() == names.size()) {
      std::vector<std::string> row{"Range"};
      for (const auto& r : ranges) {
        row.push_back(r ? std::to_string(r->first) + "-" + std::to_string(r->second) : "");
      }
      out += csv::join_row(row);
    }
    std::vector<std::string> size_row{"Articles"};
    for (auto s : sizes) size_row.push_back(std::to_string(s));
    out += csv::join_row(size_row);
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::vector<std::string> row{names[i]};
      for (std::size_t j = 0; j < names.size(); ++j) row.push_back(format2(values[i][j]));
      out += csv::join_row(row);
    }
    return out;
  }
};

inline double overlap_percent(std::size_t intersection, std::size_t column_size) {
  return 100.0 * static_cast<double>(intersection) / static_cast<double>(column_size);
}

inline OverlapMatrix overlap_matrix(const std::vector<const Dataset*>& datasets) {
  if (datasets.size() < 2) fail(ErrorKind::validation, "need at least 2 datasets");
  for (const auto* d : datasets) {
    if (d->member_ids.empty()) fail(ErrorKind::validation, "dataset " + d->name + " is empty");
  }
  const std::size_t n = datasets.size();
  OverlapMatrix m;
  m.intersections.assign(n, std::vector<std::size_t>(n, 0));
  m.exact.assign(n, std::vector<double>(n, 0));
  m.values.assign(n, std::vector<double>(n, 0));
  for (const auto* d : datasets) {
    m.names.push_back(d->name);
    m.sizes.push_back(d->size());
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      std::size_t common = 0;
      const auto& a = datasets[i]->member_ids;
      const auto& b = datasets[j]->member_ids;
      const auto& small = a.size() <= b.size() ? a : b;
      const auto& large = a.size() <= b.size() ? b : a;
      for (const auto& id : small) common += large.count(id);
      m.intersections[i][j] = m.intersections[j][i] = common;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m.exact[i][j] = overlap_percent(m.intersections[i][j], m.sizes[j]);
      m.values[i][j] = round2(m.exact[i][j]);
    }
  }
  return m;
}

struct OverlayProjection {
  std::vector<std::string> dataset_names;
  std::map<Id, std::vector<bool>> membership;        // bit i = dataset i
  std::vector<std::vector<double>> cluster_coverage;  // [cluster][dataset]

  std::string bits(const Id& id) const {
    std::string out;
    for (bool b : membership.at(id)) out.push_back(b ? '1' : '0');
    return out;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["datasets"] = dataset_names;
    j["nodes"] = nlohmann::ordered_json::object();
    for (const auto& [id, m] : membership) j["nodes"][id] = bits(id);
    j["cluster_coverage"] = cluster_coverage;
    return j;
  }
};

// Coverage of a cluster by a dataset = fraction of the cluster's nodes that
// are members of the dataset. Coverage is computed when `partition` is given.
inline OverlayProjection project_overlay(const CoCitationNetwork& base, const std::vector<const Dataset*>& datasets,
                                         const ClusterPartition* partition = nullptr) {
  if (base.empty()) fail(ErrorKind::validation, "base network is empty");
  OverlayProjection p;
  for (const auto* d : datasets) p.dataset_names.push_back(d->name);
  for (const auto& [id, info] : base.nodes) {
    std::vector<bool> bits(datasets.size());
    for (std::size_t i = 0; i < datasets.size(); ++i) bits[i] = datasets[i]->contains(id);
    p.membership.emplace(id, std::move(bits));
  }
  if (partition) {
    if (partition->assignment.size() != base.nodes.size()) {
      fail(ErrorKind::validation, "partition does not match the base network");
    }
    for (const auto& [id, c] : partition->assignment) {
      if (!base.nodes.count(id)) fail(ErrorKind::validation, "partition node not in base network: " + id);
    }
    for (const auto& members : partition->clusters) {
      std::vector<double> coverage(datasets.size(), 0.0);
      for (const auto& id : members) {
        const auto& bits = p.membership.at(id);
        for (std::size_t i = 0; i < bits.size(); ++i) coverage[i] += bits[i] ? 1.0 : 0.0;
      }
      for (auto& c : coverage) c = members.empty() ? 0.0 : c / static_cast<double>(members.size());
      p.cluster_coverage.push_back(std::move(coverage));
    }
  }
  return p;
}

enum class CoverageClass { full, partial, missed };

inline const char* to_string(CoverageClass c) {
  switch (c) {
    case CoverageClass::full: return "FULL";
    case CoverageClass::partial: return "PARTIAL";
    case CoverageClass::missed: return "MISSED";
  }
  return "";
}

struct CoverageReport {
  std::vector<std::string> dataset_names;
  std::vector<std::vector<CoverageClass>> classes;  // [cluster][dataset]
  std::vector<std::size_t> common_core;             // clusters >= threshold for every dataset
  double threshold = 0.10;
  double epsilon = 0.05;

  std::string to_csv(const std::vector<std::string>& labels = {}) const {
    std::vector<std::string> header{"cluster", "label"};
    header.insert(header.end(), dataset_names.begin(), dataset_names.end());
    header.push_back("common_core");
    std::string out = csv::join_row(header);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      std::vector<std::string> row{"#" + std::to_string(c), c < labels.size() ? labels[c] : ""};
      for (auto cls : classes[c]) row.push_back(to_string(cls));
      bool core = std::find(common_core.begin(), common_core.end(), c) != common_core.end();
      row.push_back(core ? "yes" : "no");
      out += csv::join_row(row);
    }
    return out;
  }
};

// FULL: coverage >= 1 - epsilon; PARTIAL: threshold <= coverage < 1 - epsilon;
// MISSED: coverage < threshold.
inline CoverageReport coverage_report(const OverlayProjection& projection, const ClusterPartition& partition,
                                      double threshold = 0.10, double epsilon = 0.05) {
  if (!(threshold > 0 && threshold < 1)) fail(ErrorKind::validation, "coverage threshold must be in (0,1)");
  if (!(epsilon >= 0 && epsilon < 1)) fail(ErrorKind::validation, "coverage epsilon must be in [0,1)");
  if (projection.cluster_coverage.size() != partition.clusters.size()) {
    fail(ErrorKind::validation, "projection and partition do not share the base network");
  }
  CoverageReport report;
  report.dataset_names = projection.dataset_names;
  report.threshold = threshold;
  report.epsilon = epsilon;
  for (std::size_t c = 0; c < projection.cluster_coverage.size(); ++c) {
    std::vector<CoverageClass> row;
    bool everywhere = !projection.cluster_coverage[c].empty();
    for (double f : projection.cluster_coverage[c]) {
      if (f >= 1.0 - epsilon) {
        row.push_back(CoverageClass::full);
      } else if (f >= threshold) {
        row.push_back(CoverageClass::partial);
      } else {
        row.push_back(CoverageClass::missed);
      }
      everywhere = everywhere && f >= threshold;
    }
    if (everywhere) report.common_core.push_back(c);
    report.classes.push_back(std::move(row));
  }
  return report;
}

}  // namespace citecascade

#include <gtest/gtest.h>

#include "citecascade/overlay.hpp"
#include "support/fixtures.hpp"

using namespace citecascade;

namespace {

Dataset numbered(const std::string& name, std::size_t from, std::size_t to) {
  IdSet ids;
  for (std::size_t i = from; i < to; ++i) ids.insert("x" + std::to_string(i));
  return fixtures::dataset_of(name, ids);
}

CoCitationNetwork base_of(const std::vector<Id>& ids) {
  CoCitationNetwork net;
  for (const auto& id : ids) net.nodes[id] = NodeInfo{2000, 1, 2001};
  for (std::size_t i = 1; i < ids.size(); ++i) net.add_pair(ids[i - 1], ids[i], 2001);
  return net;
}

}  // namespace

TEST(OverlapMatrix, HandExample) {
  auto d1 = fixtures::dataset_of("D1", {"a", "b", "c"});
  auto d2 = fixtures::dataset_of("D2", {"b", "c", "d", "e"});
  auto m = overlap_matrix({&d1, &d2});
  EXPECT_EQ(m.values[0][1], 50.00);
  EXPECT_EQ(m.values[1][0], 66.67);
  EXPECT_EQ(m.values[0][0], 100.0);
  EXPECT_EQ(m.intersections[0][1], 2u);
  EXPECT_EQ(m.to_csv(),
            "# values[row][col] = 100*|row ∩ col|/|col| (share of the column dataset; not |∩|/|∪|)\n"
            ",D1,D2\n"
            "Articles,3,4\n"
            "D1,100.00,50.00\n"
            "D2,66.67,100.00\n");
}

TEST(OverlapMatrix, SubsetShareOfLargeSet) {
  auto f = numbered("F", 0, 1777);
  auto combined = numbered("Combined", 0, 46756);
  auto m = overlap_matrix({&f, &combined});
  EXPECT_EQ(format2(m.values[0][1]), "3.80");
  EXPECT_EQ(format2(m.values[1][0]), "100.00");
  EXPECT_EQ(m.to_csv({std::pair{1986, 2019}, std::nullopt}).find("Range,1986-2019,\n") != std::string::npos, true);
}

TEST(OverlapMatrix, IdenticalAndErrors) {
  auto a = numbered("A", 0, 10);
  auto b = numbered("B", 0, 10);
  auto m = overlap_matrix({&a, &b});
  for (const auto& row : m.values) {
    for (double v : row) EXPECT_EQ(v, 100.0);
  }
  EXPECT_THROW(overlap_matrix({&a}), Error);
  auto empty = fixtures::dataset_of("E", {});
  try {
    overlap_matrix({&a, &empty});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("E"), std::string::npos);
  }
}

TEST(OverlapMatrix, IntersectionIdentityOnRandomSets) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Dataset> sets;
    for (int d = 0; d < 4; ++d) {
      IdSet ids;
      auto n = 5 + rng() % 400;
      for (std::size_t i = 0; i < n; ++i) ids.insert("x" + std::to_string(rng() % 600));
      sets.push_back(fixtures::dataset_of("S" + std::to_string(d), ids));
    }
    std::vector<const Dataset*> ptrs;
    for (const auto& s : sets) ptrs.push_back(&s);
    auto m = overlap_matrix(ptrs);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(m.values[i][i], 100.0);
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_GE(m.values[i][j], 0.0);
        EXPECT_LE(m.values[i][j], 100.0);
        // both products recover 100 * |D_i ∩ D_j|
        double lhs = m.exact[i][j] * static_cast<double>(m.sizes[j]);
        double rhs = m.exact[j][i] * static_cast<double>(m.sizes[i]);
        EXPECT_NEAR(lhs, rhs, 1e-7);
        EXPECT_NEAR(lhs / 100.0, static_cast<double>(m.intersections[i][j]), 1e-9);
        EXPECT_EQ(std::lround(m.values[i][j] * m.sizes[j] / 100.0), std::lround(m.values[j][i] * m.sizes[i] / 100.0));
      }
    }
  }
}

TEST(ProjectOverlay, BitsetsMatchMembership) {
  std::vector<Id> ids;
  for (int i = 0; i < 20; ++i) ids.push_back("x" + std::to_string(i));
  auto base = base_of(ids);
  auto a = numbered("A", 0, 10);
  auto b = numbered("B", 5, 30);
  auto disjoint = numbered("Z", 100, 120);
  auto p = project_overlay(base, {&a, &b, &disjoint});
  for (const auto& id : ids) {
    std::string expect;
    for (const auto* d : {&a, &b, &disjoint}) expect.push_back(d->member_ids.count(id) ? '1' : '0');
    EXPECT_EQ(p.bits(id), expect);
  }
  auto reordered = project_overlay(base, {&disjoint, &a, &b});
  for (const auto& id : ids) {
    const auto& x = p.membership.at(id);
    const auto& y = reordered.membership.at(id);
    EXPECT_EQ(x[0], y[1]);
    EXPECT_EQ(x[1], y[2]);
    EXPECT_EQ(x[2], y[0]);
  }
  EXPECT_THROW(project_overlay(CoCitationNetwork{}, {&a}), Error);
}

TEST(ProjectOverlay, AllFiveDatasets) {
  auto base = base_of({"k", "m"});
  std::vector<Dataset> sets;
  for (int i = 0; i < 5; ++i) sets.push_back(fixtures::dataset_of("S" + std::to_string(i), {"k"}));
  std::vector<const Dataset*> ptrs;
  for (const auto& s : sets) ptrs.push_back(&s);
  auto p = project_overlay(base, ptrs);
  EXPECT_EQ(p.bits("k"), "11111");
  EXPECT_EQ(p.bits("m"), "00000");
}

TEST(ProjectOverlay, CoverageFractions) {
  std::vector<Id> ids;
  for (int i = 0; i < 12; ++i) ids.push_back("x" + std::to_string(i));
  auto base = base_of(ids);
  ClusterPartition partition;
  partition.clusters = {{ids.begin(), ids.begin() + 6}, {ids.begin() + 6, ids.begin() + 10}, {ids[10], ids[11]}};
  for (std::size_t c = 0; c < partition.clusters.size(); ++c) {
    for (const auto& id : partition.clusters[c]) partition.assignment[id] = static_cast<int>(c);
  }
  auto combined = fixtures::dataset_of("Combined", IdSet(ids.begin(), ids.end()));
  auto p = project_overlay(base, {&combined}, &partition);
  for (const auto& row : p.cluster_coverage) EXPECT_EQ(row[0], 1.0);

  auto disjoint = numbered("Z", 100, 120);
  p = project_overlay(base, {&disjoint}, &partition);
  for (const auto& row : p.cluster_coverage) EXPECT_EQ(row[0], 0.0);

  ClusterPartition wrong = partition;
  wrong.assignment.erase(ids[0]);
  EXPECT_THROW(project_overlay(base, {&combined}, &wrong), Error);
}

TEST(CoverageReport, ClassesAndCommonCore) {
  // cluster 0: x0..x5, cluster 1: x6..x9, cluster 2: x10..x11
  std::vector<Id> ids;
  for (int i = 0; i < 12; ++i) ids.push_back("x" + std::to_string(i));
  auto base = base_of(ids);
  ClusterPartition partition;
  partition.clusters = {{ids.begin(), ids.begin() + 6}, {ids.begin() + 6, ids.begin() + 10}, {ids[10], ids[11]}};
  for (std::size_t c = 0; c < partition.clusters.size(); ++c) {
    for (const auto& id : partition.clusters[c]) partition.assignment[id] = static_cast<int>(c);
  }
  // cluster 1 is the planted universal cluster
  auto s1 = fixtures::dataset_of("S1", {"x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9"});
  auto s2 = fixtures::dataset_of("S2", {"x6", "x7", "x10", "x11"});
  auto s3 = fixtures::dataset_of("S3", {"x0", "x1", "x2", "x8", "x9"});
  auto p = project_overlay(base, {&s1, &s2, &s3}, &partition);
  auto report = coverage_report(p, partition, 0.25, 0.05);
  EXPECT_EQ(report.classes[0][0], CoverageClass::full);
  EXPECT_EQ(report.classes[0][1], CoverageClass::missed);
  EXPECT_EQ(report.classes[0][2], CoverageClass::partial);  // half covered
  EXPECT_EQ(report.classes[1][1], CoverageClass::partial);
  EXPECT_EQ(report.common_core, (std::vector<std::size_t>{1}));
  auto csv = report.to_csv({"alpha", "beta", "gamma"});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "cluster,label,S1,S2,S3,common_core");
  EXPECT_NE(csv.find("#1,beta,FULL,PARTIAL,PARTIAL,yes\n"), std::string::npos);

  EXPECT_THROW(coverage_report(p, partition, 0.0), Error);
  EXPECT_THROW(coverage_report(p, partition, 1.0), Error);
}

#include <gtest/gtest.h>

#include <functional>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "citecascade/render.hpp"
#include "support/fixtures.hpp"

using namespace citecascade;
namespace pt = boost::property_tree;

namespace {

pt::ptree parse_xml(const std::string& doc) {
  pt::ptree tree;
  std::istringstream in(doc);
  pt::read_xml(in, tree);
  return tree;
}

// Elements with the given tag and class attribute, anywhere in the tree.
std::vector<pt::ptree> elements(const pt::ptree& tree, const std::string& tag, const std::string& cls) {
  std::vector<pt::ptree> out;
  std::function<void(const pt::ptree&)> walk = [&](const pt::ptree& node) {
    for (const auto& [name, child] : node) {
      if (name == tag && child.get<std::string>("<xmlattr>.class", "") == cls) out.push_back(child);
      walk(child);
    }
  };
  walk(tree);
  return out;
}

CoCitationNetwork triangle() {
  CoCitationNetwork net;
  for (const char* id : {"a", "b", "c"}) net.nodes[id] = NodeInfo{2000, 2, 2005};
  net.add_pair("a", "b", 2005);
  net.add_pair("b", "c", 2007);
  net.add_pair("a", "c", 2010);
  return net;
}

CoCitationNetwork two_components() {
  CoCitationNetwork net;
  for (int i = 0; i < 10; ++i) net.nodes["n" + std::to_string(i)] = NodeInfo{2000, 1, 2001};
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) net.add_pair("n" + std::to_string(i), "n" + std::to_string(j), 2001);
  }
  for (int i = 6; i < 10; ++i) {
    for (int j = i + 1; j < 10; ++j) net.add_pair("n" + std::to_string(i), "n" + std::to_string(j), 2003);
  }
  return net;
}

}  // namespace

TEST(ScaleColor, AnchorsAtRangeEnds) {
  std::vector<std::string> palette{"#0000ff", "#ff0000"};
  EXPECT_EQ(scale_color(palette, 1990, 2015, 1990), Rgb::parse("#0000ff"));
  EXPECT_EQ(scale_color(palette, 1990, 2015, 2015), Rgb::parse("#ff0000"));
  EXPECT_EQ(scale_color(palette, 1990, 1990, 1990), Rgb::parse("#0000ff"));
  EXPECT_THROW(Rgb::parse("blue"), Error);
}

TEST(RenderMap, EdgeColorsFromYears) {
  CoCitationNetwork net;
  for (const char* id : {"a", "b", "c"}) net.nodes[id] = NodeInfo{1985, 1, 1990};
  net.add_pair("a", "b", 1990);
  net.add_pair("b", "c", 2015);
  RenderSpec spec;
  spec.year_palette = {"#0000ff", "#ff0000"};
  auto svg = render_map(net, nullptr, nullptr, spec, layout(net, spec.seed, 50));
  auto edges = elements(parse_xml(svg), "line", "edge");
  ASSERT_EQ(edges.size(), 2u);
  std::map<std::string, std::string> by_year;
  for (const auto& e : edges) by_year[e.get<std::string>("<xmlattr>.data-year")] = e.get<std::string>("<xmlattr>.stroke");
  EXPECT_EQ(by_year["1990"], "#0000ff");
  EXPECT_EQ(by_year["2015"], "#ff0000");
}

TEST(RenderMap, WellFormedWithOneGlyphPerNode) {
  auto net = triangle();
  ClusterPartition p;
  p.clusters = {{"a", "b", "c"}};
  p.assignment = {{"a", 0}, {"b", 0}, {"c", 0}};
  p.labels = {"fish & oil <studies>"};
  RenderSpec spec;
  auto svg = render_map(net, &p, nullptr, spec, layout(net, spec.seed));
  auto tree = parse_xml(svg);
  EXPECT_EQ(elements(tree, "circle", "node").size(), 3u);
  EXPECT_LE(elements(tree, "line", "edge").size(), 3u);
  auto labels = elements(tree, "text", "cluster-label");
  ASSERT_EQ(labels.size(), 1u);
  EXPECT_EQ(labels[0].get_value<std::string>(), "#0 fish & oil <studies>");
}

TEST(RenderMap, SingleDatasetProjectionSharesColor) {
  auto net = two_components();
  IdSet members;
  for (int i = 0; i < 6; ++i) members.insert("n" + std::to_string(i));
  auto d = fixtures::dataset_of("F", members);
  auto projection = project_overlay(net, {&d});
  RenderSpec spec;
  auto svg = render_map(net, nullptr, &projection, spec, layout(net, spec.seed));
  std::set<std::string> member_fills;
  for (const auto& c : elements(parse_xml(svg), "circle", "node")) {
    if (c.get<std::string>("<xmlattr>.data-datasets") == "1") member_fills.insert(c.get<std::string>("<xmlattr>.fill"));
  }
  EXPECT_EQ(member_fills, (std::set<std::string>{spec.dataset_palette[0]}));
}

TEST(RenderOverlay, SmallMultiplesForThreeDatasets) {
  auto net = two_components();
  auto a = fixtures::dataset_of("A", {"n0", "n1"});
  auto b = fixtures::dataset_of("B", {"n6"});
  auto c = fixtures::dataset_of("C", {"n9", "n0"});
  auto projection = project_overlay(net, {&a, &b, &c});
  RenderSpec spec;
  auto positions = layout(net, spec.seed);
  auto docs = render_overlay(net, nullptr, projection, spec, positions, "comparison");
  ASSERT_EQ(docs.size(), 3u);
  EXPECT_EQ(docs[1].name, "comparison.overlay-B");
  for (const auto& doc : docs) EXPECT_EQ(elements(parse_xml(doc.svg), "circle", "node").size(), net.nodes.size());

  spec.overlay_mode = OverlayMode::blend;
  EXPECT_EQ(render_overlay(net, nullptr, projection, spec, positions, "comparison").size(), 1u);
}

TEST(RenderMap, ByteIdenticalAndValidated) {
  auto net = two_components();
  RenderSpec spec;
  auto first = render_map(net, nullptr, nullptr, spec, layout(net, spec.seed));
  auto second = render_map(net, nullptr, nullptr, spec, layout(net, spec.seed));
  EXPECT_EQ(first, second);
  spec.year_palette = {"#000000"};
  EXPECT_THROW(render_map(net, nullptr, nullptr, spec, layout(net, 1)), Error);
  RenderSpec ok;
  EXPECT_THROW(render_map(net, nullptr, nullptr, ok, Layout{}), Error);
}

TEST(Layout, SingleNodeAtOrigin) {
  CoCitationNetwork net;
  net.nodes["only"] = NodeInfo{};
  auto l = layout(net, 7);
  EXPECT_EQ(l.at("only"), (Point{0, 0}));
}

TEST(Layout, DeterministicPerSeed) {
  auto store = fixtures::random_cocitation_corpus(3, 100, 40, 6);
  SnapshotSource source(store);
  IdSet ids;
  for (const auto& r : store.records()) ids.insert(r.id);
  NetworkConfig config;
  config.min_citations = 0;
  auto net = build_network(fixtures::dataset_of("d", ids), source, config);
  auto a = layout(net, 42);
  EXPECT_EQ(a, layout(net, 42));
  EXPECT_NE(a, layout(net, 43));
  for (const auto& [id, p] : a) {
    EXPECT_TRUE(std::isfinite(p.x));
    EXPECT_TRUE(std::isfinite(p.y));
  }
}

TEST(Layout, ComponentsDoNotOverlap) {
  auto net = two_components();
  auto l = layout(net, 5);
  auto box = [&](int from, int to) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (int i = from; i < to; ++i) {
      const auto& p = l.at("n" + std::to_string(i));
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
    return std::array<double, 4>{x0, y0, x1, y1};
  };
  auto a = box(0, 6);
  auto b = box(6, 10);
  bool separated = a[2] < b[0] || b[2] < a[0] || a[3] < b[1] || b[3] < a[1];
  EXPECT_TRUE(separated);
}

TEST(RenderDistribution, SinglePoint) {
  YearDistribution d;
  d.dataset_name = "F";
  d.counts = {{2000, 1}};
  d.range = std::pair{2000, 2000};
  auto svg = render_distribution({d}, false);
  auto tree = parse_xml(svg);
  EXPECT_EQ(elements(tree, "polyline", "series").size(), 1u);
  EXPECT_EQ(elements(tree, "circle", "point").size(), 1u);
  EXPECT_THROW(render_distribution({}, false), Error);
}

TEST(RenderDistribution, LogModeZeroYearsAtBaseline) {
  YearDistribution d;
  d.dataset_name = "S";
  d.counts = {{2000, 4}, {2002, 9}};
  d.range = std::pair{2000, 2002};
  RenderSpec spec;
  auto tree = parse_xml(render_distribution({d}, true, spec));
  auto series = elements(tree, "polyline", "series");
  ASSERT_EQ(series.size(), 1u);
  std::istringstream points(series[0].get<std::string>("<xmlattr>.points"));
  std::vector<std::pair<double, double>> xy;
  std::string token;
  while (points >> token) {
    auto comma = token.find(',');
    xy.emplace_back(std::stod(token.substr(0, comma)), std::stod(token.substr(comma + 1)));
  }
  ASSERT_EQ(xy.size(), 3u);
  const double bottom = spec.height - 50.0, top = 30.0;
  EXPECT_NEAR(xy[1].second, bottom, 1e-9);  // ln(1 + 0) = 0
  EXPECT_NEAR(xy[2].second, top, 1e-9);     // maximum
  EXPECT_NEAR(xy[0].second, bottom - (bottom - top) * std::log(5.0) / std::log(10.0), 0.01);
}

TEST(RenderDistribution, FiveSeriesFiveLegendEntries) {
  std::vector<YearDistribution> all;
  for (int s = 0; s < 5; ++s) {
    YearDistribution d;
    d.dataset_name = "S" + std::to_string(s);
    for (int y = 1990 + s; y < 2019; y += 2) d.counts[y] = static_cast<std::size_t>(y % 7 + s);
    d.range = std::pair{d.counts.begin()->first, d.counts.rbegin()->first};
    all.push_back(d);
  }
  auto tree = parse_xml(render_distribution(all, false));
  EXPECT_EQ(elements(tree, "polyline", "series").size(), 5u);
  EXPECT_EQ(elements(tree, "text", "legend-entry").size(), 5u);
  auto mins = elements(tree, "text", "axis-min");
  ASSERT_EQ(mins.size(), 1u);
  EXPECT_EQ(mins[0].get_value<std::string>(), "1990");
}

TEST(Html, EmbedsSvgDocuments) {
  auto net = triangle();
  RenderSpec spec;
  auto svg = render_map(net, nullptr, nullptr, spec, layout(net, spec.seed));
  auto html = to_html("maps & charts", {svg, svg});
  EXPECT_EQ(html.find("<?xml"), std::string::npos);
  EXPECT_NE(html.find("<title>maps &amp; charts</title>"), std::string::npos);
  std::size_t count = 0;
  for (auto pos = html.find("<svg "); pos != std::string::npos; pos = html.find("<svg ", pos + 1)) ++count;
  EXPECT_EQ(count, 2u);
  EXPECT_EQ(html.find("src="), std::string::npos);  // nothing fetched
  EXPECT_EQ(html.find("href="), std::string::npos);
}

#pragma once

// GraphML and JSON serialization of co-citation networks. Both formats
// round-trip nodes, edges, configuration and slices.

#include <fstream>
#include <sstream>
#include <string>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include "citecascade/cocitation.hpp"
#include "citecascade/error.hpp"
#include "citecascade/xml.hpp"

namespace citecascade {

inline nlohmann::ordered_json config_to_json(const NetworkConfig& c) {
  nlohmann::ordered_json j;
  j["lrf"] = c.lrf;
  j["lby"] = c.lby == kUnlimitedLookBack ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(c.lby);
  j["min_citations"] = c.min_citations;
  j["top_n"] = c.top_n;
  j["slice_years"] = c.slice_years;
  j["e"] = c.e_param;
  j["per_slice_pruning"] = c.per_slice_pruning;
  j["normalization"] = to_string(c.normalization);
  return j;
}

inline NetworkConfig config_from_json(const nlohmann::json& j) {
  NetworkConfig c;
  c.lrf = j.value("lrf", c.lrf);
  if (j.contains("lby")) c.lby = j["lby"].is_null() ? kUnlimitedLookBack : j["lby"].get<int>();
  c.min_citations = j.value("min_citations", c.min_citations);
  c.top_n = j.value("top_n", c.top_n);
  c.slice_years = j.value("slice_years", c.slice_years);
  c.e_param = j.value("e", c.e_param);
  c.per_slice_pruning = j.value("per_slice_pruning", c.per_slice_pruning);
  c.normalization = parse_normalization(j.value("normalization", std::string("none")));
  return c;
}

inline nlohmann::ordered_json network_to_json(const CoCitationNetwork& net) {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(net.config);
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& [id, n] : net.nodes) {
    j["nodes"].push_back({{"id", id},
                          {"year", n.year ? nlohmann::ordered_json(*n.year) : nlohmann::ordered_json(nullptr)},
                          {"citations", n.citations},
                          {"first_cited_year", n.first_cited_year}});
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& [key, e] : net.edges) {
    j["edges"].push_back({{"source", key.first},
                          {"target", key.second},
                          {"count", e.count},
                          {"weight", e.weight},
                          {"first_cocited_year", e.first_cocited_year}});
  }
  j["slices"] = nlohmann::ordered_json::array();
  for (const auto& s : net.slices) {
    j["slices"].push_back({{"begin", s.begin}, {"end", s.end}, {"citers", s.citers}});
  }
  return j;
}

inline CoCitationNetwork network_from_json(const nlohmann::json& j) {
  CoCitationNetwork net;
  try {
    net.config = config_from_json(j.at("config"));
    for (const auto& n : j.at("nodes")) {
      NodeInfo info;
      if (!n.at("year").is_null()) info.year = n["year"].get<int>();
      info.citations = n.at("citations").get<std::size_t>();
      info.first_cited_year = n.at("first_cited_year").get<int>();
      net.nodes.emplace(n.at("id").get<std::string>(), info);
    }
    for (const auto& e : j.at("edges")) {
      EdgeInfo info{e.at("count").get<std::size_t>(), e.at("weight").get<double>(),
                    e.at("first_cocited_year").get<int>()};
      auto a = e.at("source").get<std::string>();
      auto b = e.at("target").get<std::string>();
      if (a == b) fail(ErrorKind::data, "self-loop in network file: " + a);
      if (!net.nodes.count(a) || !net.nodes.count(b)) fail(ErrorKind::data, "edge endpoint missing: " + a + "-" + b);
      net.edges.emplace(make_edge_key(a, b), info);
    }
    if (j.contains("slices")) {
      for (const auto& s : j["slices"]) {
        net.slices.push_back({s.at("begin").get<int>(), s.at("end").get<int>(),
                              s.at("citers").get<std::vector<std::string>>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::data, std::string("malformed network json: ") + e.what());
  }
  return net;
}

inline std::string network_to_graphml(const CoCitationNetwork& net) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"config\" for=\"graph\" attr.name=\"config\" attr.type=\"string\"/>\n"
      << "  <key id=\"slices\" for=\"graph\" attr.name=\"slices\" attr.type=\"string\"/>\n"
      << "  <key id=\"year\" for=\"node\" attr.name=\"year\" attr.type=\"int\"/>\n"
      << "  <key id=\"citations\" for=\"node\" attr.name=\"citations\" attr.type=\"int\"/>\n"
      << "  <key id=\"first_cited_year\" for=\"node\" attr.name=\"first_cited_year\" attr.type=\"int\"/>\n"
      << "  <key id=\"count\" for=\"edge\" attr.name=\"count\" attr.type=\"int\"/>\n"
      << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      << "  <key id=\"first_cocited_year\" for=\"edge\" attr.name=\"first_cocited_year\" attr.type=\"int\"/>\n"
      << "  <graph id=\"cocitation\" edgedefault=\"undirected\">\n";
  nlohmann::ordered_json slices = nlohmann::ordered_json::array();
  for (const auto& s : net.slices) slices.push_back({{"begin", s.begin}, {"end", s.end}, {"citers", s.citers}});
  out << "    <data key=\"config\">" << xml::escape(config_to_json(net.config).dump()) << "</data>\n"
      << "    <data key=\"slices\">" << xml::escape(slices.dump()) << "</data>\n";
  for (const auto& [id, n] : net.nodes) {
    out << "    <node id=\"" << xml::escape(id) << "\">";
    if (n.year) out << "<data key=\"year\">" << *n.year << "</data>";
    out << "<data key=\"citations\">" << n.citations << "</data>"
        << "<data key=\"first_cited_year\">" << n.first_cited_year << "</data></node>\n";
  }
  for (const auto& [key, e] : net.edges) {
    out << "    <edge source=\"" << xml::escape(key.first) << "\" target=\"" << xml::escape(key.second) << "\">"
        << "<data key=\"count\">" << e.count << "</data>"
        << "<data key=\"weight\">" << xml::format_double(e.weight) << "</data>"
        << "<data key=\"first_cocited_year\">" << e.first_cocited_year << "</data></edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

inline CoCitationNetwork network_from_graphml(const std::string& document) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(document);
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    fail(ErrorKind::data, std::string("malformed graphml: ") + e.what());
  }
  CoCitationNetwork net;
  const auto& graph = tree.get_child("graphml.graph");
  auto data_of = [](const pt::ptree& element) {
    std::map<std::string, std::string> values;
    for (const auto& [tag, child] : element) {
      if (tag == "data") values[child.get<std::string>("<xmlattr>.key")] = child.get_value<std::string>();
    }
    return values;
  };
  auto graph_data = data_of(graph);
  if (graph_data.count("config")) net.config = config_from_json(nlohmann::json::parse(graph_data["config"]));
  if (graph_data.count("slices")) {
    for (const auto& s : nlohmann::json::parse(graph_data["slices"])) {
      net.slices.push_back({s.at("begin").get<int>(), s.at("end").get<int>(),
                            s.at("citers").get<std::vector<std::string>>()});
    }
  }
  try {
    for (const auto& [tag, child] : graph) {
      if (tag == "node") {
        auto values = data_of(child);
        NodeInfo info;
        if (values.count("year")) info.year = std::stoi(values["year"]);
        info.citations = std::stoul(values.at("citations"));
        info.first_cited_year = std::stoi(values.at("first_cited_year"));
        net.nodes.emplace(child.get<std::string>("<xmlattr>.id"), info);
      }
    }
    for (const auto& [tag, child] : graph) {
      if (tag == "edge") {
        auto values = data_of(child);
        auto a = child.get<std::string>("<xmlattr>.source");
        auto b = child.get<std::string>("<xmlattr>.target");
        if (!net.nodes.count(a) || !net.nodes.count(b)) fail(ErrorKind::data, "edge endpoint missing: " + a + "-" + b);
        EdgeInfo info{std::stoul(values.at("count")), std::strtod(values.at("weight").c_str(), nullptr),
                      std::stoi(values.at("first_cocited_year"))};
        net.edges.emplace(make_edge_key(a, b), info);
      }
    }
  } catch (const std::out_of_range&) {
    fail(ErrorKind::data, "graphml element missing a required data key");
  } catch (const std::invalid_argument&) {
    fail(ErrorKind::data, "graphml data value is not numeric");
  }
  return net;
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write file: " + path);
  out << content;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace citecascade

// citecascade: command-line pipeline over a session directory.
//
//   citecascade [-s DIR] ingest FILE --format jsonl|dimensions-csv [--dataset NAME]
//   citecascade expand --name S3 --seed ID --stages F:3 --theta-citer 10 --theta-ref 10
//   citecascade compare --datasets F,S3,S5 --base combined
//
// Exit status: 0 ok, 1 internal, 2 unknown command, 3 validation, 4 data or
// not found, 5 i/o. Errors print one line: "error: <kind>: <message>".

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "citecascade/citecascade.hpp"
#include "citecascade/session.hpp"

namespace fs = std::filesystem;
using namespace citecascade;

namespace {

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

int parse_lby(const std::string& raw) {
  if (raw == "inf" || raw == "unlimited") return kUnlimitedLookBack;
  try {
    std::size_t used = 0;
    int v = std::stoi(raw, &used);
    if (used == raw.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::validation, "lby must be an integer or 'inf': " + raw);
}

const std::unordered_set<std::string>& stopwords_for(Session& session) {
  static std::unordered_set<std::string> loaded;
  const auto& path = session.config().stopwords;
  if (path.empty()) return text::default_stopwords();
  loaded = text::load_stopwords(path);
  return loaded;
}

void warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<fs::path> network_files(const Session& session) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(session.dir() / "networks")) {
    auto name = entry.path().filename().string();
    if (entry.path().extension() == ".json" && name.find(".partition.") == std::string::npos) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---- ingest / enrich / search / expand ------------------------------------

struct IngestArgs {
  std::string path;
  std::string format = "jsonl";
  std::string dataset;
};

int cmd_ingest(Session& session, const IngestArgs& a) {
  auto format = parse_format(a.format);
  if (!a.dataset.empty()) check_name("dataset", a.dataset);
  RecordStore incoming;
  auto report = incoming.ingest(a.path, format);
  auto store = session.load_store();
  for (const auto& r : incoming.records()) store.upsert(r);
  session.save_store(store);
  auto stem = fs::path(a.path).stem().string();
  write_text(session.path("reports", "ingest-" + stem + ".rejects.csv").string(), report.to_csv());
  if (!a.dataset.empty()) {
    Dataset d;
    d.name = a.dataset;
    for (const auto& r : incoming.records()) d.member_ids.insert(r.id);
    d.provenance = {Provenance::Kind::imported, fs::path(a.path).filename().string()};
    d.created_at = timestamp_now();
    session.save_dataset(d);
  }
  std::cout << "loaded " << report.loaded << " (" << report.inserted << " new, " << report.merged
            << " merged within file), rejected " << report.rejects.size() << ", store size " << store.size() << "\n";
  return 0;
}

int cmd_enrich(Session& session, const std::string& path) {
  auto store = session.load_store();
  auto report = store.enrich_abstracts(path);
  session.save_store(store);
  std::string unmatched = "key\n";
  for (const auto& k : report.unmatched) unmatched += csv::join_row({k});
  write_text(session.path("reports", "enrich-" + fs::path(path).stem().string() + ".unmatched.csv").string(),
             unmatched);
  for (const auto& m : report.malformed) {
    std::cerr << "warning: enrichment line " << m.line << " skipped: " << m.reason << "\n";
  }
  std::cout << "enriched " << report.enriched << ", already present " << report.already_present << ", unmatched "
            << report.unmatched.size() << "\n";
  return 0;
}

struct SearchArgs {
  std::string name;
  std::string kind = "phrase-in-title-abstract";
  std::vector<std::string> phrases;
};

int cmd_search(Session& session, const SearchArgs& a) {
  check_name("dataset", a.name);
  auto store = session.load_store();
  SnapshotSource source(store);
  SourceQuery query{parse_query_kind(a.kind), a.phrases};
  auto d = source.search(query, a.name);
  if (d.member_ids.empty()) std::cerr << "warning: search matched no records\n";
  session.save_dataset(d);
  std::cout << "dataset " << d.name << ": " << d.size() << " records (" << d.provenance.detail << ")\n";
  return 0;
}

struct ExpandArgs {
  std::string name;
  std::string spec_path;
  std::vector<std::string> seeds;
  std::string stages;
  std::optional<std::int64_t> theta_citer;
  std::optional<std::int64_t> theta_ref;
  std::optional<std::size_t> cap;
};

int cmd_expand(Session& session, const ExpandArgs& a) {
  check_name("dataset", a.name);
  ExpansionSpec spec;
  if (!a.spec_path.empty()) {
    try {
      spec = ExpansionSpec::from_json(nlohmann::json::parse(read_text(a.spec_path)));
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::validation, std::string("malformed expansion spec: ") + e.what());
    }
  } else {
    spec.theta_citer = session.config().theta_citer;
    spec.theta_ref = session.config().theta_ref;
  }
  auto seeds = split_list(a.seeds);
  if (!seeds.empty()) spec.seeds = IdSet(seeds.begin(), seeds.end());
  if (!a.stages.empty()) spec.stages = ExpansionSpec::parse_stages(a.stages);
  if (a.theta_citer) spec.theta_citer = *a.theta_citer;
  if (a.theta_ref) spec.theta_ref = *a.theta_ref;
  if (a.cap) spec.per_generation_cap = *a.cap;

  auto store = session.load_store();
  SnapshotSource source(store);
  auto result = run_cascade(source, spec, a.name);
  warn(result.trace.warnings);
  session.save_dataset(result.dataset);
  write_text(session.path("traces", a.name + ".spec.json").string(), dump(spec.to_json()));
  write_text(session.path("traces", a.name + ".trace.csv").string(), trace_report(result.trace));
  write_text(session.path("traces", a.name + ".trace.json").string(), dump(trace_to_json(result.trace)));
  std::cout << "dataset " << a.name << ": " << result.dataset.size() << " records after "
            << result.trace.generations.size() << " generations (" << to_string(result.trace.terminal) << ")\n";
  return 0;
}

// ---- network / cluster ----------------------------------------------------

struct NetworkArgs {
  std::string dataset;
  std::string name;
  std::optional<double> lrf;
  std::optional<std::string> lby;
  std::optional<std::int64_t> min_citations;
  std::optional<std::size_t> top_n;
  std::optional<int> slice_years;
  std::optional<double> e_param;
  bool per_slice_pruning = false;
  std::optional<std::string> normalization;
};

NetworkConfig network_config(Session& session, const NetworkArgs& a) {
  NetworkConfig c = session.config().network;
  if (a.lrf) c.lrf = *a.lrf;
  if (a.lby) c.lby = parse_lby(*a.lby);
  if (a.min_citations) c.min_citations = *a.min_citations;
  if (a.top_n) c.top_n = *a.top_n;
  if (a.slice_years) c.slice_years = *a.slice_years;
  if (a.e_param) c.e_param = *a.e_param;
  if (a.per_slice_pruning) c.per_slice_pruning = true;
  if (a.normalization) c.normalization = parse_normalization(*a.normalization);
  c.validate();
  return c;
}

CoCitationNetwork build_and_save(Session& session, const RecordStore& store, const Dataset& dataset,
                                 const std::string& name, const NetworkConfig& config) {
  check_members(dataset, store);
  SnapshotSource source(store);
  std::vector<std::string> warnings;
  auto net = build_network(dataset, source, config, &warnings);
  warn(warnings);
  session.save_network(name, net);
  return net;
}

void print_stats(const std::string& name, const CoCitationNetwork& net) {
  auto s = network_stats(net);
  std::cout << "network " << name << ": " << s.nodes << " nodes, " << s.edges << " links, LCC " << s.lcc_size << " ("
            << s.lcc_percent << "% rounded, " << s.lcc_percent_truncated << "% truncated), density "
            << xml::format_double(s.density) << "\n";
}

int cmd_network(Session& session, const NetworkArgs& a) {
  auto name = a.name.empty() ? a.dataset : a.name;
  check_name("network", name);
  auto config = network_config(session, a);
  auto store = session.load_store();
  auto catalog = session.load_catalog();
  auto net = build_and_save(session, store, catalog.get(a.dataset), name, config);
  print_stats(name, net);
  return 0;
}

std::string clusters_csv(const CoCitationNetwork& net, const ClusterPartition& p) {
  auto sil = silhouette(net, p.assignment);
  std::string out = csv::join_row({"node", "cluster", "silhouette"});
  for (const auto& [id, c] : p.assignment) {
    out += csv::join_row({id, p.display_name(static_cast<std::size_t>(c)), xml::fixed(sil.per_node.at(id))});
  }
  return out;
}

nlohmann::ordered_json cluster_summary(const ClusterPartition& p, const CitationSource& source, const IdSet& universe) {
  nlohmann::ordered_json j;
  j["modularity"] = p.modularity;
  j["mean_silhouette"] = p.mean_silhouette;
  j["mean_silhouette_weighting"] = "unweighted mean over clusters";
  j["clusters"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < p.size(); ++c) {
    nlohmann::ordered_json top = nlohmann::ordered_json::array();
    for (const auto& t : top_citing_articles(p.clusters[c], source, universe, 5)) {
      top.push_back({{"id", t.id}, {"members_cited", t.members_cited}, {"citations", t.global_citations}});
    }
    j["clusters"].push_back({{"name", p.display_name(c)},
                             {"label", c < p.labels.size() ? p.labels[c] : ""},
                             {"size", p.clusters[c].size()},
                             {"silhouette", p.silhouette[c]},
                             {"top_citers", top}});
  }
  return j;
}

ClusterPartition cluster_and_save(Session& session, const std::string& name, const CoCitationNetwork& net,
                                  const RecordStore& store, int levels, std::size_t top_k) {
  SnapshotSource source(store);
  LabelOptions label_options;
  label_options.stopwords = &stopwords_for(session);
  ConceptTreeOptions tree_options;
  tree_options.stopwords = label_options.stopwords;
  auto universe = citing_universe(net);

  auto p = detect_communities(net);
  label_partition(p, source, universe, label_options);
  warn(p.warnings);
  session.save_partition(name, p);
  write_text(session.path("reports", name + ".clusters.csv").string(), clusters_csv(net, p));

  auto summary = cluster_summary(p, source, universe);
  std::string trees;
  nlohmann::ordered_json trees_json = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < p.size() && c < top_k; ++c) {
    auto tree = build_concept_tree(p.clusters[c], source, universe, tree_options);
    trees += p.display_name(c) + " " + p.labels[c] + "\n" + tree.to_text() + "\n";
    trees_json.push_back({{"cluster", p.display_name(c)}, {"tree", tree.to_json()}});
  }
  write_text(session.path("reports", name + ".concepts.txt").string(), trees);
  write_text(session.path("reports", name + ".concepts.json").string(), dump(trees_json));

  if (levels >= 2) {
    summary["subclusters"] = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < p.size() && c < top_k; ++c) {
      auto sub = sub_cluster(net, p, c);
      auto sub_net = induced_subgraph(net, p.clusters[c]);
      label_partition(sub, source, cluster_citers(p.clusters[c], source, universe), label_options);
      warn(sub.warnings);
      auto sub_name = name + ".sub" + std::to_string(c);
      session.save_partition(sub_name, sub);
      write_text(session.path("reports", sub_name + ".clusters.csv").string(), clusters_csv(sub_net, sub));
      summary["subclusters"].push_back(
          {{"parent", p.display_name(c)}, {"partition", cluster_summary(sub, source, universe)}});
    }
  }
  write_text(session.path("reports", name + ".clusters.json").string(), dump(summary));
  return p;
}

int cmd_cluster(Session& session, const std::string& name, int levels, std::optional<std::size_t> top_k) {
  if (levels < 1 || levels > 2) fail(ErrorKind::validation, "levels must be 1 or 2");
  auto net = session.load_network(name);
  auto store = session.load_store();
  auto p = cluster_and_save(session, name, net, store, levels, top_k.value_or(session.config().subcluster_top_k));
  std::cout << "network " << name << ": " << p.size() << " clusters, modularity " << xml::fixed(p.modularity)
            << ", mean silhouette " << xml::fixed(p.mean_silhouette) << "\n";
  for (std::size_t c = 0; c < p.size() && c < 10; ++c) {
    std::cout << "  " << p.display_name(c) << " " << p.labels[c] << " (" << p.clusters[c].size() << ")\n";
  }
  return 0;
}

// ---- compare / render / report --------------------------------------------

struct Comparison {
  std::vector<std::string> datasets;
  std::string base;
};

fs::path comparison_path(const Session& s) { return s.path("reports", "comparison.json"); }

std::optional<Comparison> load_comparison(const Session& session) {
  if (!fs::exists(comparison_path(session))) return std::nullopt;
  auto j = nlohmann::json::parse(read_text(comparison_path(session).string()));
  return Comparison{j.at("datasets").get<std::vector<std::string>>(), j.at("base").get<std::string>()};
}

std::string overlap_csv(const RecordStore& store, const DatasetCatalog& catalog, const Comparison& cmp) {
  std::vector<const Dataset*> sets;
  std::vector<std::optional<std::pair<int, int>>> ranges;
  auto names = cmp.datasets;
  if (std::find(names.begin(), names.end(), cmp.base) == names.end()) names.push_back(cmp.base);
  for (const auto& n : names) {
    const auto& d = catalog.get(n);
    sets.push_back(&d);
    ranges.push_back(d.member_ids.empty() ? std::nullopt : year_distribution(d, store).range);
  }
  return overlap_matrix(sets).to_csv(ranges);
}

struct CompareArgs {
  std::vector<std::string> datasets;
  std::string base = "combined";
  std::optional<double> threshold;
  std::optional<double> epsilon;
};

int cmd_compare(Session& session, const CompareArgs& a) {
  Comparison cmp{split_list(a.datasets), a.base};
  if (cmp.datasets.size() < 2) fail(ErrorKind::validation, "need at least 2 datasets");
  check_name("dataset", cmp.base);
  auto store = session.load_store();
  auto catalog = session.load_catalog();
  for (const auto& n : cmp.datasets) catalog.get(n);
  if (!catalog.contains(cmp.base)) {
    const auto& combined = catalog.union_of(cmp.datasets, cmp.base);
    session.save_dataset(combined);
    std::cout << "dataset " << cmp.base << ": union of " << combined.provenance.detail << ", " << combined.size()
              << " records\n";
  }
  auto matrix = overlap_csv(store, catalog, cmp);
  write_text(session.path("reports", "overlap.csv").string(), matrix);

  CoCitationNetwork base;
  if (session.has_network(cmp.base)) {
    base = session.load_network(cmp.base);
  } else {
    base = build_and_save(session, store, catalog.get(cmp.base), cmp.base, session.config().network);
    print_stats(cmp.base, base);
  }
  if (base.empty()) fail(ErrorKind::data, "base network " + cmp.base + " is empty; nothing to project onto");
  ClusterPartition partition = session.has_partition(cmp.base)
                                   ? session.load_partition(cmp.base)
                                   : cluster_and_save(session, cmp.base, base, store, 1,
                                                      session.config().subcluster_top_k);
  std::vector<const Dataset*> sets;
  for (const auto& n : cmp.datasets) sets.push_back(&catalog.get(n));
  auto projection = project_overlay(base, sets, &partition);
  auto report = coverage_report(projection, partition, a.threshold.value_or(session.config().coverage_threshold),
                                a.epsilon.value_or(session.config().coverage_epsilon));
  write_text(session.path("reports", cmp.base + ".projection.json").string(), dump(projection.to_json()));
  write_text(session.path("reports", cmp.base + ".coverage.csv").string(), report.to_csv(partition.labels));
  nlohmann::ordered_json j{{"datasets", cmp.datasets}, {"base", cmp.base}};
  write_text(comparison_path(session).string(), dump(j));
  std::cout << matrix;
  std::cout << "common core:";
  for (auto c : report.common_core) std::cout << " " << partition.display_name(c);
  std::cout << (report.common_core.empty() ? " none\n" : "\n");
  return 0;
}

struct RenderArgs {
  std::string network;
  std::optional<std::uint64_t> seed;
  std::string mode = "auto";
  bool html = true;
};

int cmd_render(Session& session, const RenderArgs& a) {
  RenderSpec spec = session.config().render;
  if (a.seed) spec.seed = *a.seed;
  if (a.mode == "blend") {
    spec.overlay_mode = OverlayMode::blend;
  } else if (a.mode == "multiples") {
    spec.overlay_mode = OverlayMode::small_multiples;
  } else if (a.mode != "auto") {
    fail(ErrorKind::validation, "mode must be auto, blend or multiples");
  }
  spec.validate();
  auto net = session.load_network(a.network);
  if (net.empty()) fail(ErrorKind::data, "network " + a.network + " is empty; nothing to render");
  std::optional<ClusterPartition> partition;
  if (session.has_partition(a.network)) partition = session.load_partition(a.network);
  auto positions = layout(net, spec.seed, spec.iterations);
  const ClusterPartition* p = partition ? &*partition : nullptr;

  std::vector<std::string> written;
  auto emit = [&](const std::string& stem, const std::string& svg) {
    write_text(session.path("renders", stem + ".svg").string(), svg);
    written.push_back(stem + ".svg");
  };
  std::vector<std::string> map_svgs{render_map(net, p, nullptr, spec, positions, std::nullopt, a.network)};
  emit(a.network + ".map", map_svgs[0]);

  auto cmp = load_comparison(session);
  if (cmp && cmp->base == a.network) {
    auto store = session.load_store();
    auto catalog = session.load_catalog();
    std::vector<const Dataset*> sets;
    for (const auto& n : cmp->datasets) sets.push_back(&catalog.get(n));
    auto projection = project_overlay(net, sets, p);
    std::vector<std::string> overlay_svgs;
    for (const auto& doc : render_overlay(net, p, projection, spec, positions, "comparison")) {
      emit(doc.name, doc.svg);
      overlay_svgs.push_back(doc.svg);
    }
    std::vector<YearDistribution> series;
    for (const auto* d : sets) series.push_back(year_distribution(*d, store));
    auto linear = render_distribution(series, false, spec);
    auto logged = render_distribution(series, true, spec);
    emit("comparison.distribution", linear);
    emit("comparison.distribution-log", logged);
    if (a.html) {
      overlay_svgs.push_back(linear);
      overlay_svgs.push_back(logged);
      write_text(session.path("renders", "comparison.html").string(), to_html("comparison", overlay_svgs));
      written.push_back("comparison.html");
    }
  }
  if (a.html) {
    write_text(session.path("renders", a.network + ".html").string(), to_html(a.network, map_svgs));
    written.push_back(a.network + ".html");
  }
  for (const auto& w : written) std::cout << "wrote renders/" << w << "\n";
  return 0;
}

std::string report_datasets(const Session& session) {
  auto store = session.load_store();
  auto catalog = session.load_catalog();
  std::string out = csv::join_row({"dataset", "articles", "range", "unknown_year", "provenance", "query"});
  for (const auto& [name, d] : catalog.all()) {
    std::string range;
    std::size_t unknown = 0;
    if (!d.member_ids.empty()) {
      auto dist = year_distribution(d, store);
      if (dist.range) range = std::to_string(dist.range->first) + "-" + std::to_string(dist.range->second);
      unknown = dist.unknown;
    }
    out += csv::join_row({name, std::to_string(d.size()), range, std::to_string(unknown),
                          to_string(d.provenance.kind), d.provenance.detail});
  }
  return out;
}

std::string report_networks(const Session& session) {
  std::vector<std::string> names;
  std::vector<NetworkStats> stats;
  std::vector<std::optional<ClusterPartition>> partitions;
  for (const auto& f : network_files(session)) {
    auto name = f.stem().string();
    auto net = session.load_network(name);
    names.push_back(name);
    stats.push_back(network_stats(net));
    partitions.push_back(session.has_partition(name) ? std::optional(session.load_partition(name)) : std::nullopt);
  }
  auto row = [&](const std::string& label, auto&& cell) {
    std::vector<std::string> r{label};
    for (std::size_t i = 0; i < names.size(); ++i) r.push_back(cell(i));
    return csv::join_row(r);
  };
  std::vector<std::string> header{""};
  header.insert(header.end(), names.begin(), names.end());
  std::string out = csv::join_row(header);
  out += row("Nodes", [&](std::size_t i) { return std::to_string(stats[i].nodes); });
  out += row("Links", [&](std::size_t i) { return std::to_string(stats[i].edges); });
  // Both conventions are printed: rounding and truncation can differ by one.
  out += row("LCC (%)", [&](std::size_t i) {
    return std::to_string(stats[i].lcc_size) + " (" + std::to_string(stats[i].lcc_percent) + ")";
  });
  out += row("LCC (% truncated)", [&](std::size_t i) {
    return std::to_string(stats[i].lcc_size) + " (" + std::to_string(stats[i].lcc_percent_truncated) + ")";
  });
  out += row("Modularity", [&](std::size_t i) { return partitions[i] ? xml::fixed(partitions[i]->modularity) : ""; });
  out += row("Silhouette", [&](std::size_t i) {
    return partitions[i] ? xml::fixed(partitions[i]->mean_silhouette) : "";
  });
  out += row("Clusters", [&](std::size_t i) { return partitions[i] ? std::to_string(partitions[i]->size()) : ""; });
  return out;
}

int cmd_report(Session& session, const std::string& kind) {
  std::string out;
  std::string file;
  if (kind == "datasets") {
    out = report_datasets(session);
    file = "datasets.csv";
  } else if (kind == "overlap") {
    auto cmp = load_comparison(session);
    if (!cmp) fail(ErrorKind::validation, "no comparison in this session; run `compare` first");
    out = overlap_csv(session.load_store(), session.load_catalog(), *cmp);
    file = "overlap.csv";
  } else if (kind == "networks") {
    out = report_networks(session);
    file = "networks.csv";
  } else {
    fail(ErrorKind::validation, "report kind must be datasets, overlap or networks");
  }
  write_text(session.path("reports", file).string(), out);
  std::cout << out;
  return 0;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return 3;
    case ErrorKind::data:
    case ErrorKind::not_found: return 4;
    case ErrorKind::io: return 5;
  }
  return 1;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"citecascade: cascading citation expansion and co-citation analysis"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  std::string session_dir = "session";
  app.add_option("-s,--session", session_dir, "Session directory (created if absent)")->envname("CITECASCADE_SESSION");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Load records into the session store");
  c_ingest->add_option("file", ingest.path, "Input file")->required();
  c_ingest->add_option("--format", ingest.format, "jsonl or dimensions-csv");
  c_ingest->add_option("--dataset", ingest.dataset, "Also record the loaded ids as a dataset with this name");

  std::string enrich_path;
  auto* c_enrich = app.add_subcommand("enrich", "Attach abstracts from a JSONL file keyed by id or title+year");
  c_enrich->add_option("file", enrich_path, "Enrichment file")->required();

  SearchArgs search;
  auto* c_search = app.add_subcommand("search", "Phrase search over titles and abstracts; saves a dataset");
  c_search->add_option("--name", search.name, "Dataset name")->required();
  c_search->add_option("--kind", search.kind, "phrase-in-title-abstract, phrase-in-fulltext-proxy or id-lookup");
  c_search->add_option("--phrase", search.phrases, "Phrase; repeat to OR-combine")->required();

  ExpandArgs expand;
  auto* c_expand = app.add_subcommand("expand", "Cascading citation expansion; saves a dataset and its trace");
  c_expand->add_option("--name", expand.name, "Dataset name")->required();
  c_expand->add_option("--spec", expand.spec_path, "Expansion spec JSON (flags below override it)");
  c_expand->add_option("--seed", expand.seeds, "Seed id; repeat or comma-separate");
  c_expand->add_option("--stages", expand.stages, "Stages applied left to right, e.g. F:3,B:1");
  c_expand->add_option("--theta-citer", expand.theta_citer, "Minimum citations of a forward candidate (default: session)");
  c_expand->add_option("--theta-ref", expand.theta_ref, "Minimum citations of a backward candidate (default: session)");
  c_expand->add_option("--cap", expand.cap, "Per-generation cap on additions (default: none)");

  NetworkArgs network;
  auto* c_network = app.add_subcommand("network", "Build a document co-citation network from a dataset");
  c_network->add_option("--dataset", network.dataset, "Dataset name")->required();
  c_network->add_option("--name", network.name, "Network name (default: dataset name)");
  c_network->add_option("--lrf", network.lrf, "Link-to-node ratio (default: session, 4)");
  c_network->add_option("--lby", network.lby, "Look-back years or 'inf' (default: session, 10)");
  c_network->add_option("--min-citations", network.min_citations, "Minimum citations of a citer (default: session, 1)");
  c_network->add_option("--top-n", network.top_n, "Most-cited citers kept per slice (default: session, 100)");
  c_network->add_option("--slice-years", network.slice_years, "Slice width in years (default: session, 1)");
  c_network->add_option("--e", network.e_param, "Recorded selection parameter e (default: session, 2.0)");
  c_network->add_flag("--per-slice-pruning", network.per_slice_pruning, "Prune each slice before merging");
  c_network->add_option("--normalization", network.normalization, "none, cosine or dice (default: session, none)");

  std::string cluster_network;
  int levels = 1;
  std::optional<std::size_t> cluster_top_k;
  auto* c_cluster = app.add_subcommand("cluster", "Detect, score and label clusters of a network");
  c_cluster->add_option("--network", cluster_network, "Network name")->required();
  c_cluster->add_option("--levels", levels, "1, or 2 to sub-cluster the top-k clusters");
  c_cluster->add_option("--top-k", cluster_top_k, "Clusters given concept trees and sub-clusters (default: session, 5)");

  CompareArgs compare;
  auto* c_compare = app.add_subcommand("compare", "Overlap matrix and overlay coverage on a base network");
  c_compare->add_option("--datasets", compare.datasets, "Datasets to compare, comma-separated")->required();
  c_compare->add_option("--base", compare.base, "Base dataset/network; created as the union when absent");
  c_compare->add_option("--threshold", compare.threshold, "PARTIAL coverage threshold (default: session, 0.10)");
  c_compare->add_option("--epsilon", compare.epsilon, "FULL coverage tolerance (default: session, 0.05)");

  RenderArgs render;
  bool no_html = false;
  auto* c_render = app.add_subcommand("render", "SVG/HTML map, overlays and year distributions");
  c_render->add_option("--network", render.network, "Network name")->required();
  c_render->add_option("--seed", render.seed, "Layout seed (default: session, 20190101)");
  c_render->add_option("--mode", render.mode, "Overlay mode: auto, blend or multiples");
  c_render->add_flag("--no-html", no_html, "Skip the HTML pages");

  std::string report_kind;
  auto* c_report = app.add_subcommand("report", "Summary tables: datasets, overlap or networks");
  c_report->add_option("--kind", report_kind, "datasets, overlap or networks")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    bool picked = !app.get_subcommands().empty();
    std::cerr << "error: " << (picked ? "validation" : "usage") << ": " << one_line(e.what()) << "\n";
    return picked ? 3 : 2;
  }

  try {
    Session session(session_dir);
    if (c_ingest->parsed()) return cmd_ingest(session, ingest);
    if (c_enrich->parsed()) return cmd_enrich(session, enrich_path);
    if (c_search->parsed()) return cmd_search(session, search);
    if (c_expand->parsed()) return cmd_expand(session, expand);
    if (c_network->parsed()) return cmd_network(session, network);
    if (c_cluster->parsed()) return cmd_cluster(session, cluster_network, levels, cluster_top_k);
    if (c_compare->parsed()) return cmd_compare(session, compare);
    if (c_render->parsed()) {
      render.html = !no_html;
      return cmd_render(session, render);
    }
    if (c_report->parsed()) return cmd_report(session, report_kind);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << "\n";
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: data: " << one_line(e.what()) << "\n";
    return 4;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: io: " << one_line(e.what()) << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 2;
}

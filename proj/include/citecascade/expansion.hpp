#pragma once

// Cascading citation expansion: staged forward (citers) and backward
// (references) generations with citation-count qualification thresholds.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citecascade/citation_source.hpp"
#include "citecascade/csv.hpp"
#include "citecascade/error.hpp"

namespace citecascade {

enum class Direction { forward, backward };

inline char to_char(Direction d) { return d == Direction::forward ? 'F' : 'B'; }

inline Direction parse_direction(const std::string& s) {
  if (s == "F" || s == "f" || s == "FORWARD" || s == "forward") return Direction::forward;
  if (s == "B" || s == "b" || s == "BACKWARD" || s == "backward") return Direction::backward;
  fail(ErrorKind::validation, "unknown expansion direction: " + s);
}

struct Stage {
  Direction direction = Direction::forward;
  int generations = 1;

  bool operator==(const Stage&) const = default;
};

struct ExpansionSpec {
  IdSet seeds;
  std::vector<Stage> stages;
  std::int64_t theta_citer = 0;
  std::int64_t theta_ref = 0;
  std::optional<std::size_t> per_generation_cap;

  void validate() const {
    if (seeds.empty()) fail(ErrorKind::validation, "expansion needs at least one seed");
    if (stages.empty()) fail(ErrorKind::validation, "expansion needs at least one stage");
    for (const auto& s : stages) {
      if (s.generations < 1) fail(ErrorKind::validation, "stage generations must be >= 1");
    }
    if (theta_citer < 0 || theta_ref < 0) fail(ErrorKind::validation, "thresholds must be >= 0");
    if (per_generation_cap && *per_generation_cap == 0) {
      fail(ErrorKind::validation, "per-generation cap must be >= 1");
    }
  }

  std::string describe() const {
    std::ostringstream out;
    out << "seeds=";
    bool first = true;
    for (const auto& s : seeds) {
      out << (first ? "" : ";") << s;
      first = false;
    }
    out << " stages=" << format_stages(stages) << " theta_citer=" << theta_citer
        << " theta_ref=" << theta_ref;
    if (per_generation_cap) out << " cap=" << *per_generation_cap;
    return out.str();
  }

  // "F:3,B:1" -> stages applied left to right.
  static std::vector<Stage> parse_stages(const std::string& text) {
    std::vector<Stage> stages;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos) fail(ErrorKind::validation, "stage must look like F:3, got " + item);
      Stage stage;
      stage.direction = parse_direction(item.substr(0, colon));
      try {
        std::size_t used = 0;
        stage.generations = std::stoi(item.substr(colon + 1), &used);
        if (used != item.size() - colon - 1) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        fail(ErrorKind::validation, "bad generation count in stage " + item);
      }
      stages.push_back(stage);
    }
    if (stages.empty()) fail(ErrorKind::validation, "empty stage list");
    return stages;
  }

  static std::string format_stages(const std::vector<Stage>& stages) {
    std::string out;
    for (std::size_t i = 0; i < stages.size(); ++i) {
      if (i) out += ",";
      out += std::string(1, to_char(stages[i].direction)) + ":" + std::to_string(stages[i].generations);
    }
    return out;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["seeds"] = std::vector<Id>(seeds.begin(), seeds.end());
    j["stages"] = nlohmann::ordered_json::array();
    for (const auto& s : stages) {
      j["stages"].push_back({{"dir", std::string(1, to_char(s.direction))}, {"gens", s.generations}});
    }
    j["theta_citer"] = theta_citer;
    j["theta_ref"] = theta_ref;
    if (per_generation_cap) j["cap"] = *per_generation_cap;
    return j;
  }

  static ExpansionSpec from_json(const nlohmann::json& j) {
    ExpansionSpec spec;
    try {
      for (const auto& s : j.at("seeds")) spec.seeds.insert(s.get<std::string>());
      for (const auto& s : j.at("stages")) {
        spec.stages.push_back({parse_direction(s.at("dir").get<std::string>()), s.at("gens").get<int>()});
      }
      spec.theta_citer = j.value("theta_citer", std::int64_t{0});
      spec.theta_ref = j.value("theta_ref", std::int64_t{0});
      if (j.contains("cap") && !j["cap"].is_null()) spec.per_generation_cap = j["cap"].get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::validation, std::string("malformed expansion spec: ") + e.what());
    }
    spec.validate();
    return spec;
  }
};

enum class TerminalReason { generations_exhausted, empty_frontier, cap_reached };

inline const char* to_string(TerminalReason r) {
  switch (r) {
    case TerminalReason::generations_exhausted: return "generations exhausted";
    case TerminalReason::empty_frontier: return "empty frontier";
    case TerminalReason::cap_reached: return "cap reached";
  }
  return "";
}

struct GenerationRecord {
  int generation = 0;  // 1-based, counted across all stages
  int stage = 0;       // 0-based stage index
  Direction direction = Direction::forward;
  std::vector<Id> frontier_in;
  std::size_t candidates_found = 0;
  std::size_t candidates_qualified = 0;
  std::vector<Id> added_ids;
  std::size_t accumulated_size = 0;
  bool capped = false;
};

struct ExpansionTrace {
  std::vector<GenerationRecord> generations;
  TerminalReason terminal = TerminalReason::generations_exhausted;
  std::vector<std::string> warnings;
};

struct StepResult {
  IdSet found;      // resolvable one-step neighbors not already excluded
  IdSet qualified;  // subset passing the threshold
};

// One hop from `frontier`, excluding ids in `exclude`. Unknown frontier ids
// produce a warning and are skipped.
inline StepResult expansion_step(const CitationSource& source, const IdSet& frontier,
                                 Direction direction, std::int64_t threshold, const IdSet& exclude,
                                 std::vector<std::string>* warnings = nullptr) {
  StepResult out;
  for (const auto& id : frontier) {
    LinkLookup links = direction == Direction::forward ? source.citers(id) : source.references(id);
    if (!links.found) {
      if (warnings) warnings->push_back("unknown id skipped: " + id);
      continue;
    }
    for (const auto& candidate : links.ids) {
      if (exclude.count(candidate) || frontier.count(candidate)) continue;
      out.found.insert(candidate);
    }
  }
  for (const auto& candidate : out.found) {
    if (source.citation_count(candidate).count >= threshold) out.qualified.insert(candidate);
  }
  return out;
}

inline IdSet forward_step(const CitationSource& source, const IdSet& current, std::int64_t theta_citer,
                          std::vector<std::string>* warnings = nullptr) {
  if (current.empty()) fail(ErrorKind::validation, "forward step needs a non-empty set");
  return expansion_step(source, current, Direction::forward, theta_citer, {}, warnings).qualified;
}

inline IdSet backward_step(const CitationSource& source, const IdSet& current, std::int64_t theta_ref,
                           std::vector<std::string>* warnings = nullptr) {
  if (current.empty()) fail(ErrorKind::validation, "backward step needs a non-empty set");
  return expansion_step(source, current, Direction::backward, theta_ref, {}, warnings).qualified;
}

// Highest citation count first, then id ascending.
inline std::vector<Id> truncate_by_citations(const CitationSource& source, const IdSet& candidates,
                                             std::size_t cap) {
  std::vector<std::pair<std::int64_t, Id>> ranked;
  for (const auto& id : candidates) ranked.emplace_back(source.citation_count(id).count, id);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  if (ranked.size() > cap) ranked.resize(cap);
  std::vector<Id> out;
  for (auto& [count, id] : ranked) out.push_back(std::move(id));
  std::sort(out.begin(), out.end());
  return out;
}

struct ExpansionResult {
  Dataset dataset;
  ExpansionTrace trace;
};

// Seeds enter unfiltered. Generation 1 of each stage expands the whole
// accumulated set; each later generation expands only the previous
// generation's additions. A stage stops early when a generation adds nothing.
inline ExpansionResult run_cascade(const CitationSource& source, const ExpansionSpec& spec,
                                   const std::string& name = "expansion") {
  spec.validate();
  std::vector<Id> missing;
  for (const auto& seed : spec.seeds) {
    if (!source.resolvable(seed)) missing.push_back(seed);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ",") + m;
    fail(ErrorKind::not_found, "seed ids not found: " + list);
  }

  ExpansionResult result;
  auto& trace = result.trace;
  IdSet accumulated = spec.seeds;
  int generation = 0;
  for (std::size_t stage_index = 0; stage_index < spec.stages.size(); ++stage_index) {
    const Stage& stage = spec.stages[stage_index];
    std::int64_t threshold = stage.direction == Direction::forward ? spec.theta_citer : spec.theta_ref;
    IdSet frontier = accumulated;
    trace.terminal = TerminalReason::generations_exhausted;
    for (int g = 0; g < stage.generations; ++g) {
      GenerationRecord rec;
      rec.generation = ++generation;
      rec.stage = static_cast<int>(stage_index);
      rec.direction = stage.direction;
      rec.frontier_in.assign(frontier.begin(), frontier.end());

      StepResult step = expansion_step(source, frontier, stage.direction, threshold, accumulated,
                                       &trace.warnings);
      rec.candidates_found = step.found.size();
      rec.candidates_qualified = step.qualified.size();
      if (spec.per_generation_cap && step.qualified.size() > *spec.per_generation_cap) {
        rec.added_ids = truncate_by_citations(source, step.qualified, *spec.per_generation_cap);
        rec.capped = true;
      } else {
        rec.added_ids.assign(step.qualified.begin(), step.qualified.end());
      }
      accumulated.insert(rec.added_ids.begin(), rec.added_ids.end());
      rec.accumulated_size = accumulated.size();
      frontier = IdSet(rec.added_ids.begin(), rec.added_ids.end());
      bool capped = rec.capped;
      trace.generations.push_back(std::move(rec));
      if (frontier.empty()) {
        trace.terminal = TerminalReason::empty_frontier;
        break;
      }
      trace.terminal = capped ? TerminalReason::cap_reached : TerminalReason::generations_exhausted;
    }
  }

  result.dataset.name = name;
  result.dataset.member_ids = std::move(accumulated);
  result.dataset.provenance = {Provenance::Kind::expansion, spec.describe()};
  result.dataset.created_at = timestamp_now();
  return result;
}

// One row per generation; the last row carries the terminal reason.
inline std::string trace_report(const ExpansionTrace& trace) {
  std::string out = "generation,stage,direction,examined,found,qualified,added,accumulated,terminal_reason\n";
  for (std::size_t i = 0; i < trace.generations.size(); ++i) {
    const auto& g = trace.generations[i];
    std::string note;
    if (i + 1 == trace.generations.size()) {
      note = to_string(trace.terminal);
    } else if (g.capped) {
      note = to_string(TerminalReason::cap_reached);
    }
    out += csv::join_row({std::to_string(g.generation), std::to_string(g.stage),
                          std::string(1, to_char(g.direction)), std::to_string(g.frontier_in.size()),
                          std::to_string(g.candidates_found), std::to_string(g.candidates_qualified),
                          std::to_string(g.added_ids.size()), std::to_string(g.accumulated_size), note});
  }
  return out;
}

inline nlohmann::ordered_json trace_to_json(const ExpansionTrace& trace) {
  nlohmann::ordered_json j;
  j["terminal_reason"] = to_string(trace.terminal);
  j["generations"] = nlohmann::ordered_json::array();
  for (const auto& g : trace.generations) {
    j["generations"].push_back({{"generation", g.generation},
                                {"stage", g.stage},
                                {"direction", std::string(1, to_char(g.direction))},
                                {"frontier_in", g.frontier_in},
                                {"candidates_found", g.candidates_found},
                                {"candidates_qualified", g.candidates_qualified},
                                {"added_ids", g.added_ids},
                                {"accumulated_size", g.accumulated_size},
                                {"capped", g.capped}});
  }
  j["warnings"] = trace.warnings;
  return j;
}

}  // namespace citecascade

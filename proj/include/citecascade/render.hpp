#pragma once

// Static SVG/HTML artifacts: network maps (cluster labels, link colors by
// first co-citation year, overlay membership colors) and year-distribution
// charts. Output is a pure function of inputs and RenderSpec.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "citecascade/clustering.hpp"
#include "citecascade/cocitation.hpp"
#include "citecascade/error.hpp"
#include "citecascade/overlay.hpp"
#include "citecascade/record_store.hpp"
#include "citecascade/union_find.hpp"
#include "citecascade/xml.hpp"

namespace citecascade {

struct Rgb {
  int r = 0, g = 0, b = 0;

  bool operator==(const Rgb&) const = default;

  std::string hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
  }

  static Rgb parse(const std::string& s) {
    if (s.size() != 7 || s[0] != '#') fail(ErrorKind::validation, "color must look like #rrggbb: " + s);
    Rgb c;
    try {
      c.r = std::stoi(s.substr(1, 2), nullptr, 16);
      c.g = std::stoi(s.substr(3, 2), nullptr, 16);
      c.b = std::stoi(s.substr(5, 2), nullptr, 16);
    } catch (const std::exception&) {
      fail(ErrorKind::validation, "color must look like #rrggbb: " + s);
    }
    return c;
  }
};

enum class OverlayMode { automatic, blend, small_multiples };

struct RenderSpec {
  std::uint64_t seed = 20190101;
  std::vector<std::string> year_palette = {"#2c7bb6", "#abd9e9", "#ffffbf", "#fdae61", "#d7191c"};
  std::vector<std::string> dataset_palette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  double min_radius = 2.0;
  double max_radius = 12.0;
  std::size_t label_top_k = 10;
  int width = 1000;
  int height = 1000;
  int iterations = 300;
  OverlayMode overlay_mode = OverlayMode::automatic;

  void validate() const {
    if (year_palette.size() < 2) fail(ErrorKind::validation, "year palette needs at least 2 colors");
    if (dataset_palette.size() < 2) fail(ErrorKind::validation, "dataset palette needs at least 2 colors");
    for (const auto& c : year_palette) Rgb::parse(c);
    for (const auto& c : dataset_palette) Rgb::parse(c);
    if (width < 100 || height < 100) fail(ErrorKind::validation, "canvas must be at least 100x100");
    if (!(min_radius > 0) || max_radius < min_radius) fail(ErrorKind::validation, "bad node radius range");
    if (iterations < 0) fail(ErrorKind::validation, "iterations must be >= 0");
  }
};

// Linear interpolation across an ordered palette mapped onto [lo, hi].
inline Rgb scale_color(const std::vector<std::string>& palette, double lo, double hi, double value) {
  double t = hi > lo ? (value - lo) / (hi - lo) : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  double pos = t * static_cast<double>(palette.size() - 1);
  auto i = static_cast<std::size_t>(std::floor(pos));
  if (i >= palette.size() - 1) return Rgb::parse(palette.back());
  double f = pos - static_cast<double>(i);
  Rgb a = Rgb::parse(palette[i]);
  Rgb b = Rgb::parse(palette[i + 1]);
  auto mix = [f](int x, int y) { return static_cast<int>(std::lround(x + (y - x) * f)); };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

struct Point {
  double x = 0, y = 0;

  bool operator==(const Point&) const = default;
};

using Layout = std::map<Id, Point>;

namespace detail {

// Uniform double in [0,1) from the raw 64-bit engine output; the standard
// distributions are implementation-defined.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Fruchterman-Reingold on one component, grid-limited repulsion.
inline std::vector<Point> force_layout(const IndexedGraph& g, const std::vector<std::size_t>& nodes,
                                       std::mt19937_64& rng, int iterations) {
  const std::size_t n = nodes.size();
  std::vector<Point> pos(n);
  if (n == 1) return pos;
  std::unordered_map<std::size_t, std::size_t> local;
  for (std::size_t i = 0; i < n; ++i) local[nodes[i]] = i;
  const double side = std::sqrt(static_cast<double>(n)) * 10.0;
  const double k = side / std::sqrt(static_cast<double>(n));
  for (auto& p : pos) {
    p.x = (unit(rng) - 0.5) * side;
    p.y = (unit(rng) - 0.5) * side;
  }
  double temperature = side / 10.0;
  const double cooling = temperature / (iterations + 1);
  const double cell = 2 * k;
  std::vector<Point> disp(n);
  for (int it = 0; it < iterations; ++it) {
    std::fill(disp.begin(), disp.end(), Point{});
    std::map<std::pair<long, long>, std::vector<std::size_t>> grid;
    for (std::size_t i = 0; i < n; ++i) {
      grid[{static_cast<long>(std::floor(pos[i].x / cell)), static_cast<long>(std::floor(pos[i].y / cell))}]
          .push_back(i);
    }
    for (const auto& [key, members] : grid) {
      for (long dx = -1; dx <= 1; ++dx) {
        for (long dy = -1; dy <= 1; ++dy) {
          auto other = grid.find({key.first + dx, key.second + dy});
          if (other == grid.end()) continue;
          for (auto i : members) {
            for (auto j : other->second) {
              if (i == j) continue;
              double ddx = pos[i].x - pos[j].x;
              double ddy = pos[i].y - pos[j].y;
              double d2 = ddx * ddx + ddy * ddy;
              if (d2 < 1e-9) {
                ddx = (i < j ? -1.0 : 1.0) * 0.01;
                ddy = 0.01;
                d2 = ddx * ddx + ddy * ddy;
              }
              double d = std::sqrt(d2);
              if (d > cell) continue;
              double force = k * k / d;
              disp[i].x += ddx / d * force;
              disp[i].y += ddy / d * force;
            }
          }
        }
      }
    }
    for (std::size_t li = 0; li < n; ++li) {
      for (const auto& [gj, w] : g.adj[nodes[li]]) {
        std::size_t lj = local.at(gj);
        if (lj <= li) continue;
        double ddx = pos[li].x - pos[lj].x;
        double ddy = pos[li].y - pos[lj].y;
        double d = std::sqrt(ddx * ddx + ddy * ddy);
        if (d < 1e-9) continue;
        double force = d * d / k;
        disp[li].x -= ddx / d * force;
        disp[li].y -= ddy / d * force;
        disp[lj].x += ddx / d * force;
        disp[lj].y += ddy / d * force;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double d = std::sqrt(disp[i].x * disp[i].x + disp[i].y * disp[i].y);
      if (d > 0) {
        double step = std::min(d, temperature);
        pos[i].x += disp[i].x / d * step;
        pos[i].y += disp[i].y / d * step;
      }
    }
    temperature = std::max(temperature - cooling, 0.0);
  }
  return pos;
}

}  // namespace detail

// Each connected component is laid out independently and centered; the
// components are then packed left to right in rows with a gap, largest
// first, so their bounding boxes never overlap.
inline Layout layout(const CoCitationNetwork& net, std::uint64_t seed, int iterations = 300) {
  Layout out;
  if (net.empty()) return out;
  auto g = IndexedGraph::from(net);
  UnionFind uf(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    for (const auto& [u, w] : g.adj[v]) uf.unite(v, u);
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t v = 0; v < g.size(); ++v) groups[uf.find(v)].push_back(v);
  std::vector<std::vector<std::size_t>> components;
  for (auto& [root, members] : groups) components.push_back(std::move(members));
  std::stable_sort(components.begin(), components.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });

  std::mt19937_64 rng(seed);
  struct Placed {
    std::vector<Point> pos;
    double w, h, min_x, min_y;
  };
  std::vector<Placed> placed;
  double total_area = 0;
  for (const auto& comp : components) {
    auto pos = detail::force_layout(g, comp, rng, iterations);
    double min_x = pos[0].x, max_x = pos[0].x, min_y = pos[0].y, max_y = pos[0].y;
    for (const auto& p : pos) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
    placed.push_back({std::move(pos), max_x - min_x, max_y - min_y, min_x, min_y});
    total_area += (max_x - min_x + 10) * (max_y - min_y + 10);
  }
  if (components.size() == 1 && components[0].size() == 1) {
    out[g.ids[components[0][0]]] = {0, 0};
    return out;
  }
  const double gap = 10.0;
  const double row_width = std::max(std::sqrt(total_area) * 1.2, placed[0].w);
  double cursor_x = 0, cursor_y = 0, row_height = 0;
  for (std::size_t c = 0; c < placed.size(); ++c) {
    auto& p = placed[c];
    if (cursor_x > 0 && cursor_x + p.w > row_width) {
      cursor_x = 0;
      cursor_y += row_height + gap;
      row_height = 0;
    }
    for (std::size_t i = 0; i < components[c].size(); ++i) {
      out[g.ids[components[c][i]]] = {p.pos[i].x - p.min_x + cursor_x, p.pos[i].y - p.min_y + cursor_y};
    }
    cursor_x += p.w + gap;
    row_height = std::max(row_height, p.h);
  }
  return out;
}

namespace detail {

struct Viewport {
  double min_x = 0, min_y = 0, scale = 1, margin = 40;

  static Viewport fit(const Layout& layout, int width, int height) {
    Viewport v;
    if (layout.empty()) return v;
    double max_x = -1e300, max_y = -1e300;
    v.min_x = 1e300;
    v.min_y = 1e300;
    for (const auto& [id, p] : layout) {
      v.min_x = std::min(v.min_x, p.x);
      v.min_y = std::min(v.min_y, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
    double span = std::max({max_x - v.min_x, max_y - v.min_y, 1e-9});
    v.scale = std::min(width, height) - 2 * v.margin;
    v.scale /= span;
    return v;
  }

  Point map(const Point& p) const { return {margin + (p.x - min_x) * scale, margin + (p.y - min_y) * scale}; }
};

inline Rgb blend(const std::vector<Rgb>& colors) {
  if (colors.empty()) return {200, 200, 200};
  long r = 0, g = 0, b = 0;
  for (const auto& c : colors) {
    r += c.r;
    g += c.g;
    b += c.b;
  }
  auto n = static_cast<long>(colors.size());
  return {static_cast<int>((r + n / 2) / n), static_cast<int>((g + n / 2) / n), static_cast<int>((b + n / 2) / n)};
}

inline std::string svg_open(int width, int height, const std::string& title) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<title>" << xml::escape(title) << "</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
  return out.str();
}

}  // namespace detail

// One map. With a projection, nodes are colored by dataset membership:
// `panel` selects one dataset (small-multiple panel), otherwise member
// colors are blended. Non-members are grey.
inline std::string render_map(const CoCitationNetwork& net, const ClusterPartition* partition,
                              const OverlayProjection* projection, const RenderSpec& spec, const Layout& positions,
                              std::optional<std::size_t> panel = std::nullopt, const std::string& title = "network") {
  spec.validate();
  if (projection && panel && *panel >= projection->dataset_names.size()) {
    fail(ErrorKind::validation, "overlay panel out of range");
  }
  for (const auto& [id, info] : net.nodes) {
    if (!positions.count(id)) fail(ErrorKind::validation, "layout is missing node " + id);
  }
  auto view = detail::Viewport::fit(positions, spec.width, spec.height);
  std::ostringstream out;
  out << detail::svg_open(spec.width, spec.height, title);

  int lo_year = 0, hi_year = 0;
  bool first = true;
  for (const auto& [key, e] : net.edges) {
    if (first || e.first_cocited_year < lo_year) lo_year = e.first_cocited_year;
    if (first || e.first_cocited_year > hi_year) hi_year = e.first_cocited_year;
    first = false;
  }
  out << "<g class=\"edges\" stroke-opacity=\"0.6\">\n";
  for (const auto& [key, e] : net.edges) {
    Point a = view.map(positions.at(key.first));
    Point b = view.map(positions.at(key.second));
    Rgb color = scale_color(spec.year_palette, lo_year, hi_year, e.first_cocited_year);
    out << "<line class=\"edge\" x1=\"" << xml::fixed(a.x) << "\" y1=\"" << xml::fixed(a.y) << "\" x2=\""
        << xml::fixed(b.x) << "\" y2=\"" << xml::fixed(b.y) << "\" stroke=\"" << color.hex()
        << "\" stroke-width=\"" << xml::fixed(std::min(1.0 + std::log1p(e.weight), 6.0)) << "\" data-year=\""
        << e.first_cocited_year << "\"/>\n";
  }
  out << "</g>\n<g class=\"nodes\">\n";
  std::size_t max_citations = 1;
  for (const auto& [id, info] : net.nodes) max_citations = std::max(max_citations, info.citations);
  for (const auto& [id, info] : net.nodes) {
    Point p = view.map(positions.at(id));
    double r = spec.min_radius + (spec.max_radius - spec.min_radius) *
                                     std::sqrt(static_cast<double>(info.citations) / static_cast<double>(max_citations));
    Rgb fill{120, 120, 120};
    std::string membership;
    if (projection) {
      const auto& bits = projection->membership.at(id);
      membership = projection->bits(id);
      if (panel) {
        fill = bits[*panel] ? Rgb::parse(spec.dataset_palette[*panel % spec.dataset_palette.size()])
                            : Rgb{220, 220, 220};
      } else {
        std::vector<Rgb> colors;
        for (std::size_t i = 0; i < bits.size(); ++i) {
          if (bits[i]) colors.push_back(Rgb::parse(spec.dataset_palette[i % spec.dataset_palette.size()]));
        }
        fill = detail::blend(colors);
      }
    }
    out << "<circle class=\"node\" cx=\"" << xml::fixed(p.x) << "\" cy=\"" << xml::fixed(p.y) << "\" r=\""
        << xml::fixed(r) << "\" fill=\"" << fill.hex() << "\"";
    if (!membership.empty()) out << " data-datasets=\"" << membership << "\"";
    out << "><title>" << xml::escape(id);
    if (info.year) out << " (" << *info.year << ")";
    if (partition && partition->assignment.count(id)) out << " #" << partition->assignment.at(id);
    out << "</title></circle>\n";
  }
  out << "</g>\n";
  if (partition) {
    out << "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#000000\">\n";
    for (std::size_t c = 0; c < partition->clusters.size() && c < spec.label_top_k; ++c) {
      Point centroid;
      for (const auto& id : partition->clusters[c]) {
        Point p = view.map(positions.at(id));
        centroid.x += p.x;
        centroid.y += p.y;
      }
      auto n = static_cast<double>(partition->clusters[c].size());
      centroid.x /= n;
      centroid.y /= n;
      std::string label = "#" + std::to_string(c);
      if (c < partition->labels.size() && !partition->labels[c].empty()) label += " " + partition->labels[c];
      out << "<text class=\"cluster-label\" x=\"" << xml::fixed(centroid.x) << "\" y=\"" << xml::fixed(centroid.y)
          << "\" text-anchor=\"middle\">" << xml::escape(label) << "</text>\n";
    }
    out << "</g>\n";
  }
  if (!net.edges.empty()) {
    out << "<g class=\"year-legend\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<text x=\"10\" y=\"" << spec.height - 10 << "\" fill=\"" << Rgb::parse(spec.year_palette.front()).hex()
        << "\">" << lo_year << "</text>\n"
        << "<text x=\"60\" y=\"" << spec.height - 10 << "\" fill=\"" << Rgb::parse(spec.year_palette.back()).hex()
        << "\">" << hi_year << "</text>\n</g>\n";
  }
  if (projection && !panel) {
    out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t i = 0; i < projection->dataset_names.size(); ++i) {
      out << "<text class=\"legend-entry\" x=\"10\" y=\"" << 20 + 16 * i << "\" fill=\""
          << Rgb::parse(spec.dataset_palette[i % spec.dataset_palette.size()]).hex() << "\">"
          << xml::escape(projection->dataset_names[i]) << "</text>\n";
    }
    out << "</g>\n";
  } else if (projection && panel) {
    out << "<text class=\"panel-title\" x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" fill=\""
        << Rgb::parse(spec.dataset_palette[*panel % spec.dataset_palette.size()]).hex() << "\">"
        << xml::escape(projection->dataset_names[*panel]) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

struct RenderedDocument {
  std::string name;  // file stem, e.g. "combined.map" or "comparison.overlay-F"
  std::string svg;
};

// Overlay rendering: small multiples (one document per dataset, shared
// layout) for three or more datasets unless blend mode is forced.
inline std::vector<RenderedDocument> render_overlay(const CoCitationNetwork& net, const ClusterPartition* partition,
                                                    const OverlayProjection& projection, const RenderSpec& spec,
                                                    const Layout& positions, const std::string& stem) {
  bool multiples = spec.overlay_mode == OverlayMode::small_multiples ||
                   (spec.overlay_mode == OverlayMode::automatic && projection.dataset_names.size() >= 3);
  std::vector<RenderedDocument> docs;
  if (!multiples) {
    docs.push_back({stem + ".overlay", render_map(net, partition, &projection, spec, positions, std::nullopt, stem)});
    return docs;
  }
  for (std::size_t i = 0; i < projection.dataset_names.size(); ++i) {
    const auto& name = projection.dataset_names[i];
    docs.push_back({stem + ".overlay-" + name,
                    render_map(net, partition, &projection, spec, positions, i, stem + " / " + name)});
  }
  return docs;
}

// Year-distribution line chart; log mode plots ln(1 + count). Years inside
// the shared range with no articles plot as 0.
inline std::string render_distribution(const std::vector<YearDistribution>& series, bool log_scale,
                                       const RenderSpec& spec = {}) {
  spec.validate();
  if (series.empty()) fail(ErrorKind::validation, "nothing to plot");
  int lo = 0, hi = 0;
  bool any = false;
  double max_value = 0;
  for (const auto& s : series) {
    if (!s.range) continue;
    lo = any ? std::min(lo, s.range->first) : s.range->first;
    hi = any ? std::max(hi, s.range->second) : s.range->second;
    any = true;
    for (const auto& [year, n] : s.counts) {
      max_value = std::max(max_value, log_scale ? std::log1p(static_cast<double>(n)) : static_cast<double>(n));
    }
  }
  const double left = 60, right = spec.width - 20.0, top = 30, bottom = spec.height - 50.0;
  auto x_of = [&](int year) {
    return hi > lo ? left + (right - left) * (year - lo) / static_cast<double>(hi - lo) : (left + right) / 2;
  };
  auto y_of = [&](double v) { return max_value > 0 ? bottom - (bottom - top) * v / max_value : bottom; };

  std::ostringstream out;
  out << detail::svg_open(spec.width, spec.height,
                          log_scale ? "articles per year (ln(1+count))" : "articles per year");
  out << "<g class=\"axes\" stroke=\"#000000\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\"" << bottom << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom << "\"/>\n"
      << "</g>\n";
  if (any) {
    out << "<g class=\"axis-labels\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<text class=\"axis-min\" x=\"" << left << "\" y=\"" << bottom + 20 << "\" text-anchor=\"middle\">" << lo
        << "</text>\n"
        << "<text class=\"axis-max\" x=\"" << right << "\" y=\"" << bottom + 20 << "\" text-anchor=\"middle\">" << hi
        << "</text>\n"
        << "<text x=\"" << (left + right) / 2 << "\" y=\"" << bottom + 40 << "\" text-anchor=\"middle\">year</text>\n"
        << "<text x=\"15\" y=\"" << (top + bottom) / 2 << "\" transform=\"rotate(-90 15 " << (top + bottom) / 2
        << ")\" text-anchor=\"middle\">" << (log_scale ? "ln(1+articles)" : "articles") << "</text>\n"
        << "</g>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    std::string color = Rgb::parse(spec.dataset_palette[i % spec.dataset_palette.size()]).hex();
    out << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    std::vector<Point> points;
    if (s.range) {
      for (int year = s.range->first; year <= s.range->second; ++year) {
        auto it = s.counts.find(year);
        double n = it == s.counts.end() ? 0.0 : static_cast<double>(it->second);
        points.push_back({x_of(year), y_of(log_scale ? std::log1p(n) : n)});
      }
    }
    for (std::size_t p = 0; p < points.size(); ++p) {
      out << (p ? " " : "") << xml::fixed(points[p].x) << "," << xml::fixed(points[p].y);
    }
    out << "\"><title>" << xml::escape(s.dataset_name) << "</title></polyline>\n";
    if (points.size() == 1) {
      out << "<circle class=\"point\" cx=\"" << xml::fixed(points[0].x) << "\" cy=\"" << xml::fixed(points[0].y)
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
  }
  out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << "<text class=\"legend-entry\" x=\"" << right - 100 << "\" y=\"" << top + 16 * i << "\" fill=\""
        << Rgb::parse(spec.dataset_palette[i % spec.dataset_palette.size()]).hex() << "\">"
        << xml::escape(series[i].dataset_name) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

// Self-contained HTML page embedding one or more SVG documents; hover text
// comes from the SVG title elements.
inline std::string to_html(const std::string& title, const std::vector<std::string>& svgs) {
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\"/>\n<title>" << xml::escape(title)
      << "</title>\n<style>body{font-family:sans-serif;margin:16px} figure{display:inline-block;margin:8px}"
         " svg{border:1px solid #ccc}</style>\n</head>\n<body>\n<h1>"
      << xml::escape(title) << "</h1>\n";
  for (const auto& svg : svgs) {
    auto start = svg.find("<svg");
    out << "<figure>\n" << (start == std::string::npos ? svg : svg.substr(start)) << "</figure>\n";
  }
  out << "</body>\n</html>\n";
  return out.str();
}

}  // namespace citecascade

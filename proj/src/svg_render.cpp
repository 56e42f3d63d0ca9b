#include "layoutlab/svg_render.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "layoutlab/vocab.hpp"

namespace layoutlab {

namespace {

// Muted fills that keep black labels readable.
const std::map<std::string, std::string>& fill_palette() {
  static const std::map<std::string, std::string> palette = {
      {"red", "#e07a6a"},    {"green", "#7cbf7c"},  {"blue", "#6f9fd8"},
      {"yellow", "#e3cf6d"}, {"orange", "#e8a95e"}, {"purple", "#a88bd4"},
      {"black", "#8a8a8a"},  {"white", "#f2f2f2"},  {"gray", "#c0c0c0"},
      {"brown", "#bd9272"},
  };
  return palette;
}

std::string px(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s(buf);
  // "-0.00" and "0.00" must render identically.
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const SceneGraph& g, const SvgOptions& opts) {
  // Scene extent in the xy plane; an empty graph still gets a frame.
  double min_x = -1.0, max_x = 1.0, min_y = -1.0, max_y = 1.0;
  bool first = true;
  for (const auto& [id, n] : g.nodes) {
    const Aabb box = world_aabb(n);
    if (first) {
      min_x = box.min.x;
      max_x = box.max.x;
      min_y = box.min.y;
      max_y = box.max.y;
      first = false;
    } else {
      min_x = std::min(min_x, box.min.x);
      max_x = std::max(max_x, box.max.x);
      min_y = std::min(min_y, box.min.y);
      max_y = std::max(max_y, box.max.y);
    }
  }
  min_x -= opts.margin;
  max_x += opts.margin;
  min_y -= opts.margin;
  max_y += opts.margin;

  const double width = (max_x - min_x) * opts.scale;
  const double height = (max_y - min_y) * opts.scale;
  const auto to_px_x = [&](double x) { return (x - min_x) * opts.scale; };
  const auto to_px_y = [&](double y) { return (max_y - y) * opts.scale; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width)
     << "\" height=\"" << px(height) << "\" viewBox=\"0 0 " << px(width)
     << " " << px(height) << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << px(width) << "\" height=\""
     << px(height) << "\" fill=\"#fbfbf8\"/>\n";

  // Containers first so objects draw on top of them.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& [id, n] : g.nodes) {
      const bool container = n.node_type == NodeType::kContainer;
      if (container != (pass == 0)) continue;
      const Aabb box = world_aabb(n);
      const double x = to_px_x(box.min.x);
      const double y = to_px_y(box.max.y);
      const double w = (box.max.x - box.min.x) * opts.scale;
      const double h = (box.max.y - box.min.y) * opts.scale;
      if (container) {
        os << "<rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\""
           << px(w) << "\" height=\"" << px(h)
           << "\" fill=\"none\" stroke=\"#777777\" stroke-width=\"1.5\""
              " stroke-dasharray=\"6,4\"/>\n";
      } else {
        std::string fill = "#b8c7dd";
        if (n.caption) {
          const std::string color = split_caption(*n.caption).color;
          const auto it = fill_palette().find(color);
          if (it != fill_palette().end()) fill = it->second;
        }
        os << "<rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\""
           << px(w) << "\" height=\"" << px(h) << "\" fill=\"" << fill
           << "\" fill-opacity=\"0.85\" stroke=\"#333333\""
              " stroke-width=\"1\"/>\n";
      }
      if (opts.labels) {
        const std::string label =
            n.caption ? *n.caption : "#" + std::to_string(id);
        os << "<text x=\"" << px(to_px_x(n.center_location.x)) << "\" y=\""
           << px(to_px_y(n.center_location.y))
           << "\" font-family=\"sans-serif\" font-size=\"11\""
              " text-anchor=\"middle\" dominant-baseline=\"middle\""
              " fill=\"#222222\">"
           << escape_xml(label) << "</text>\n";
      }
    }
  }

  // Axis marker (origin cross) when the origin is inside the frame.
  if (min_x < 0.0 && max_x > 0.0 && min_y < 0.0 && max_y > 0.0) {
    os << "<line x1=\"" << px(to_px_x(0.0)) << "\" y1=\"" << px(to_px_y(min_y))
       << "\" x2=\"" << px(to_px_x(0.0)) << "\" y2=\"" << px(to_px_y(max_y))
       << "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";
    os << "<line x1=\"" << px(to_px_x(min_x)) << "\" y1=\"" << px(to_px_y(0.0))
       << "\" x2=\"" << px(to_px_x(max_x)) << "\" y2=\"" << px(to_px_y(0.0))
       << "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";
  }

  // One-meter scale bar, bottom left.
  const double bar_y = height - 12.0;
  os << "<line x1=\"10\" y1=\"" << px(bar_y) << "\" x2=\""
     << px(10.0 + opts.scale) << "\" y2=\"" << px(bar_y)
     << "\" stroke=\"#222222\" stroke-width=\"2\"/>\n";
  os << "<text x=\"" << px(10.0 + opts.scale / 2.0) << "\" y=\""
     << px(bar_y - 5.0)
     << "\" font-family=\"sans-serif\" font-size=\"10\""
        " text-anchor=\"middle\" fill=\"#222222\">1 m</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace layoutlab

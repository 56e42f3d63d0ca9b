#pragma once

#include <string>

#include "layoutlab/scene_graph.hpp"

namespace layoutlab {

struct SvgOptions {
  double scale = 200.0;   // pixels per meter
  double margin = 0.25;   // meters of padding around the scene
  bool labels = true;     // draw caption text
};

/// Top-down (x right, y up) vector rendering of a graph: object footprints
/// filled with the color named in their caption, containers as dashed
/// outlines, plus axes and a scale bar. Byte-identical for equal inputs.
std::string render_svg(const SceneGraph& g, const SvgOptions& opts = {});

}  // namespace layoutlab

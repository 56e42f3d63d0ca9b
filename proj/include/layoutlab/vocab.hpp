#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "layoutlab/rng.hpp"
#include "layoutlab/scene_graph.hpp"

namespace layoutlab {

enum class Shape { kCuboid, kCylinder, kSphere, kCone, kWedge };

std::string_view shape_name(Shape s);
std::optional<Shape> shape_from_name(std::string_view name);

/// One nameable object kind with plausible metric dimension ranges
/// (length, width, height). Cylinders/cones keep length == width
/// (diameter); spheres keep all three equal.
struct Category {
  std::string_view name;
  Shape shape;
  double len_min, len_max;
  double wid_min, wid_max;
  double hgt_min, hgt_max;
};

/// Small things that live on a table (sorting / alignment tasks).
const std::vector<Category>& tabletop_categories();

/// Floor-standing furniture (room-editing task).
const std::vector<Category>& furniture_categories();

const std::vector<std::string_view>& color_names();

const Category* find_category(std::string_view name);
bool is_color(std::string_view word);

/// Draw a dimension vector for `cat` on a 0.1 mm grid (so downstream sums
/// stay on the serializer's 1e-6 grid), respecting the shape's equality
/// constraints.
Vec3 sample_dimensions(const Category& cat, Pcg32& rng);

/// Uniform draw from {lo, lo+step, ..., hi}, canonically rounded.
double sample_on_grid(Pcg32& rng, double lo, double hi, double step);

/// Caption "{color} {category}[ {index}]" → its parts. The index suffix
/// (when duplicates forced one) and surrounding whitespace are dropped.
struct CaptionParts {
  std::string color;     // empty when the caption has no color word
  std::string category;  // remaining words
};
CaptionParts split_caption(std::string_view caption);

/// Category table entry for a node, resolved from its caption.
const Category* category_of(const Node& n);

}  // namespace layoutlab

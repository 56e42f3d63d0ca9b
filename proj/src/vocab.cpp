#include "layoutlab/vocab.hpp"

#include <cctype>
#include <cmath>

#include "layoutlab/text.hpp"

namespace layoutlab {

namespace {

// Dimension bounds are in meters and deliberately sit on a 1 mm grid;
// sampling then snaps to 0.1 mm so every derived coordinate stays exactly
// representable with 6 decimals.
const std::vector<Category> kTabletop = {
    {"book", Shape::kCuboid, 0.120, 0.250, 0.090, 0.180, 0.020, 0.060},
    {"box", Shape::kCuboid, 0.100, 0.300, 0.080, 0.250, 0.060, 0.200},
    {"brick", Shape::kCuboid, 0.190, 0.230, 0.090, 0.110, 0.050, 0.080},
    {"carton", Shape::kCuboid, 0.070, 0.100, 0.070, 0.100, 0.150, 0.250},
    {"eraser", Shape::kCuboid, 0.040, 0.060, 0.020, 0.030, 0.010, 0.020},
    {"tissue box", Shape::kCuboid, 0.220, 0.260, 0.110, 0.130, 0.080, 0.100},
    {"mug", Shape::kCylinder, 0.070, 0.100, 0.070, 0.100, 0.080, 0.120},
    {"can", Shape::kCylinder, 0.060, 0.070, 0.060, 0.070, 0.100, 0.170},
    {"bottle", Shape::kCylinder, 0.060, 0.090, 0.060, 0.090, 0.180, 0.300},
    {"jar", Shape::kCylinder, 0.080, 0.120, 0.080, 0.120, 0.100, 0.180},
    {"cup", Shape::kCylinder, 0.060, 0.090, 0.060, 0.090, 0.070, 0.110},
    {"candle", Shape::kCylinder, 0.050, 0.080, 0.050, 0.080, 0.100, 0.200},
    {"vase", Shape::kCylinder, 0.080, 0.140, 0.080, 0.140, 0.200, 0.350},
    {"ball", Shape::kSphere, 0.050, 0.200, 0.050, 0.200, 0.050, 0.200},
    {"apple", Shape::kSphere, 0.060, 0.090, 0.060, 0.090, 0.060, 0.090},
    {"globe", Shape::kSphere, 0.150, 0.300, 0.150, 0.300, 0.150, 0.300},
    {"cone", Shape::kCone, 0.060, 0.120, 0.060, 0.120, 0.080, 0.180},
    {"funnel", Shape::kCone, 0.080, 0.140, 0.080, 0.140, 0.060, 0.120},
    {"wedge", Shape::kWedge, 0.080, 0.150, 0.050, 0.100, 0.040, 0.080},
    {"ramp", Shape::kWedge, 0.150, 0.300, 0.080, 0.150, 0.050, 0.120},
};

const std::vector<Category> kFurniture = {
    {"bed", Shape::kCuboid, 1.400, 2.000, 1.900, 2.100, 0.500, 0.700},
    {"wardrobe", Shape::kCuboid, 0.800, 1.200, 0.500, 0.700, 1.800, 2.200},
    {"desk", Shape::kCuboid, 1.000, 1.600, 0.500, 0.800, 0.720, 0.780},
    {"chair", Shape::kCuboid, 0.400, 0.550, 0.400, 0.550, 0.800, 1.000},
    {"sofa", Shape::kCuboid, 1.600, 2.200, 0.800, 1.000, 0.700, 0.900},
    {"bookshelf", Shape::kCuboid, 0.600, 1.000, 0.250, 0.400, 1.600, 2.000},
    {"nightstand", Shape::kCuboid, 0.400, 0.600, 0.350, 0.500, 0.450, 0.600},
    {"dresser", Shape::kCuboid, 0.900, 1.300, 0.400, 0.550, 0.750, 0.950},
    {"armchair", Shape::kCuboid, 0.700, 0.900, 0.700, 0.900, 0.750, 0.950},
    {"coffee table", Shape::kCuboid, 0.800, 1.200, 0.500, 0.700, 0.400, 0.500},
    {"floor lamp", Shape::kCylinder, 0.250, 0.350, 0.250, 0.350, 1.400, 1.700},
    {"potted plant", Shape::kCylinder, 0.300, 0.500, 0.300, 0.500, 0.800, 1.400},
};

const std::vector<std::string_view> kColors = {
    "red",   "green", "blue",  "yellow", "orange",
    "purple", "black", "white", "gray",   "brown",
};

bool is_integer_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::string_view shape_name(Shape s) {
  switch (s) {
    case Shape::kCuboid: return "cuboid";
    case Shape::kCylinder: return "cylinder";
    case Shape::kSphere: return "sphere";
    case Shape::kCone: return "cone";
    case Shape::kWedge: return "wedge";
  }
  return "cuboid";
}

std::optional<Shape> shape_from_name(std::string_view name) {
  if (name == "cuboid") return Shape::kCuboid;
  if (name == "cylinder") return Shape::kCylinder;
  if (name == "sphere") return Shape::kSphere;
  if (name == "cone") return Shape::kCone;
  if (name == "wedge") return Shape::kWedge;
  return std::nullopt;
}

const std::vector<Category>& tabletop_categories() { return kTabletop; }

const std::vector<Category>& furniture_categories() { return kFurniture; }

const std::vector<std::string_view>& color_names() { return kColors; }

const Category* find_category(std::string_view name) {
  for (const Category& c : kTabletop) {
    if (c.name == name) return &c;
  }
  for (const Category& c : kFurniture) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool is_color(std::string_view word) {
  for (std::string_view c : kColors) {
    if (c == word) return true;
  }
  return false;
}

double sample_on_grid(Pcg32& rng, double lo, double hi, double step) {
  const auto buckets =
      static_cast<std::uint32_t>(std::llround((hi - lo) / step));
  const std::uint32_t k = rng.next_below(buckets + 1);
  return canonical_round(lo + static_cast<double>(k) * step);
}

Vec3 sample_dimensions(const Category& cat, Pcg32& rng) {
  constexpr double kStep = 1e-4;
  Vec3 d;
  d.x = sample_on_grid(rng, cat.len_min, cat.len_max, kStep);
  switch (cat.shape) {
    case Shape::kSphere:
      d.y = d.x;
      d.z = d.x;
      break;
    case Shape::kCylinder:
    case Shape::kCone:
      d.y = d.x;  // circular footprint
      d.z = sample_on_grid(rng, cat.hgt_min, cat.hgt_max, kStep);
      break;
    default:
      d.y = sample_on_grid(rng, cat.wid_min, cat.wid_max, kStep);
      d.z = sample_on_grid(rng, cat.hgt_min, cat.hgt_max, kStep);
      break;
  }
  return d;
}

CaptionParts split_caption(std::string_view caption) {
  const std::string norm = normalize_caption(caption);
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < norm.size()) {
    const std::size_t next = norm.find(' ', pos);
    if (next == std::string::npos) {
      words.push_back(norm.substr(pos));
      break;
    }
    words.push_back(norm.substr(pos, next - pos));
    pos = next + 1;
  }
  CaptionParts parts;
  std::size_t begin = 0;
  std::size_t end = words.size();
  if (end > begin && is_integer_token(words[end - 1])) --end;
  if (end > begin && is_color(words[begin])) {
    parts.color = words[begin];
    ++begin;
  }
  for (std::size_t i = begin; i < end; ++i) {
    if (!parts.category.empty()) parts.category += ' ';
    parts.category += words[i];
  }
  return parts;
}

const Category* category_of(const Node& n) {
  if (!n.caption) return nullptr;
  return find_category(split_caption(*n.caption).category);
}

}  // namespace layoutlab

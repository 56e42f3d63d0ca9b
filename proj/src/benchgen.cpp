#include "layoutlab/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "layoutlab/errors.hpp"
#include "layoutlab/rng.hpp"
#include "layoutlab/solvers.hpp"
#include "layoutlab/text.hpp"
#include "layoutlab/vocab.hpp"

namespace layoutlab {

namespace {

using nlohmann::json;

// Per-task salts keep the three generators on unrelated streams even for
// the same (seed, index).
constexpr std::uint64_t kSortingSalt = 0x736f7274696e67ULL;
constexpr std::uint64_t kAlignmentSalt = 0x616c69676eULL;
constexpr std::uint64_t kRoomeditSalt = 0x726f6f6d6564ULL;

std::string instance_id(TaskKind task, std::uint64_t seed,
                        std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06llu",
                static_cast<unsigned long long>(index));
  return std::string(task_name(task)) + "-" + std::to_string(seed) + "-" +
         buf;
}

template <typename T>
void shuffle(std::vector<T>& v, Pcg32& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.next_below(static_cast<std::uint32_t>(i));
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Pcg32& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  shuffle(idx, rng);
  return idx;
}

double round2(double v) {
  return canonical_round(std::round(v * 100.0) / 100.0);
}

double planar_dist(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Footprints closer than `clearance` on both axes count as touching.
bool footprints_clear(const Vec3& ca, const Vec3& da, const Vec3& cb,
                      const Vec3& db, double clearance) {
  return std::fabs(ca.x - cb.x) >= (da.x + db.x) / 2.0 + clearance ||
         std::fabs(ca.y - cb.y) >= (da.y + db.y) / 2.0 + clearance;
}

/// Caption text for each (color, category) draw; pairs that occur more
/// than once get a 1-based index suffix so captions stay unique.
std::vector<std::string> unique_captions(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::map<std::string, int> totals;
  for (const auto& [color, category] : pairs) {
    ++totals[color + " " + category];
  }
  std::map<std::string, int> counters;
  std::vector<std::string> captions;
  captions.reserve(pairs.size());
  for (const auto& [color, category] : pairs) {
    std::string base = color + " " + category;
    if (totals[base] > 1) {
      base += " " + std::to_string(++counters[base]);
    }
    captions.push_back(base);
  }
  return captions;
}

Node make_node(std::int64_t id, NodeType type, const Vec3& center,
               const Vec3& dim, const Vec3& rot, std::string caption) {
  Node n;
  n.id = id;
  n.node_type = type;
  n.center_location = center;
  n.dimension = dim;
  n.rotation = rot;
  n.caption = std::move(caption);
  return n;
}

std::string_view axis_name(Axis a) { return a == Axis::kX ? "x" : "y"; }

std::string join_quoted(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? ", then " : ", ";
    out += items[i];
  }
  return out;
}

std::string sorting_instruction(const SortSpec& spec) {
  std::ostringstream os;
  os << "Sort the objects on the table into groups by "
     << group_key_name(spec.group_key)
     << " and line everything up along the " << axis_name(spec.axis)
     << " axis, groups in this order: " << join_quoted(spec.group_order)
     << ". Within each group, order the objects by "
     << sort_key_name(spec.sort_key) << " in " << sort_order_name(spec.sort_order)
     << " order. Leave " << format_number(spec.object_gap)
     << " m between objects of the same group and "
     << format_number(spec.group_gap)
     << " m between adjacent groups, so the whole line spans "
     << format_number(spec.total_span)
     << " m centered on the table, with every object resting on the "
        "tabletop.";
  return os.str();
}

std::string alignment_instruction(int rows, int cols) {
  std::ostringstream os;
  os << "The objects on the table belong to a " << rows << " by " << cols
     << " grid with one kind of object per row, but some of them have "
        "been knocked out of place. Move only the out-of-place objects "
        "back onto free grid positions in the row holding their kind, and "
        "turn each one back to its row's original orientation. Do not "
        "touch any object that is already on the grid.";
  return os.str();
}

std::string roomedit_instruction(const Node& new_node,
                                 const std::vector<std::string>& ref_caps,
                                 const std::vector<double>& dists) {
  std::ostringstream os;
  os << "Add a " << new_node.caption.value_or("object") << " measuring "
     << format_number(new_node.dimension.x) << " m by "
     << format_number(new_node.dimension.y) << " m by "
     << format_number(new_node.dimension.z)
     << " m to the room, standing on the floor. Place it "
     << format_number(dists[0]) << " m from the " << ref_caps[0];
  for (std::size_t i = 1; i < dists.size(); ++i) {
    os << (i + 1 == dists.size() ? " and " : ", ") << format_number(dists[i])
       << " m from the " << ref_caps[i];
  }
  os << ", measured center to center on the floor plan.";
  return os.str();
}

}  // namespace

std::string_view task_name(TaskKind t) {
  switch (t) {
    case TaskKind::kSorting: return "sorting";
    case TaskKind::kAlignment: return "alignment";
    default: return "roomedit";
  }
}

std::optional<TaskKind> task_from_name(std::string_view name) {
  if (name == "sorting") return TaskKind::kSorting;
  if (name == "alignment") return TaskKind::kAlignment;
  if (name == "roomedit") return TaskKind::kRoomedit;
  return std::nullopt;
}

std::string_view group_key_name(GroupKey k) {
  switch (k) {
    case GroupKey::kShape: return "shape";
    case GroupKey::kColor: return "color";
    default: return "category";
  }
}

std::string_view sort_key_name(SortKeyKind k) {
  switch (k) {
    case SortKeyKind::kHeight: return "height";
    case SortKeyKind::kWidth: return "width";
    default: return "volume";
  }
}

std::string_view sort_order_name(SortOrder o) {
  return o == SortOrder::kAscending ? "ascending" : "descending";
}

int max_perturbable(int rows, int cols) {
  const int by_rows = rows * std::max(0, cols - 2);   // keep 2 per row
  const int by_cols = cols * std::max(0, rows - 1);   // keep 1 per column
  return std::max(0, std::min(by_rows, by_cols));
}

// ---------------------------------------------------------------- sorting

TaskInstance gen_sorting(std::uint64_t seed, std::uint64_t index,
                         const SortingOptions& opts) {
  Pcg32 rng = Pcg32::derive(seed ^ kSortingSalt, index);

  const int n = opts.n_objects.value_or(4 + static_cast<int>(rng.next_below(9)));
  if (n < 2 || n > 50) {
    throw ValidationError("sorting needs between 2 and 50 objects, got " +
                          std::to_string(n));
  }
  SortSpec spec;
  spec.axis = opts.axis.value_or(rng.next_below(2) == 0 ? Axis::kX : Axis::kY);
  if (spec.axis == Axis::kZ) {
    throw ValidationError("sorting lays objects out along x or y");
  }
  spec.object_gap = opts.object_gap.value_or(sample_on_grid(rng, 0.02, 0.10, 1e-3));
  spec.group_gap = opts.group_gap.value_or(sample_on_grid(rng, 0.15, 0.40, 1e-3));
  if (spec.object_gap <= 0.0 || spec.group_gap <= 0.0) {
    throw ValidationError("gaps must be positive");
  }
  spec.group_key = static_cast<GroupKey>(rng.next_below(3));
  spec.sort_key = static_cast<SortKeyKind>(rng.next_below(3));
  spec.sort_order = static_cast<SortOrder>(rng.next_below(2));
  const int n_groups = n >= 6 ? 2 + static_cast<int>(rng.next_below(2)) : 2;

  // Group identities and per-object draws.
  const auto& tabletop = tabletop_categories();
  const auto& colors = color_names();
  struct Draft {
    const Category* cat = nullptr;
    std::string color;
    std::string label;
    Vec3 dim;
  };
  std::vector<std::string> labels;
  std::vector<Draft> drafts;
  const auto pick_color = [&] {
    return std::string(colors[rng.next_below(
        static_cast<std::uint32_t>(colors.size()))]);
  };
  if (spec.group_key == GroupKey::kShape) {
    std::vector<Shape> shapes = {Shape::kCuboid, Shape::kCylinder,
                                 Shape::kSphere, Shape::kCone, Shape::kWedge};
    shuffle(shapes, rng);
    shapes.resize(static_cast<std::size_t>(n_groups));
    for (Shape s : shapes) labels.emplace_back(shape_name(s));
  } else if (spec.group_key == GroupKey::kColor) {
    std::vector<std::size_t> idx =
        shuffled_indices(colors.size(), rng);
    for (int g = 0; g < n_groups; ++g) {
      labels.emplace_back(colors[idx[static_cast<std::size_t>(g)]]);
    }
  } else {
    std::vector<std::size_t> idx = shuffled_indices(tabletop.size(), rng);
    for (int g = 0; g < n_groups; ++g) {
      labels.emplace_back(tabletop[idx[static_cast<std::size_t>(g)]].name);
    }
  }

  std::vector<int> sizes(static_cast<std::size_t>(n_groups), 1);
  for (int i = 0; i < n - n_groups; ++i) {
    ++sizes[rng.next_below(static_cast<std::uint32_t>(n_groups))];
  }
  for (int g = 0; g < n_groups; ++g) {
    for (int k = 0; k < sizes[static_cast<std::size_t>(g)]; ++k) {
      Draft d;
      d.label = labels[static_cast<std::size_t>(g)];
      if (spec.group_key == GroupKey::kShape) {
        std::vector<const Category*> pool;
        for (const Category& c : tabletop) {
          if (shape_name(c.shape) == d.label) pool.push_back(&c);
        }
        d.cat = pool[rng.next_below(static_cast<std::uint32_t>(pool.size()))];
        d.color = pick_color();
      } else if (spec.group_key == GroupKey::kColor) {
        d.cat = &tabletop[rng.next_below(
            static_cast<std::uint32_t>(tabletop.size()))];
        d.color = d.label;
      } else {
        d.cat = find_category(d.label);
        d.color = pick_color();
      }
      d.dim = sample_dimensions(*d.cat, rng);
      drafts.push_back(std::move(d));
    }
  }

  std::vector<std::pair<std::string, std::string>> caption_pairs;
  for (const Draft& d : drafts) {
    caption_pairs.emplace_back(d.color, std::string(d.cat->name));
  }
  const std::vector<std::string> captions = unique_captions(caption_pairs);

  spec.group_order = labels;
  shuffle(spec.group_order, rng);

  const auto extent_of = [&](const Draft& d) {
    return spec.axis == Axis::kX ? d.dim.x : d.dim.y;
  };
  double span = 0.0;
  double max_off = 0.0;
  for (const Draft& d : drafts) {
    span += extent_of(d);
    max_off = std::max(max_off, spec.axis == Axis::kX ? d.dim.y : d.dim.x);
  }
  span += spec.object_gap * static_cast<double>(n - n_groups);
  span += spec.group_gap * static_cast<double>(n_groups - 1);
  spec.total_span = canonical_round(span);

  const double along_dim = std::max(sample_on_grid(rng, 1.6, 2.4, 1e-3),
                                    canonical_round(spec.total_span + 0.2));
  const double off_dim = std::max(sample_on_grid(rng, 0.8, 1.2, 1e-3),
                                  canonical_round(max_off + 0.3));
  const double height = sample_on_grid(rng, 0.70, 0.80, 1e-3);
  spec.support_z = height;
  const Vec3 table_dim = spec.axis == Axis::kX
                             ? Vec3{along_dim, off_dim, height}
                             : Vec3{off_dim, along_dim, height};

  SceneGraph g0;
  g0.nodes.emplace(
      0, make_node(0, NodeType::kContainer,
                   {0.0, 0.0, canonical_round(height / 2.0)}, table_dim,
                   {0.0, 0.0, 0.0}, "table"));

  // Scatter the objects anywhere on the tabletop, collision-free.
  for (int restart = 0;; ++restart) {
    if (restart > 20) {
      throw InfeasibleError("could not scatter the objects on the table");
    }
    SceneGraph trial = g0;
    bool ok = true;
    for (std::size_t i = 0; i < drafts.size() && ok; ++i) {
      const Draft& d = drafts[i];
      const double xr = (table_dim.x - d.dim.x) / 2.0 - 0.01;
      const double yr = (table_dim.y - d.dim.y) / 2.0 - 0.01;
      bool placed = false;
      for (int attempt = 0; attempt < 2000; ++attempt) {
        const Vec3 center = {canonical_round(rng.uniform(-xr, xr)),
                             canonical_round(rng.uniform(-yr, yr)),
                             canonical_round(height + d.dim.z / 2.0)};
        bool clear = true;
        for (const auto& [id, other] : trial.nodes) {
          if (other.node_type == NodeType::kContainer) continue;
          if (!footprints_clear(center, d.dim, other.center_location,
                                other.dimension, 0.005)) {
            clear = false;
            break;
          }
        }
        if (!clear) continue;
        const double yaw =
            (static_cast<double>(rng.next_below(13)) - 6.0) * 15.0;
        trial.nodes.emplace(
            static_cast<std::int64_t>(i) + 1,
            make_node(static_cast<std::int64_t>(i) + 1, NodeType::kObject,
                      center, d.dim, {0.0, 0.0, yaw}, captions[i]));
        placed = true;
        break;
      }
      ok = placed;
    }
    if (ok) {
      g0 = std::move(trial);
      break;
    }
  }

  TaskInstance inst;
  inst.id = instance_id(TaskKind::kSorting, seed, index);
  inst.task = TaskKind::kSorting;
  inst.seed = seed;
  inst.instruction = sorting_instruction(spec);
  inst.initial_graph = g0;
  inst.target_graph = solve_sorting(g0, spec).graph;
  inst.spec = spec;
  return inst;
}

// -------------------------------------------------------------- alignment

TaskInstance gen_alignment(std::uint64_t seed, std::uint64_t index,
                           const AlignmentOptions& opts) {
  Pcg32 rng = Pcg32::derive(seed ^ kAlignmentSalt, index);

  const int rows = opts.rows.value_or(3 + static_cast<int>(rng.next_below(3)));
  const int cols = opts.cols.value_or(3 + static_cast<int>(rng.next_below(4)));
  if (rows < 1 || cols < 1 || rows > 12 || cols > 12 || rows * cols < 4) {
    throw ValidationError(
        "grid must have at least 4 cells and no side above 12, got " +
        std::to_string(rows) + "x" + std::to_string(cols));
  }
  const int capacity = max_perturbable(rows, cols);
  const int cells_total = rows * cols;
  int k = 0;
  if (opts.perturb_fraction) {
    const double f = *opts.perturb_fraction;
    if (f < 0.0 || f > 1.0) {
      throw ValidationError("perturb fraction must be in [0, 1]");
    }
    k = static_cast<int>(std::ceil(f * cells_total - 1e-9));
    if (k > capacity) {
      throw InfeasibleError(
          "perturbing " + std::to_string(k) + " of " +
          std::to_string(cells_total) +
          " objects would leave some row with fewer than two settled "
          "objects or some column with none (at most " +
          std::to_string(capacity) + " can move)");
    }
  } else {
    const double f_max =
        std::min(0.4, static_cast<double>(capacity) / cells_total);
    const double f_min = std::min(0.2, f_max);
    const double f = rng.uniform(f_min, f_max);
    k = std::min(capacity,
                 std::max(capacity > 0 ? 1 : 0,
                          static_cast<int>(std::ceil(f * cells_total - 1e-9))));
  }

  // One object category per row, one color per column slot (re-shuffled
  // per row), so captions are unique and rows are identifiable by kind.
  const auto& tabletop = tabletop_categories();
  const auto& colors = color_names();
  if (cols > static_cast<int>(colors.size()) ||
      rows > static_cast<int>(tabletop.size())) {
    throw ValidationError("grid too large for distinct captions");
  }
  std::vector<std::size_t> cat_idx = shuffled_indices(tabletop.size(), rng);
  std::vector<const Category*> row_cat;
  for (int r = 0; r < rows; ++r) {
    row_cat.push_back(&tabletop[cat_idx[static_cast<std::size_t>(r)]]);
  }

  std::vector<std::vector<Vec3>> dims(static_cast<std::size_t>(rows));
  std::vector<std::vector<std::string>> caps(static_cast<std::size_t>(rows));
  double max_fx = 0.0;
  double max_fy = 0.0;
  for (int r = 0; r < rows; ++r) {
    std::vector<std::size_t> color_idx = shuffled_indices(colors.size(), rng);
    for (int c = 0; c < cols; ++c) {
      const Vec3 d =
          sample_dimensions(*row_cat[static_cast<std::size_t>(r)], rng);
      dims[static_cast<std::size_t>(r)].push_back(d);
      caps[static_cast<std::size_t>(r)].push_back(
          std::string(colors[color_idx[static_cast<std::size_t>(c)]]) + " " +
          std::string(row_cat[static_cast<std::size_t>(r)]->name));
      max_fx = std::max(max_fx, d.x);
      max_fy = std::max(max_fy, d.y);
    }
  }

  GridSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  // Pitch is twice the largest footprint: an object pushed off its column
  // by up to half a pitch still clears both neighbouring columns, so every
  // perturbation below always has collision-free poses available.
  spec.pitch_x =
      canonical_round(2.0 * max_fx + sample_on_grid(rng, 0.01, 0.08, 1e-3));
  spec.pitch_y =
      canonical_round(2.0 * max_fy + sample_on_grid(rng, 0.01, 0.08, 1e-3));
  spec.origin = {canonical_round(-(cols - 1) * spec.pitch_x / 2.0),
                 canonical_round(-(rows - 1) * spec.pitch_y / 2.0), 0.0};

  const double span_x = (cols - 1) * spec.pitch_x + max_fx;
  const double span_y = (rows - 1) * spec.pitch_y + max_fy;
  // Margins fit the largest displacement used below (half a pitch in x,
  // one pitch in y) with a centimetre of wall clearance to spare.
  const Vec3 table_dim = {
      std::max(sample_on_grid(rng, 1.2, 1.6, 1e-3),
               canonical_round(span_x + spec.pitch_x + 0.1)),
      std::max(sample_on_grid(rng, 1.0, 1.4, 1e-3),
               canonical_round(span_y + 2.0 * spec.pitch_y + 0.1)),
      sample_on_grid(rng, 0.70, 0.80, 1e-3)};
  const double support = table_dim.z;

  for (int r = 0; r < rows; ++r) {
    const double yaw =
        (static_cast<double>(rng.next_below(7)) - 3.0) * 15.0;
    spec.canonical_rotation[std::string(
        row_cat[static_cast<std::size_t>(r)]->name)] = yaw;
  }

  SceneGraph target;
  target.nodes.emplace(
      0, make_node(0, NodeType::kContainer,
                   {0.0, 0.0, canonical_round(table_dim.z / 2.0)}, table_dim,
                   {0.0, 0.0, 0.0}, "table"));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::int64_t id = 1 + static_cast<std::int64_t>(r) * cols + c;
      const Vec3& d = dims[static_cast<std::size_t>(r)]
                          [static_cast<std::size_t>(c)];
      const Vec3 center = {canonical_round(spec.origin.x + c * spec.pitch_x),
                           canonical_round(spec.origin.y + r * spec.pitch_y),
                           canonical_round(support + d.z / 2.0)};
      const double yaw = spec.canonical_rotation.at(
          std::string(row_cat[static_cast<std::size_t>(r)]->name));
      target.nodes.emplace(
          id, make_node(id, NodeType::kObject, center, d, {0.0, 0.0, yaw},
                        caps[static_cast<std::size_t>(r)]
                            [static_cast<std::size_t>(c)]));
    }
  }

  // Lattice coordinates incl. the one-pitch border the restorer considers.
  const auto cell_x = [&](int c) {
    return canonical_round(spec.origin.x + c * spec.pitch_x);
  };
  const auto cell_y = [&](int r) {
    return canonical_round(spec.origin.y + r * spec.pitch_y);
  };

  SceneGraph g0;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 60) {
      throw InfeasibleError(
          "could not construct a recoverable perturbation for this grid");
    }
    // Choose which cells to disturb, keeping 2 settled per row and 1 per
    // column.
    std::vector<std::pair<int, int>> cells;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) cells.emplace_back(r, c);
    }
    std::vector<std::pair<int, int>> chosen;
    for (int inner = 0; inner < 200 && static_cast<int>(chosen.size()) < k;
         ++inner) {
      shuffle(cells, rng);
      chosen.clear();
      std::vector<int> row_taken(static_cast<std::size_t>(rows), 0);
      std::vector<int> col_taken(static_cast<std::size_t>(cols), 0);
      for (const auto& [r, c] : cells) {
        if (static_cast<int>(chosen.size()) == k) break;
        if (row_taken[static_cast<std::size_t>(r)] >= cols - 2) continue;
        if (col_taken[static_cast<std::size_t>(c)] >= rows - 1) continue;
        chosen.emplace_back(r, c);
        ++row_taken[static_cast<std::size_t>(r)];
        ++col_taken[static_cast<std::size_t>(c)];
      }
    }
    if (static_cast<int>(chosen.size()) < k) continue;
    std::sort(chosen.begin(), chosen.end());

    SceneGraph trial = target;
    spec.perturbed_ids.clear();
    spec.cell_assignment.clear();
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        spec.cell_assignment[{r, c}] = 1 + static_cast<std::int64_t>(r) * cols + c;
      }
    }

    bool ok = true;
    for (const auto& [r, c] : chosen) {
      const std::int64_t id = spec.cell_assignment.at({r, c});
      Node& n = trial.nodes.at(id);
      bool placed = false;
      for (int tries = 0; tries < 400; ++tries) {
        // The x offset stays strictly between 0.31 and 0.49 pitches: far
        // enough off every column that the node reads as displaced no
        // matter where it sits in y, yet strictly nearer its own column
        // than any other, so the restorer provably sends it home.  The y
        // offset supplies the rest of the displacement magnitude.
        const double sx = rng.next_below(2) == 0 ? -1.0 : 1.0;
        const double sy = rng.next_below(2) == 0 ? -1.0 : 1.0;
        const double px = canonical_round(
            cell_x(c) + sx * rng.uniform(0.312, 0.488) * spec.pitch_x);
        const double py = canonical_round(
            cell_y(r) + sy * rng.uniform(0.0, 1.0) * spec.pitch_y);
        // Stay on the table.
        if (std::fabs(px) + n.dimension.x / 2.0 > table_dim.x / 2.0 - 0.01 ||
            std::fabs(py) + n.dimension.y / 2.0 > table_dim.y / 2.0 - 0.01) {
          continue;
        }
        // Clearly off-lattice: > 0.3 pitches (max-norm) from every cell of
        // the grid extended one pitch outward (the restorer's search set).
        double min_dev = 1e30;
        for (int rr = -1; rr <= rows; ++rr) {
          for (int cc = -1; cc <= cols; ++cc) {
            min_dev = std::min(
                min_dev,
                std::max(std::fabs(px - cell_x(cc)) / spec.pitch_x,
                         std::fabs(py - cell_y(rr)) / spec.pitch_y));
          }
        }
        if (min_dev <= 0.3 + 1e-9) continue;
        // Keep y clear of every other object so no spurious grid line
        // forms and no real one is polluted.
        bool y_clear = true;
        for (const auto& [oid, other] : trial.nodes) {
          if (oid == id || other.node_type == NodeType::kContainer) continue;
          if (std::fabs(py - other.center_location.y) < 2e-3) {
            y_clear = false;
            break;
          }
        }
        if (!y_clear) continue;
        bool collision_clear = true;
        for (const auto& [oid, other] : trial.nodes) {
          if (oid == id || other.node_type == NodeType::kContainer) continue;
          if (!footprints_clear({px, py, 0.0}, n.dimension,
                                other.center_location, other.dimension,
                                0.002)) {
            collision_clear = false;
            break;
          }
        }
        if (!collision_clear) continue;
        n.center_location.x = px;
        n.center_location.y = py;
        const double off =
            (1.0 + static_cast<double>(rng.next_below(6))) * 15.0;
        const double sign = rng.next_below(2) == 0 ? -1.0 : 1.0;
        n.rotation.z = n.rotation.z + sign * off;
        placed = true;
        break;
      }
      if (!placed) {
        ok = false;
        break;
      }
      spec.perturbed_ids.insert(id);
    }
    if (!ok) continue;

    // The instance is only usable if the restorer actually recovers the
    // target from the scrambled graph.
    try {
      if (serialize_scene_graph(solve_alignment(trial).graph) !=
          serialize_scene_graph(target)) {
        continue;
      }
    } catch (const InfeasibleError&) {
      continue;
    }
    g0 = std::move(trial);
    break;
  }

  TaskInstance inst;
  inst.id = instance_id(TaskKind::kAlignment, seed, index);
  inst.task = TaskKind::kAlignment;
  inst.seed = seed;
  inst.instruction = alignment_instruction(rows, cols);
  inst.initial_graph = std::move(g0);
  inst.target_graph = std::move(target);
  inst.spec = spec;
  return inst;
}

// --------------------------------------------------------------- roomedit

namespace {

// Finds centimeter-grid distances (d1, d2, d3) to the three centers that a
// single point within 4 cm of p0 satisfies almost exactly: two grid radii
// pick a circle intersection, and the point is kept only when its third
// distance also falls within ~1e-4 m of the grid.  A least-squares polish
// with the grid distances held fixed then confirms the three-circle system
// pins the point down to well under the restorer's acceptance residual.
bool snap_to_cm_grid(const std::vector<Vec3>& centers, const Vec3& p0,
                     std::vector<double>& stated) {
  const Vec3& c1 = centers[0];
  const Vec3& c2 = centers[1];
  const Vec3& c3 = centers[2];
  const double ux = c2.x - c1.x;
  const double uy = c2.y - c1.y;
  const double sep = std::hypot(ux, uy);
  if (sep < 1e-9) return false;

  const double base1 = round2(std::hypot(p0.x - c1.x, p0.y - c1.y));
  const double base2 = round2(std::hypot(p0.x - c2.x, p0.y - c2.y));

  double best_err = 1e30;
  double best_x = 0.0;
  double best_y = 0.0;
  double best_d1 = 0.0;
  double best_d2 = 0.0;
  for (int k1 = -3; k1 <= 3; ++k1) {
    for (int k2 = -3; k2 <= 3; ++k2) {
      const double d1 = base1 + 0.01 * k1;
      const double d2 = base2 + 0.01 * k2;
      if (d1 < 0.05 || d2 < 0.05) continue;
      if (sep > d1 + d2 || sep < std::fabs(d1 - d2)) continue;
      const double a = (d1 * d1 - d2 * d2 + sep * sep) / (2.0 * sep);
      const double h2 = d1 * d1 - a * a;
      if (h2 < 0.0) continue;
      const double h = std::sqrt(h2);
      const double mx = c1.x + a * ux / sep;
      const double my = c1.y + a * uy / sep;
      for (int s = -1; s <= 1; s += 2) {
        const double qx = mx - s * h * uy / sep;
        const double qy = my + s * h * ux / sep;
        if (std::hypot(qx - p0.x, qy - p0.y) > 0.04) continue;
        const double r3 = std::hypot(qx - c3.x, qy - c3.y);
        const double d3 = round2(r3);
        if (d3 < 0.05) continue;
        const double err = std::fabs(r3 - d3);
        if (err < best_err) {
          best_err = err;
          best_x = qx;
          best_y = qy;
          best_d1 = d1;
          best_d2 = d2;
        }
      }
    }
  }
  if (best_err > 1.9e-4) return false;

  const double targets[3] = {
      best_d1, best_d2, round2(std::hypot(best_x - c3.x, best_y - c3.y))};
  double fx = best_x;
  double fy = best_y;
  for (int iter = 0; iter < 40; ++iter) {
    double jtj11 = 0.0, jtj12 = 0.0, jtj22 = 0.0, jtr1 = 0.0, jtr2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Vec3& c = centers[static_cast<std::size_t>(i)];
      const double r = std::hypot(fx - c.x, fy - c.y);
      if (r < 1e-6) return false;
      const double e = r - targets[i];
      const double jx = (fx - c.x) / r;
      const double jy = (fy - c.y) / r;
      jtj11 += jx * jx;
      jtj12 += jx * jy;
      jtj22 += jy * jy;
      jtr1 += jx * e;
      jtr2 += jy * e;
    }
    const double det = jtj11 * jtj22 - jtj12 * jtj12;
    if (std::fabs(det) < 1e-9) break;
    fx -= (jtr1 * jtj22 - jtr2 * jtj12) / det;
    fy -= (jtj11 * jtr2 - jtj12 * jtr1) / det;
  }
  double rss = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec3& c = centers[static_cast<std::size_t>(i)];
    const double r = std::hypot(fx - c.x, fy - c.y);
    const double e = r - targets[i];
    rss += e * e;
    if (round2(r) != targets[i]) return false;
  }
  if (std::sqrt(rss) > 2.0e-4) return false;

  stated = {targets[0], targets[1], targets[2]};
  return true;
}

}  // namespace

TaskInstance gen_roomedit(std::uint64_t seed, std::uint64_t index,
                          const RoomeditOptions& opts) {
  Pcg32 rng = Pcg32::derive(seed ^ kRoomeditSalt, index);

  const int n_existing =
      opts.n_existing.value_or(3 + static_cast<int>(rng.next_below(6)));
  const int n_refs = opts.n_refs.value_or(2 + static_cast<int>(rng.next_below(2)));
  if (n_refs < 2 || n_refs > 3) {
    throw ValidationError("roomedit supports 2 or 3 references, got " +
                          std::to_string(n_refs));
  }
  if (n_existing < n_refs || n_existing > 11) {
    throw ValidationError("roomedit needs between " + std::to_string(n_refs) +
                          " and 11 existing objects, got " +
                          std::to_string(n_existing));
  }

  const auto& furniture = furniture_categories();
  const auto& colors = color_names();
  std::vector<std::size_t> cat_idx = shuffled_indices(furniture.size(), rng);

  std::vector<Vec3> dims;
  std::vector<std::pair<std::string, std::string>> caption_pairs;
  for (int i = 0; i <= n_existing; ++i) {  // last draw is the new object
    const Category& cat = furniture[cat_idx[static_cast<std::size_t>(i)]];
    dims.push_back(sample_dimensions(cat, rng));
    caption_pairs.emplace_back(
        std::string(colors[rng.next_below(
            static_cast<std::uint32_t>(colors.size()))]),
        std::string(cat.name));
  }
  const std::vector<std::string> captions = unique_captions(caption_pairs);

  // Room sized so rejection scattering stays easy (density <= ~0.35) and
  // every piece fits with wall margins.
  double area_needed = 0.0;
  double max_dx = 0.0;
  double max_dy = 0.0;
  for (const Vec3& d : dims) {
    area_needed += (d.x + 0.1) * (d.y + 0.1);
    max_dx = std::max(max_dx, d.x);
    max_dy = std::max(max_dy, d.y);
  }
  double room_l = sample_on_grid(rng, 3.6, 5.0, 1e-3);
  double room_w = sample_on_grid(rng, 3.0, 4.4, 1e-3);
  const double min_area = 2.9 * area_needed;
  if (room_l * room_w < min_area) {
    const double scale = std::sqrt(min_area / (room_l * room_w));
    room_l = canonical_round(std::ceil(room_l * scale * 1000.0) / 1000.0);
    room_w = canonical_round(std::ceil(room_w * scale * 1000.0) / 1000.0);
  }
  room_l = std::max(room_l, canonical_round(max_dx + 0.4));
  room_w = std::max(room_w, canonical_round(max_dy + 0.4));
  const double ceiling = 2.6;

  SceneGraph base;
  base.nodes.emplace(
      0, make_node(0, NodeType::kContainer, {0.0, 0.0, -0.05},
                   {room_l, room_w, 0.1}, {0.0, 0.0, 0.0}, "floor"));
  Aabb bounds;
  bounds.min = {canonical_round(-room_l / 2.0), canonical_round(-room_w / 2.0),
                0.0};
  bounds.max = {canonical_round(room_l / 2.0), canonical_round(room_w / 2.0),
                ceiling};

  const Vec3& new_dim = dims.back();

  for (int outer = 0;; ++outer) {
    if (outer > 40) {
      throw InfeasibleError(
          "could not build a well-posed placement for this seed");
    }
    // Scatter the existing furniture.
    SceneGraph g0 = base;
    bool scattered = true;
    for (int i = 0; i < n_existing && scattered; ++i) {
      const Vec3& d = dims[static_cast<std::size_t>(i)];
      const double xr = (room_l - d.x) / 2.0 - 0.05;
      const double yr = (room_w - d.y) / 2.0 - 0.05;
      bool placed = false;
      for (int tries = 0; tries < 3000; ++tries) {
        const Vec3 center = {canonical_round(rng.uniform(-xr, xr)),
                             canonical_round(rng.uniform(-yr, yr)),
                             canonical_round(d.z / 2.0)};
        bool clear = true;
        for (const auto& [id, other] : g0.nodes) {
          if (other.node_type == NodeType::kContainer) continue;
          if (!footprints_clear(center, d, other.center_location,
                                other.dimension, 0.05)) {
            clear = false;
            break;
          }
        }
        if (!clear) continue;
        const double yaw =
            (static_cast<double>(rng.next_below(4)) - 1.0) * 90.0;
        g0.nodes.emplace(
            i + 1, make_node(i + 1, NodeType::kObject, center, d,
                             {0.0, 0.0, yaw},
                             captions[static_cast<std::size_t>(i)]));
        placed = true;
        break;
      }
      scattered = placed;
    }
    if (!scattered) continue;

    // Try intended positions until one yields a well-posed, unambiguous,
    // solvable set of distance constraints; rescatter only if none does.
    const double nxr = (room_l - new_dim.x) / 2.0 - 0.05;
    const double nyr = (room_w - new_dim.y) / 2.0 - 0.05;
    for (int tries = 0; tries < 400; ++tries) {
      const Vec3 p0 = {canonical_round(rng.uniform(-nxr, nxr)),
                       canonical_round(rng.uniform(-nyr, nyr)),
                       canonical_round(new_dim.z / 2.0)};
      // Generous clearance: the final position may drift a few centimeters
      // off p0 once the distances are rounded to the instruction grid.
      bool clear = true;
      for (const auto& [id, other] : g0.nodes) {
        if (other.node_type == NodeType::kContainer) continue;
        if (!footprints_clear(p0, new_dim, other.center_location,
                              other.dimension, 0.08) ||
            planar_dist(p0, other.center_location) < 0.3) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;

      // Reference set: the n_refs nearest existing objects.
      std::vector<std::pair<double, std::int64_t>> by_dist;
      for (const auto& [id, other] : g0.nodes) {
        if (other.node_type == NodeType::kContainer) continue;
        by_dist.emplace_back(planar_dist(p0, other.center_location), id);
      }
      std::sort(by_dist.begin(), by_dist.end());
      std::vector<std::int64_t> nearest;
      for (int i = 0; i < n_refs; ++i) {
        nearest.push_back(by_dist[static_cast<std::size_t>(i)].second);
      }
      std::vector<Vec3> centers;
      for (std::int64_t id : nearest) {
        centers.push_back(g0.nodes.at(id).center_location);
      }

      // Conditioning: reject geometries where the distance constraints
      // barely pin the position down.
      if (n_refs == 2) {
        const double u1x = centers[0].x - p0.x, u1y = centers[0].y - p0.y;
        const double u2x = centers[1].x - p0.x, u2y = centers[1].y - p0.y;
        const double n1 = std::hypot(u1x, u1y);
        const double n2 = std::hypot(u2x, u2y);
        const double cosang = (u1x * u2x + u1y * u2y) / (n1 * n2);
        if (std::fabs(cosang) > 0.6) continue;
        if (planar_dist(centers[0], centers[1]) < 0.4) continue;
      } else {
        const double area2 =
            std::fabs((centers[1].x - centers[0].x) *
                          (centers[2].y - centers[0].y) -
                      (centers[2].x - centers[0].x) *
                          (centers[1].y - centers[0].y));
        if (area2 < 0.6) continue;  // triangle area >= 0.3 m^2
      }

      // Stated distances on the centimeter grid.  Two circles intersect
      // for any nearby radii, so plain rounding works; three circles only
      // agree once the intended point is nudged onto the grid.
      std::vector<double> stated;
      if (n_refs == 2) {
        stated = {round2(planar_dist(p0, centers[0])),
                  round2(planar_dist(p0, centers[1]))};
      } else if (!snap_to_cm_grid(centers, p0, stated)) {
        continue;
      }
      bool stated_ok = true;
      for (double d : stated) {
        if (d < 0.05) stated_ok = false;
      }
      if (!stated_ok) continue;

      PlacementSpec spec;
      spec.new_node = make_node(n_existing + 1, NodeType::kObject,
                                {0.0, 0.0, 0.0}, new_dim, {0.0, 0.0, 0.0},
                                captions.back());
      for (int i = 0; i < n_refs; ++i) {
        spec.references.emplace_back(nearest[static_cast<std::size_t>(i)],
                                     stated[static_cast<std::size_t>(i)]);
      }
      spec.room_bounds = bounds;

      // The instance must be solvable, unambiguous, and land near the
      // intended spot.
      SolveResult solved;
      try {
        const auto candidates = placement_candidates(g0, spec);
        int survivors = 0;
        for (const PlacementCandidate& c : candidates) {
          if (c.in_bounds && c.collision_free) ++survivors;
        }
        if (survivors != 1) continue;
        solved = solve_placement(g0, spec);
      } catch (const InfeasibleError&) {
        continue;
      }
      if (solved.residual >= 5e-4) continue;
      const Node& placed = solved.graph.nodes.at(spec.new_node.id);
      if (planar_dist(placed.center_location, p0) > 0.05) continue;
      // Stated distances must survive a re-measurement at the final pose.
      bool fixpoint = true;
      for (int i = 0; i < n_refs; ++i) {
        if (round2(planar_dist(placed.center_location,
                               centers[static_cast<std::size_t>(i)])) !=
            stated[static_cast<std::size_t>(i)]) {
          fixpoint = false;
          break;
        }
      }
      if (!fixpoint) continue;

      std::vector<std::string> ref_caps;
      for (std::int64_t id : nearest) {
        ref_caps.push_back(g0.nodes.at(id).caption.value_or("object"));
      }

      TaskInstance inst;
      inst.id = instance_id(TaskKind::kRoomedit, seed, index);
      inst.task = TaskKind::kRoomedit;
      inst.seed = seed;
      inst.instruction =
          roomedit_instruction(spec.new_node, ref_caps, stated);
      inst.initial_graph = std::move(g0);
      inst.target_graph = solved.graph;
      inst.spec = std::move(spec);
      return inst;
    }
  }
}

// ------------------------------------------------------------ JSON lines

namespace {

void append_quoted(std::string& out, const std::string& s) {
  out += json(s).dump();
}

void append_vec(std::string& out, const Vec3& v) {
  out += '[';
  out += format_number(v.x);
  out += ',';
  out += format_number(v.y);
  out += ',';
  out += format_number(v.z);
  out += ']';
}

void append_sort_spec(std::string& out, const SortSpec& s) {
  out += "{\"group_key\":\"";
  out += group_key_name(s.group_key);
  out += "\",\"sort_key\":\"";
  out += sort_key_name(s.sort_key);
  out += "\",\"sort_order\":\"";
  out += sort_order_name(s.sort_order);
  out += "\",\"group_order\":[";
  for (std::size_t i = 0; i < s.group_order.size(); ++i) {
    if (i > 0) out += ',';
    append_quoted(out, s.group_order[i]);
  }
  out += "],\"axis\":\"";
  out += axis_name(s.axis);
  out += "\",\"total_span\":";
  out += format_number(s.total_span);
  out += ",\"group_gap\":";
  out += format_number(s.group_gap);
  out += ",\"object_gap\":";
  out += format_number(s.object_gap);
  out += ",\"support_z\":";
  out += format_number(s.support_z);
  out += '}';
}

void append_grid_spec(std::string& out, const GridSpec& s) {
  out += "{\"rows\":";
  out += std::to_string(s.rows);
  out += ",\"cols\":";
  out += std::to_string(s.cols);
  out += ",\"origin\":";
  append_vec(out, s.origin);
  out += ",\"pitch_x\":";
  out += format_number(s.pitch_x);
  out += ",\"pitch_y\":";
  out += format_number(s.pitch_y);
  out += ",\"cells\":[";
  bool first = true;
  for (const auto& [cell, id] : s.cell_assignment) {
    if (!first) out += ',';
    first = false;
    out += "{\"row\":";
    out += std::to_string(cell.first);
    out += ",\"col\":";
    out += std::to_string(cell.second);
    out += ",\"id\":";
    out += std::to_string(id);
    out += '}';
  }
  out += "],\"canonical_rotation\":{";
  first = true;
  for (const auto& [category, yaw] : s.canonical_rotation) {
    if (!first) out += ',';
    first = false;
    append_quoted(out, category);
    out += ':';
    out += format_number(yaw);
  }
  out += "},\"perturbed_ids\":[";
  first = true;
  for (std::int64_t id : s.perturbed_ids) {
    if (!first) out += ',';
    first = false;
    out += std::to_string(id);
  }
  out += "]}";
}

void append_placement_spec(std::string& out, const PlacementSpec& s) {
  out += "{\"new_node\":{\"id\":";
  out += std::to_string(s.new_node.id);
  out += ',';
  out += serialize_node_fields(s.new_node);
  out += "},\"references\":[";
  for (std::size_t i = 0; i < s.references.size(); ++i) {
    if (i > 0) out += ',';
    out += "{\"id\":";
    out += std::to_string(s.references[i].first);
    out += ",\"distance\":";
    out += format_number(s.references[i].second);
    out += '}';
  }
  out += "],\"room_bounds\":{\"min\":";
  append_vec(out, s.room_bounds.min);
  out += ",\"max\":";
  append_vec(out, s.room_bounds.max);
  out += "}}";
}

Vec3 vec_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() ||
      !j[1].is_number() || !j[2].is_number()) {
    throw ValidationError(std::string(what) + " must be an array of 3 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

const json& require(const json& j, const char* field, const char* ctx) {
  auto it = j.find(field);
  if (it == j.end()) {
    throw ValidationError(std::string(ctx) + ": missing field '" + field +
                          "'");
  }
  return *it;
}

SortSpec sort_spec_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("spec: must be an object");
  SortSpec s;
  const std::string gk = require(j, "group_key", "spec").get<std::string>();
  if (gk == "shape") s.group_key = GroupKey::kShape;
  else if (gk == "color") s.group_key = GroupKey::kColor;
  else if (gk == "category") s.group_key = GroupKey::kCategory;
  else throw ValidationError("spec: unknown group_key '" + gk + "'");
  const std::string sk = require(j, "sort_key", "spec").get<std::string>();
  if (sk == "height") s.sort_key = SortKeyKind::kHeight;
  else if (sk == "width") s.sort_key = SortKeyKind::kWidth;
  else if (sk == "volume") s.sort_key = SortKeyKind::kVolume;
  else throw ValidationError("spec: unknown sort_key '" + sk + "'");
  const std::string so = require(j, "sort_order", "spec").get<std::string>();
  if (so == "ascending") s.sort_order = SortOrder::kAscending;
  else if (so == "descending") s.sort_order = SortOrder::kDescending;
  else throw ValidationError("spec: unknown sort_order '" + so + "'");
  const json& go = require(j, "group_order", "spec");
  if (!go.is_array() || go.empty()) {
    throw ValidationError("spec: group_order must be a non-empty array");
  }
  for (const json& label : go) {
    if (!label.is_string()) {
      throw ValidationError("spec: group_order entries must be strings");
    }
    s.group_order.push_back(label.get<std::string>());
  }
  const std::string ax = require(j, "axis", "spec").get<std::string>();
  if (ax == "x") s.axis = Axis::kX;
  else if (ax == "y") s.axis = Axis::kY;
  else throw ValidationError("spec: axis must be 'x' or 'y'");
  s.total_span = require(j, "total_span", "spec").get<double>();
  s.group_gap = require(j, "group_gap", "spec").get<double>();
  s.object_gap = require(j, "object_gap", "spec").get<double>();
  s.support_z = require(j, "support_z", "spec").get<double>();
  if (!(s.total_span > 0.0) || !(s.group_gap > 0.0) || !(s.object_gap > 0.0)) {
    throw ValidationError("spec: span and gaps must be positive");
  }
  return s;
}

GridSpec grid_spec_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("spec: must be an object");
  GridSpec s;
  s.rows = require(j, "rows", "spec").get<int>();
  s.cols = require(j, "cols", "spec").get<int>();
  if (s.rows < 1 || s.cols < 1) {
    throw ValidationError("spec: rows and cols must be positive");
  }
  s.origin = vec_from_json(require(j, "origin", "spec"), "spec: origin");
  s.pitch_x = require(j, "pitch_x", "spec").get<double>();
  s.pitch_y = require(j, "pitch_y", "spec").get<double>();
  if (!(s.pitch_x > 0.0) || !(s.pitch_y > 0.0)) {
    throw ValidationError("spec: pitches must be positive");
  }
  const json& cells = require(j, "cells", "spec");
  if (!cells.is_array()) throw ValidationError("spec: cells must be an array");
  for (const json& cell : cells) {
    const int r = require(cell, "row", "spec cell").get<int>();
    const int c = require(cell, "col", "spec cell").get<int>();
    const std::int64_t id = require(cell, "id", "spec cell").get<std::int64_t>();
    if (r < 0 || r >= s.rows || c < 0 || c >= s.cols) {
      throw ValidationError("spec: cell (" + std::to_string(r) + ", " +
                            std::to_string(c) + ") is outside the grid");
    }
    if (!s.cell_assignment.emplace(std::make_pair(r, c), id).second) {
      throw ValidationError("spec: cell (" + std::to_string(r) + ", " +
                            std::to_string(c) + ") assigned twice");
    }
  }
  const json& rot = require(j, "canonical_rotation", "spec");
  if (!rot.is_object()) {
    throw ValidationError("spec: canonical_rotation must be an object");
  }
  for (const auto& [category, yaw] : rot.items()) {
    if (!yaw.is_number()) {
      throw ValidationError("spec: canonical_rotation values must be numbers");
    }
    s.canonical_rotation[category] = yaw.get<double>();
  }
  const json& perturbed = require(j, "perturbed_ids", "spec");
  if (!perturbed.is_array()) {
    throw ValidationError("spec: perturbed_ids must be an array");
  }
  for (const json& id : perturbed) {
    s.perturbed_ids.insert(id.get<std::int64_t>());
  }
  return s;
}

PlacementSpec placement_spec_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("spec: must be an object");
  PlacementSpec s;
  const json& nn = require(j, "new_node", "spec");
  const std::int64_t nid = require(nn, "id", "spec new_node").get<std::int64_t>();
  json body = nn;
  body.erase("id");
  s.new_node = node_from_json(nid, body);
  const json& refs = require(j, "references", "spec");
  if (!refs.is_array() || refs.size() < 2 || refs.size() > 3) {
    throw ValidationError("spec: references must hold 2 or 3 entries");
  }
  for (const json& ref : refs) {
    const std::int64_t id = require(ref, "id", "spec reference").get<std::int64_t>();
    const double d = require(ref, "distance", "spec reference").get<double>();
    if (!(d > 0.0)) {
      throw ValidationError("spec: reference distances must be positive");
    }
    s.references.emplace_back(id, d);
  }
  const json& rb = require(j, "room_bounds", "spec");
  s.room_bounds.min = vec_from_json(require(rb, "min", "spec room_bounds"),
                                    "spec: room_bounds.min");
  s.room_bounds.max = vec_from_json(require(rb, "max", "spec room_bounds"),
                                    "spec: room_bounds.max");
  if (!(s.room_bounds.min.x < s.room_bounds.max.x) ||
      !(s.room_bounds.min.y < s.room_bounds.max.y) ||
      !(s.room_bounds.min.z < s.room_bounds.max.z)) {
    throw ValidationError("spec: room_bounds must span a positive volume");
  }
  return s;
}

}  // namespace

std::string instance_to_json(const TaskInstance& inst) {
  std::string out;
  out += "{\"id\":";
  append_quoted(out, inst.id);
  out += ",\"task\":\"";
  out += task_name(inst.task);
  out += "\",\"seed\":";
  out += std::to_string(inst.seed);
  out += ",\"instruction\":";
  append_quoted(out, inst.instruction);
  out += ",\"spec\":";
  if (const auto* s = std::get_if<SortSpec>(&inst.spec)) {
    append_sort_spec(out, *s);
  } else if (const auto* g = std::get_if<GridSpec>(&inst.spec)) {
    append_grid_spec(out, *g);
  } else {
    append_placement_spec(out, std::get<PlacementSpec>(inst.spec));
  }
  out += ",\"initial_graph\":";
  out += serialize_scene_graph(inst.initial_graph);
  out += ",\"target_graph\":";
  out += serialize_scene_graph(inst.target_graph);
  out += '}';
  return out;
}

TaskInstance parse_task_instance(std::string_view line) {
  const json j = parse_json_strict(line);
  if (!j.is_object()) {
    throw ValidationError("instance record must be a JSON object");
  }
  TaskInstance inst;
  const json& jid = require(j, "id", "instance");
  if (!jid.is_string()) throw ValidationError("instance: id must be a string");
  inst.id = jid.get<std::string>();

  const json& jtask = require(j, "task", "instance");
  if (!jtask.is_string()) {
    throw ValidationError("instance: task must be a string");
  }
  const auto task = task_from_name(jtask.get<std::string>());
  if (!task) {
    throw ValidationError("instance: unknown task '" +
                          jtask.get<std::string>() + "'");
  }
  inst.task = *task;

  const json& jseed = require(j, "seed", "instance");
  if (!jseed.is_number_unsigned() && !jseed.is_number_integer()) {
    throw ValidationError("instance: seed must be a non-negative integer");
  }
  if (jseed.is_number_integer() && jseed.get<std::int64_t>() < 0) {
    throw ValidationError("instance: seed must be a non-negative integer");
  }
  inst.seed = jseed.get<std::uint64_t>();

  const json& jinstr = require(j, "instruction", "instance");
  if (!jinstr.is_string()) {
    throw ValidationError("instance: instruction must be a string");
  }
  inst.instruction = jinstr.get<std::string>();

  const json& jspec = require(j, "spec", "instance");
  switch (inst.task) {
    case TaskKind::kSorting: inst.spec = sort_spec_from_json(jspec); break;
    case TaskKind::kAlignment: inst.spec = grid_spec_from_json(jspec); break;
    default: inst.spec = placement_spec_from_json(jspec); break;
  }

  inst.initial_graph =
      scene_graph_from_json(require(j, "initial_graph", "instance"));
  inst.target_graph =
      scene_graph_from_json(require(j, "target_graph", "instance"));
  return inst;
}

void write_dataset(const std::vector<TaskInstance>& instances,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const TaskInstance& inst : instances) {
    out << instance_to_json(inst) << '\n';
  }
  out.flush();
  if (!out) throw IoError("failed while writing '" + path + "'");
}

std::vector<TaskInstance> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<TaskInstance> instances;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      instances.push_back(parse_task_instance(line));
    } catch (const std::exception& e) {
      throw ValidationError("manifest line " + std::to_string(line_no) +
                            ": " + e.what());
    }
    if (!seen_ids.insert(instances.back().id).second) {
      throw ValidationError("manifest line " + std::to_string(line_no) +
                            ": duplicate instance id '" +
                            instances.back().id + "'");
    }
  }
  return instances;
}

}  // namespace layoutlab

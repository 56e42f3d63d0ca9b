#include "layoutlab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "layoutlab/errors.hpp"
#include "layoutlab/metrics.hpp"
#include "layoutlab/text.hpp"
#include "layoutlab/vocab.hpp"

namespace layoutlab {

namespace {

std::string num(double v) { return format_number(v); }

const Node& find_support_container(const SceneGraph& g, const char* what) {
  const Node* found = nullptr;
  for (const auto& [id, n] : g.nodes) {
    if (n.node_type != NodeType::kContainer) continue;
    if (found) {
      throw ValidationError(std::string(what) +
                            ": graph has more than one container");
    }
    found = &n;
  }
  if (!found) {
    throw ValidationError(std::string(what) +
                          ": graph has no container to act as the support");
  }
  return *found;
}

double sort_key_value(const Node& n, SortKeyKind key) {
  switch (key) {
    case SortKeyKind::kHeight: return n.dimension.z;
    case SortKeyKind::kWidth: return n.dimension.y;
    default: return n.dimension.x * n.dimension.y * n.dimension.z;
  }
}

std::string group_label(const Node& n, GroupKey key) {
  if (!n.caption) {
    throw ValidationError("node " + std::to_string(n.id) +
                          ": needs a caption to derive its group");
  }
  const CaptionParts parts = split_caption(*n.caption);
  switch (key) {
    case GroupKey::kColor:
      if (parts.color.empty()) {
        throw ValidationError("node " + std::to_string(n.id) +
                              ": caption carries no color word");
      }
      return parts.color;
    case GroupKey::kCategory:
      if (parts.category.empty()) {
        throw ValidationError("node " + std::to_string(n.id) +
                              ": caption carries no category");
      }
      return parts.category;
    default: {
      const Category* cat = find_category(parts.category);
      if (!cat) {
        throw ValidationError("node " + std::to_string(n.id) +
                              ": unknown category '" + parts.category + "'");
      }
      return std::string(shape_name(cat->shape));
    }
  }
}

void record_step(SolveResult& result, const Node& before, const Node& after,
                 std::string reason) {
  if (before.center_location == after.center_location &&
      before.rotation == after.rotation) {
    return;
  }
  result.steps.push_back({before.id, before.center_location,
                          after.center_location, before.rotation,
                          after.rotation, false, std::move(reason)});
}

double planar_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// ---------------------------------------------------------------- alignment

struct InferredGrid {
  std::vector<double> row_y;            // sorted, one per detected row
  std::vector<double> col_x;            // sorted, one per detected column
  double pitch_x = 0.0;
  double pitch_y = 0.0;
  std::vector<std::vector<const Node*>> row_members;  // on-row nodes per row
};

/// Group sorted values into clusters whose members lie within `tol` of the
/// cluster start; returns (representative, count) pairs. Representatives
/// are the cluster's most frequent exact value (smallest on a tie), so a
/// clean grid reproduces its coordinates bit for bit.
std::vector<std::pair<double, int>> cluster_values(std::vector<double> values,
                                                   double tol) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, int>> clusters;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] - values[i] <= tol) ++j;
    std::map<double, int> freq;
    for (std::size_t k = i; k < j; ++k) ++freq[values[k]];
    double rep = values[i];
    int best = 0;
    for (const auto& [v, c] : freq) {
      if (c > best) {
        best = c;
        rep = v;
      }
    }
    clusters.emplace_back(rep, static_cast<int>(j - i));
    i = j;
  }
  return clusters;
}

/// Pitch from consecutive differences of sorted line coordinates. Vacant
/// lines make some differences a multiple of the pitch, so each difference
/// is scaled by its inferred cell count before averaging.
double estimate_pitch(const std::vector<double>& coords) {
  if (coords.size() < 2) return 0.0;
  double min_diff = std::numeric_limits<double>::max();
  for (std::size_t i = 1; i < coords.size(); ++i) {
    min_diff = std::min(min_diff, coords[i] - coords[i - 1]);
  }
  if (min_diff <= 0.0) return 0.0;
  double sum = 0.0;
  double cells = 0.0;
  for (std::size_t i = 1; i < coords.size(); ++i) {
    const double d = coords[i] - coords[i - 1];
    sum += d;
    cells += std::max(1.0, std::round(d / min_diff));
  }
  return sum / cells;
}

SolveResult solve_alignment_hinted(const SceneGraph& g0, const GridSpec& hint) {
  SolveResult result;
  result.graph = g0;
  std::map<std::int64_t, std::pair<int, int>> cell_of;
  for (const auto& [cell, id] : hint.cell_assignment) {
    cell_of[id] = cell;
  }
  double worst = 0.0;
  for (std::int64_t id : hint.perturbed_ids) {
    auto node_it = result.graph.nodes.find(id);
    auto cell_it = cell_of.find(id);
    if (node_it == result.graph.nodes.end() || cell_it == cell_of.end()) {
      throw ValidationError("alignment hint references unknown node " +
                            std::to_string(id));
    }
    Node& n = node_it->second;
    const Node before = n;
    const auto [row, col] = cell_it->second;
    n.center_location.x = canonical_round(hint.origin.x + col * hint.pitch_x);
    n.center_location.y = canonical_round(hint.origin.y + row * hint.pitch_y);
    if (n.caption) {
      const auto yaw = hint.canonical_rotation.find(
          split_caption(*n.caption).category);
      if (yaw != hint.canonical_rotation.end()) n.rotation.z = yaw->second;
    }
    record_step(result, before, n,
                "return to grid cell (" + std::to_string(row) + ", " +
                    std::to_string(col) + ")");
    const double cx = canonical_round(hint.origin.x + col * hint.pitch_x);
    const double cy = canonical_round(hint.origin.y + row * hint.pitch_y);
    worst = std::max(worst, std::hypot(n.center_location.x - cx,
                                       n.center_location.y - cy));
  }
  result.residual = worst;
  return result;
}

}  // namespace

SceneGraph apply_steps(const SceneGraph& g0,
                       const std::vector<PoseDelta>& steps,
                       const Node* inserted_template) {
  SceneGraph g = g0;
  for (const PoseDelta& step : steps) {
    auto it = g.nodes.find(step.node_id);
    if (it == g.nodes.end()) {
      if (!step.inserted || inserted_template == nullptr) {
        throw ValidationError("step references unknown node " +
                              std::to_string(step.node_id));
      }
      Node n = *inserted_template;
      n.id = step.node_id;
      it = g.nodes.emplace(step.node_id, std::move(n)).first;
    }
    it->second.center_location = step.new_center;
    it->second.rotation = step.new_rotation;
  }
  return g;
}

SolveResult solve_sorting(const SceneGraph& g0, const SortSpec& spec) {
  SolveResult result;
  result.graph = g0;
  const Node& table = find_support_container(g0, "sorting");

  // Partition the objects by group label, in spec order.
  std::map<std::string, std::vector<const Node*>> groups;
  for (const auto& [id, n] : g0.nodes) {
    if (n.node_type == NodeType::kContainer) continue;
    groups[group_label(n, spec.group_key)].push_back(&n);
  }
  for (const auto& [label, members] : groups) {
    if (std::find(spec.group_order.begin(), spec.group_order.end(), label) ==
        spec.group_order.end()) {
      throw ValidationError("group label '" + label +
                            "' does not appear in the requested order");
    }
    (void)members;
  }

  std::vector<std::pair<std::string, std::vector<const Node*>>> ordered;
  for (const std::string& label : spec.group_order) {
    auto it = groups.find(label);
    if (it == groups.end()) continue;  // group with no objects: skip
    std::vector<const Node*> members = it->second;
    std::sort(members.begin(), members.end(),
              [&](const Node* a, const Node* b) {
                const double ka = sort_key_value(*a, spec.sort_key);
                const double kb = sort_key_value(*b, spec.sort_key);
                if (ka != kb) {
                  return spec.sort_order == SortOrder::kAscending ? ka < kb
                                                                  : ka > kb;
                }
                return a->id < b->id;
              });
    ordered.emplace_back(label, std::move(members));
  }

  const auto extent_of = [&](const Node* n) {
    return spec.axis == Axis::kX ? n->dimension.x : n->dimension.y;
  };
  double required = 0.0;
  for (std::size_t gi = 0; gi < ordered.size(); ++gi) {
    for (const Node* n : ordered[gi].second) required += extent_of(n);
    required +=
        spec.object_gap * static_cast<double>(ordered[gi].second.size() - 1);
    if (gi + 1 < ordered.size()) required += spec.group_gap;
  }
  if (required > spec.total_span + 1e-9) {
    throw InfeasibleError("objects and gaps need " + num(required) +
                          " m but the span is only " + num(spec.total_span) +
                          " m");
  }
  result.residual = std::fabs(required - spec.total_span);

  const double table_axis_center =
      axis_coord(table.center_location, spec.axis);
  const double off_axis_center = spec.axis == Axis::kX
                                     ? table.center_location.y
                                     : table.center_location.x;
  double cursor = table_axis_center - spec.total_span / 2.0;
  for (std::size_t gi = 0; gi < ordered.size(); ++gi) {
    const auto& [label, members] = ordered[gi];
    for (std::size_t oi = 0; oi < members.size(); ++oi) {
      const Node* src = members[oi];
      Node& dst = result.graph.nodes.at(src->id);
      const Node before = dst;
      const double extent = extent_of(src);
      const double along = canonical_round(cursor + extent / 2.0);
      if (spec.axis == Axis::kX) {
        dst.center_location.x = along;
        dst.center_location.y = canonical_round(off_axis_center);
      } else {
        dst.center_location.y = along;
        dst.center_location.x = canonical_round(off_axis_center);
      }
      dst.center_location.z =
          canonical_round(spec.support_z + src->dimension.z / 2.0);
      record_step(result, before, dst,
                  "slot " + std::to_string(oi) + " of group '" + label + "'");
      cursor += extent;
      if (oi + 1 < members.size()) cursor += spec.object_gap;
    }
    if (gi + 1 < ordered.size()) cursor += spec.group_gap;
  }
  return result;
}

SolveResult solve_alignment(const SceneGraph& g0, const GridSpec* hint,
                            const AlignmentParams& params) {
  if (hint) return solve_alignment_hinted(g0, *hint);

  SolveResult result;
  result.graph = g0;
  std::vector<const Node*> objects;
  for (const auto& [id, n] : g0.nodes) {
    if (n.node_type != NodeType::kContainer) objects.push_back(&n);
  }
  if (objects.empty()) return result;

  // Rows: y values shared (exactly, up to coord_tol) by at least two
  // objects. Singles are displacement suspects, not rows.
  std::vector<double> ys;
  for (const Node* n : objects) ys.push_back(n->center_location.y);
  InferredGrid grid;
  for (const auto& [rep, count] : cluster_values(ys, params.coord_tol)) {
    if (count >= 2) grid.row_y.push_back(rep);
  }
  if (grid.row_y.empty()) {
    throw InfeasibleError(
        "no grid line has two settled objects; cannot infer the lattice");
  }

  const auto row_index_of = [&](double y) -> int {
    for (std::size_t r = 0; r < grid.row_y.size(); ++r) {
      if (std::fabs(y - grid.row_y[r]) <= params.coord_tol) {
        return static_cast<int>(r);
      }
    }
    return -1;
  };

  grid.row_members.resize(grid.row_y.size());
  for (const Node* n : objects) {
    const int r = row_index_of(n->center_location.y);
    if (r >= 0) grid.row_members[static_cast<std::size_t>(r)].push_back(n);
  }
  // Columns: x values of on-row objects.
  std::vector<double> xs;
  for (const auto& members : grid.row_members) {
    for (const Node* n : members) xs.push_back(n->center_location.x);
  }
  for (const auto& [rep, count] : cluster_values(xs, params.coord_tol)) {
    grid.col_x.push_back(rep);
    (void)count;
  }
  grid.pitch_y = estimate_pitch(grid.row_y);
  grid.pitch_x = estimate_pitch(grid.col_x);
  if (grid.pitch_x <= 0.0) grid.pitch_x = grid.pitch_y;
  if (grid.pitch_y <= 0.0) grid.pitch_y = grid.pitch_x;
  if (grid.pitch_x <= 0.0) {
    throw InfeasibleError("grid too small to estimate a pitch");
  }

  // Lattice coordinates: observed lines plus a one-pitch extension at each
  // end (an object may belong just beyond the settled ones, but no farther).
  std::vector<double> lattice_x = grid.col_x;
  lattice_x.insert(lattice_x.begin(),
                   canonical_round(grid.col_x.front() - grid.pitch_x));
  lattice_x.push_back(canonical_round(grid.col_x.back() + grid.pitch_x));
  std::vector<double> lattice_y = grid.row_y;
  lattice_y.insert(lattice_y.begin(),
                   canonical_round(grid.row_y.front() - grid.pitch_y));
  lattice_y.push_back(canonical_round(grid.row_y.back() + grid.pitch_y));

  const auto normalized_dev = [&](const Node* n) {
    double best = std::numeric_limits<double>::max();
    for (double lx : lattice_x) {
      for (double ly : lattice_y) {
        const double d =
            std::max(std::fabs(n->center_location.x - lx) / grid.pitch_x,
                     std::fabs(n->center_location.y - ly) / grid.pitch_y);
        best = std::min(best, d);
      }
    }
    return best;
  };

  // Classify: on-row objects can still be displaced along x.
  std::vector<const Node*> outliers;
  std::vector<const Node*> in_place;
  for (const Node* n : objects) {
    if (normalized_dev(n) > params.outlier_threshold) {
      outliers.push_back(n);
    } else {
      in_place.push_back(n);
    }
  }
  std::sort(outliers.begin(), outliers.end(),
            [](const Node* a, const Node* b) { return a->id < b->id; });

  // Row facts from settled members only: category and modal yaw.
  const std::size_t n_rows = grid.row_y.size();
  std::vector<std::string> row_category(n_rows);
  std::vector<double> row_yaw(n_rows, 0.0);
  std::vector<std::set<std::size_t>> row_occupied_cols(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    std::map<std::string, int> cat_freq;
    std::map<double, int> yaw_freq;
    for (const Node* n : grid.row_members[r]) {
      if (std::find(in_place.begin(), in_place.end(), n) == in_place.end()) {
        continue;
      }
      if (n->caption) ++cat_freq[split_caption(*n->caption).category];
      ++yaw_freq[n->rotation.z];
      // Mark the nearest lattice column as occupied.
      std::size_t best_c = 0;
      double best_d = std::numeric_limits<double>::max();
      for (std::size_t c = 0; c < lattice_x.size(); ++c) {
        const double d = std::fabs(n->center_location.x - lattice_x[c]);
        if (d < best_d) {
          best_d = d;
          best_c = c;
        }
      }
      row_occupied_cols[r].insert(best_c);
    }
    int best = 0;
    for (const auto& [cat, c] : cat_freq) {
      if (c > best) {
        best = c;
        row_category[r] = cat;
      }
    }
    best = 0;
    for (const auto& [yaw, c] : yaw_freq) {
      if (c > best) {
        best = c;
        row_yaw[r] = yaw;
      }
    }
  }

  // Route each outlier to a row by its category.
  std::vector<std::vector<const Node*>> row_outliers(n_rows);
  std::vector<const Node*> unrouted;
  for (const Node* n : outliers) {
    std::vector<std::size_t> matches;
    if (n->caption) {
      const std::string cat = split_caption(*n->caption).category;
      for (std::size_t r = 0; r < n_rows; ++r) {
        if (!cat.empty() && row_category[r] == cat) matches.push_back(r);
      }
    }
    if (matches.size() == 1) {
      row_outliers[matches.front()].push_back(n);
    } else {
      unrouted.push_back(n);
    }
  }
  if (!unrouted.empty()) {
    // Without a category home the object's grid line cannot be identified
    // (typically that line kept fewer than two settled objects).
    throw InfeasibleError("cannot identify a grid line for node " +
                          std::to_string(unrouted.front()->id) +
                          "; its line has fewer than two settled objects");
  }

  // Per row: outliers -> vacant cells, minimizing total squared distance.
  for (std::size_t r = 0; r < n_rows; ++r) {
    auto& movers = row_outliers[r];
    if (movers.empty()) continue;
    std::vector<std::size_t> vacant;
    for (std::size_t c = 0; c < lattice_x.size(); ++c) {
      if (!row_occupied_cols[r].count(c)) vacant.push_back(c);
    }
    if (vacant.size() < movers.size()) {
      throw InfeasibleError(
          "row at y=" + num(grid.row_y[r]) +
          " has no vacant cell within one pitch of the settled span");
    }
    // Brute-force the best one-to-one assignment; sizes are tiny.
    std::vector<std::size_t> chosen(movers.size());
    std::vector<std::size_t> best_choice;
    double best_cost = std::numeric_limits<double>::max();
    std::vector<bool> used(vacant.size(), false);
    const auto recurse = [&](auto&& self, std::size_t mi, double cost) -> void {
      if (cost >= best_cost) return;
      if (mi == movers.size()) {
        best_cost = cost;
        best_choice = chosen;
        return;
      }
      for (std::size_t vi = 0; vi < vacant.size(); ++vi) {
        if (used[vi]) continue;
        const double dx =
            movers[mi]->center_location.x - lattice_x[vacant[vi]];
        const double dy = movers[mi]->center_location.y - grid.row_y[r];
        used[vi] = true;
        chosen[mi] = vi;
        self(self, mi + 1, cost + dx * dx + dy * dy);
        used[vi] = false;
      }
    };
    recurse(recurse, 0, 0.0);
    for (std::size_t mi = 0; mi < movers.size(); ++mi) {
      Node& n = result.graph.nodes.at(movers[mi]->id);
      const Node before = n;
      n.center_location.x = lattice_x[vacant[best_choice[mi]]];
      n.center_location.y = grid.row_y[r];
      n.rotation.z = row_yaw[r];
      record_step(result, before, n,
                  "re-seat on the '" + row_category[r] + "' row");
      row_occupied_cols[r].insert(vacant[best_choice[mi]]);
    }
  }

  // Residual: worst remaining deviation from the inferred lattice.
  double worst = 0.0;
  for (const auto& [id, n] : result.graph.nodes) {
    if (n.node_type == NodeType::kContainer) continue;
    double best = std::numeric_limits<double>::max();
    for (double lx : lattice_x) {
      for (double ly : lattice_y) {
        best = std::min(best, std::hypot(n.center_location.x - lx,
                                         n.center_location.y - ly));
      }
    }
    worst = std::max(worst, best);
  }
  result.residual = worst;
  return result;
}

std::vector<PlacementCandidate> placement_candidates(
    const SceneGraph& g0, const PlacementSpec& spec) {
  if (spec.references.size() < 2 || spec.references.size() > 3) {
    throw ValidationError("placement needs 2 or 3 references, got " +
                          std::to_string(spec.references.size()));
  }
  std::vector<Vec3> centers;
  std::vector<double> dists;
  for (const auto& [id, d] : spec.references) {
    auto it = g0.nodes.find(id);
    if (it == g0.nodes.end()) {
      throw ValidationError("placement references unknown node " +
                            std::to_string(id));
    }
    if (d <= 0.0) {
      throw ValidationError("placement distance to node " +
                            std::to_string(id) + " must be positive");
    }
    centers.push_back(it->second.center_location);
    dists.push_back(d);
  }

  const double floor_top =
      world_aabb(find_support_container(g0, "placement")).max.z;
  const double z = floor_top + spec.new_node.dimension.z / 2.0;

  const auto residual_at = [&](double x, double y) {
    double ss = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double v =
          planar_distance({x, y, 0.0}, centers[i]) - dists[i];
      ss += v * v;
    }
    return std::sqrt(ss);
  };
  const auto check = [&](double x, double y) {
    PlacementCandidate c;
    c.x = x;
    c.y = y;
    c.residual = residual_at(x, y);
    const Node probe = [&] {
      Node n = spec.new_node;
      n.center_location = {x, y, z};
      return n;
    }();
    const Aabb box = world_aabb(probe);
    c.in_bounds = box.min.x >= spec.room_bounds.min.x - 1e-9 &&
                  box.min.y >= spec.room_bounds.min.y - 1e-9 &&
                  box.min.z >= spec.room_bounds.min.z - 1e-9 &&
                  box.max.x <= spec.room_bounds.max.x + 1e-9 &&
                  box.max.y <= spec.room_bounds.max.y + 1e-9 &&
                  box.max.z <= spec.room_bounds.max.z + 1e-9;
    c.collision_free = true;
    for (const auto& [id, n] : g0.nodes) {
      if (intersection_volume(box, world_aabb(n)) > 1e-6) {
        c.collision_free = false;
        break;
      }
    }
    return c;
  };

  std::vector<PlacementCandidate> out;
  if (centers.size() == 2) {
    const double dx = centers[1].x - centers[0].x;
    const double dy = centers[1].y - centers[0].y;
    const double D = std::hypot(dx, dy);
    if (D < 1e-9) {
      throw InfeasibleError("the two reference objects share a center");
    }
    const double a = (dists[0] * dists[0] - dists[1] * dists[1] + D * D) /
                     (2.0 * D);
    double h2 = dists[0] * dists[0] - a * a;
    if (h2 < 0.0) {
      if (h2 > -1e-9 * std::max(1.0, dists[0] * dists[0])) {
        h2 = 0.0;  // tangent within round-off
      } else {
        throw InfeasibleError(
            "the reference circles do not intersect (radii " + num(dists[0]) +
            " and " + num(dists[1]) + ", centers " + num(D) + " apart)");
      }
    }
    const double h = std::sqrt(h2);
    const double bx = centers[0].x + a * dx / D;
    const double by = centers[0].y + a * dy / D;
    const double px = -dy / D;
    const double py = dx / D;
    out.push_back(check(bx + h * px, by + h * py));
    if (h > 0.0) out.push_back(check(bx - h * px, by - h * py));
    return out;
  }

  // Three references: linearize pairwise differences for a start point...
  double x0 = (centers[0].x + centers[1].x + centers[2].x) / 3.0;
  double y0 = (centers[0].y + centers[1].y + centers[2].y) / 3.0;
  {
    const double a11 = 2.0 * (centers[1].x - centers[0].x);
    const double a12 = 2.0 * (centers[1].y - centers[0].y);
    const double a21 = 2.0 * (centers[2].x - centers[0].x);
    const double a22 = 2.0 * (centers[2].y - centers[0].y);
    const auto sq = [](double v) { return v * v; };
    const double b1 = sq(dists[0]) - sq(dists[1]) + sq(centers[1].x) -
                      sq(centers[0].x) + sq(centers[1].y) - sq(centers[0].y);
    const double b2 = sq(dists[0]) - sq(dists[2]) + sq(centers[2].x) -
                      sq(centers[0].x) + sq(centers[2].y) - sq(centers[0].y);
    const double det = a11 * a22 - a12 * a21;
    if (std::fabs(det) > 1e-12) {
      x0 = (b1 * a22 - b2 * a12) / det;
      y0 = (a11 * b2 - a21 * b1) / det;
    }
  }
  // ...then damped Gauss-Newton on the distance residuals.
  double x = x0;
  double y = y0;
  double lambda = 1e-3;
  double f = residual_at(x, y);
  for (int iter = 0; iter < 100; ++iter) {
    double jtj11 = 0.0, jtj12 = 0.0, jtj22 = 0.0, jtr1 = 0.0, jtr2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double rx = x - centers[i].x;
      const double ry = y - centers[i].y;
      const double dist = std::hypot(rx, ry);
      if (dist < 1e-12) continue;
      const double r = dist - dists[i];
      const double jx = rx / dist;
      const double jy = ry / dist;
      jtj11 += jx * jx;
      jtj12 += jx * jy;
      jtj22 += jy * jy;
      jtr1 += jx * r;
      jtr2 += jy * r;
    }
    bool improved = false;
    for (int damp = 0; damp < 20; ++damp) {
      const double m11 = jtj11 + lambda;
      const double m22 = jtj22 + lambda;
      const double det = m11 * m22 - jtj12 * jtj12;
      if (std::fabs(det) < 1e-18) break;
      const double sx = (-jtr1 * m22 + jtr2 * jtj12) / det;
      const double sy = (-m11 * jtr2 + jtj12 * jtr1) / det;
      const double fx = residual_at(x + sx, y + sy);
      if (fx < f) {
        x += sx;
        y += sy;
        improved = true;
        lambda = std::max(lambda * 0.5, 1e-12);
        if (f - fx < 1e-9) {
          f = fx;
          iter = 100;  // converged
        } else {
          f = fx;
        }
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) break;
  }
  out.push_back(check(x, y));
  return out;
}

SolveResult solve_placement(const SceneGraph& g0, const PlacementSpec& spec) {
  if (g0.nodes.count(spec.new_node.id)) {
    throw ValidationError("node id " + std::to_string(spec.new_node.id) +
                          " already exists; cannot insert");
  }
  std::vector<PlacementCandidate> candidates =
      placement_candidates(g0, spec);
  std::vector<const PlacementCandidate*> survivors;
  double best_any = std::numeric_limits<double>::max();
  for (const PlacementCandidate& c : candidates) {
    best_any = std::min(best_any, c.residual);
    if (c.in_bounds && c.collision_free) survivors.push_back(&c);
  }
  if (survivors.empty()) {
    throw InfeasibleError(
        "no candidate position is inside the room and collision-free "
        "(best residual " +
        num(best_any) + " m)");
  }
  std::sort(survivors.begin(), survivors.end(),
            [](const PlacementCandidate* a, const PlacementCandidate* b) {
              if (std::fabs(a->residual - b->residual) > 1e-12) {
                return a->residual < b->residual;
              }
              if (a->x != b->x) return a->x < b->x;
              return a->y < b->y;
            });
  const PlacementCandidate& pick = *survivors.front();

  const double floor_top =
      world_aabb(find_support_container(g0, "placement")).max.z;
  SolveResult result;
  result.graph = g0;
  Node placed = spec.new_node;
  placed.center_location.x = canonical_round(pick.x);
  placed.center_location.y = canonical_round(pick.y);
  placed.center_location.z =
      canonical_round(floor_top + spec.new_node.dimension.z / 2.0);
  result.graph.nodes.emplace(placed.id, placed);

  // Residual reported at the quantized position actually emitted.
  double ss = 0.0;
  for (const auto& [id, d] : spec.references) {
    const double v = planar_distance(placed.center_location,
                                     g0.nodes.at(id).center_location) -
                     d;
    ss += v * v;
  }
  result.residual = std::sqrt(ss);
  result.steps.push_back({placed.id, placed.center_location,
                          placed.center_location, placed.rotation,
                          placed.rotation, true,
                          "insert at the distance-constrained position"});
  return result;
}

SolveResult solve_instance(const TaskInstance& inst) {
  switch (inst.task) {
    case TaskKind::kSorting:
      return solve_sorting(inst.initial_graph, std::get<SortSpec>(inst.spec));
    case TaskKind::kAlignment:
      return solve_alignment(inst.initial_graph, nullptr);
    default:
      return solve_placement(inst.initial_graph,
                             std::get<PlacementSpec>(inst.spec));
  }
}

namespace {

void add_check(VerifyReport& report, std::string name, bool pass,
               double measured, double expected, double tolerance) {
  report.all_pass = report.all_pass && pass;
  report.checks.push_back(
      {std::move(name), pass, measured, expected, tolerance});
}

void verify_sorting(const TaskInstance& inst, const SceneGraph& candidate,
                    VerifyReport& report) {
  const SortSpec& spec = std::get<SortSpec>(inst.spec);
  std::vector<const Node*> objects;
  for (const auto& [id, n] : candidate.nodes) {
    if (n.node_type != NodeType::kContainer) objects.push_back(&n);
  }
  std::sort(objects.begin(), objects.end(),
            [&](const Node* a, const Node* b) {
              const double ca = axis_coord(a->center_location, spec.axis);
              const double cb = axis_coord(b->center_location, spec.axis);
              if (ca != cb) return ca < cb;
              return a->id < b->id;
            });

  // Support plane: every object's bottom face on support_z.
  double worst_support = 0.0;
  for (const Node* n : objects) {
    worst_support =
        std::max(worst_support, std::fabs(n->center_location.z -
                                          n->dimension.z / 2.0 -
                                          spec.support_z));
  }
  add_check(report, "support-plane", worst_support <= 1e-6, worst_support,
            0.0, 1e-6);

  // Group order: left-to-right labels must be contiguous and follow
  // group_order (restricted to labels that actually occur).
  std::vector<std::string> seen_labels;
  bool label_error = false;
  for (const Node* n : objects) {
    std::string label;
    try {
      label = group_label(*n, spec.group_key);
    } catch (const ValidationError&) {
      label_error = true;
      break;
    }
    if (seen_labels.empty() || seen_labels.back() != label) {
      seen_labels.push_back(label);
    }
  }
  std::vector<std::string> expected_labels;
  for (const std::string& label : spec.group_order) {
    for (const Node* n : objects) {
      try {
        if (group_label(*n, spec.group_key) == label) {
          expected_labels.push_back(label);
          break;
        }
      } catch (const ValidationError&) {
      }
    }
  }
  const bool order_ok = !label_error && seen_labels == expected_labels;
  add_check(report, "group-order", order_ok, order_ok ? 0.0 : 1.0, 0.0, 0.0);

  // Within-group sort and gaps.
  double worst_object_gap = 0.0;
  double worst_group_gap = 0.0;
  bool sort_ok = true;
  const auto extent_of = [&](const Node* n) {
    return spec.axis == Axis::kX ? n->dimension.x : n->dimension.y;
  };
  for (std::size_t i = 0; i + 1 < objects.size(); ++i) {
    const Node* a = objects[i];
    const Node* b = objects[i + 1];
    std::string la, lb;
    try {
      la = group_label(*a, spec.group_key);
      lb = group_label(*b, spec.group_key);
    } catch (const ValidationError&) {
      continue;
    }
    const double gap = (axis_coord(b->center_location, spec.axis) -
                        extent_of(b) / 2.0) -
                       (axis_coord(a->center_location, spec.axis) +
                        extent_of(a) / 2.0);
    if (la == lb) {
      worst_object_gap =
          std::max(worst_object_gap, std::fabs(gap - spec.object_gap));
      const double ka = sort_key_value(*a, spec.sort_key);
      const double kb = sort_key_value(*b, spec.sort_key);
      if (spec.sort_order == SortOrder::kAscending ? ka > kb + 1e-12
                                                   : ka < kb - 1e-12) {
        sort_ok = false;
      }
    } else {
      worst_group_gap =
          std::max(worst_group_gap, std::fabs(gap - spec.group_gap));
    }
  }
  add_check(report, "within-group-sort", sort_ok, sort_ok ? 0.0 : 1.0, 0.0,
            0.0);
  add_check(report, "object-gap", worst_object_gap <= 1e-6, worst_object_gap,
            0.0, 1e-6);
  add_check(report, "group-gap", worst_group_gap <= 1e-6, worst_group_gap,
            0.0, 1e-6);

  // Total span: first leading face to last trailing face.
  if (!objects.empty()) {
    const double span =
        (axis_coord(objects.back()->center_location, spec.axis) +
         extent_of(objects.back()) / 2.0) -
        (axis_coord(objects.front()->center_location, spec.axis) -
         extent_of(objects.front()) / 2.0);
    add_check(report, "span", std::fabs(span - spec.total_span) <= 1e-6,
              span, spec.total_span, 1e-6);
  }
}

void verify_alignment(const TaskInstance& inst, const SceneGraph& candidate,
                      VerifyReport& report) {
  const GridSpec& spec = std::get<GridSpec>(inst.spec);
  // Untouched objects must not move at all.
  double worst_unmoved = 0.0;
  for (const auto& [id, n0] : inst.initial_graph.nodes) {
    if (spec.perturbed_ids.count(id)) continue;
    auto it = candidate.nodes.find(id);
    if (it == candidate.nodes.end()) {
      worst_unmoved = std::numeric_limits<double>::max();
      break;
    }
    const Vec3 d = it->second.center_location - n0.center_location;
    worst_unmoved = std::max(
        worst_unmoved, std::max({std::fabs(d.x), std::fabs(d.y),
                                 std::fabs(d.z)}));
  }
  add_check(report, "settled-objects-unmoved", worst_unmoved <= 1e-12,
            worst_unmoved, 0.0, 1e-12);

  double worst_cell = 0.0;
  double worst_yaw = 0.0;
  for (const auto& [cell, id] : spec.cell_assignment) {
    if (!spec.perturbed_ids.count(id)) continue;
    auto it = candidate.nodes.find(id);
    if (it == candidate.nodes.end()) {
      worst_cell = std::numeric_limits<double>::max();
      break;
    }
    const auto [row, col] = cell;
    const double cx = canonical_round(spec.origin.x + col * spec.pitch_x);
    const double cy = canonical_round(spec.origin.y + row * spec.pitch_y);
    worst_cell = std::max(worst_cell,
                          std::hypot(it->second.center_location.x - cx,
                                     it->second.center_location.y - cy));
    if (it->second.caption) {
      const auto yaw = spec.canonical_rotation.find(
          split_caption(*it->second.caption).category);
      if (yaw != spec.canonical_rotation.end()) {
        worst_yaw = std::max(
            worst_yaw, std::fabs(it->second.rotation.z - yaw->second));
      }
    }
  }
  add_check(report, "displaced-on-cell", worst_cell <= 1e-6, worst_cell, 0.0,
            1e-6);
  add_check(report, "row-orientation", worst_yaw <= 1e-6, worst_yaw, 0.0,
            1e-6);
}

void verify_roomedit(const TaskInstance& inst, const SceneGraph& candidate,
                     VerifyReport& report) {
  const PlacementSpec& spec = std::get<PlacementSpec>(inst.spec);
  auto it = candidate.nodes.find(spec.new_node.id);
  const bool inserted = it != candidate.nodes.end();
  add_check(report, "object-inserted", inserted, inserted ? 1.0 : 0.0, 1.0,
            0.0);
  if (!inserted) return;
  const Node& placed = it->second;

  double worst_dist = 0.0;
  for (const auto& [id, d] : spec.references) {
    auto ref = candidate.nodes.find(id);
    if (ref == candidate.nodes.end()) {
      worst_dist = std::numeric_limits<double>::max();
      break;
    }
    const double measured = planar_distance(placed.center_location,
                                            ref->second.center_location);
    worst_dist = std::max(worst_dist, std::fabs(measured - d));
  }
  // Stated distances are rounded to centimeters, so half a centimeter of
  // slack is inherent; allow the full rounding bound.
  add_check(report, "reference-distances", worst_dist <= 0.01, worst_dist,
            0.0, 0.01);

  const Aabb box = world_aabb(placed);
  const bool in_bounds = box.min.x >= spec.room_bounds.min.x - 1e-9 &&
                         box.min.y >= spec.room_bounds.min.y - 1e-9 &&
                         box.max.x <= spec.room_bounds.max.x + 1e-9 &&
                         box.max.y <= spec.room_bounds.max.y + 1e-9;
  add_check(report, "inside-room", in_bounds, in_bounds ? 0.0 : 1.0, 0.0,
            0.0);

  double worst_unmoved = 0.0;
  for (const auto& [id, n0] : inst.initial_graph.nodes) {
    auto cit = candidate.nodes.find(id);
    if (cit == candidate.nodes.end()) {
      worst_unmoved = std::numeric_limits<double>::max();
      break;
    }
    const Vec3 d = cit->second.center_location - n0.center_location;
    worst_unmoved = std::max(
        worst_unmoved,
        std::max({std::fabs(d.x), std::fabs(d.y), std::fabs(d.z)}));
  }
  add_check(report, "existing-objects-unmoved", worst_unmoved <= 1e-12,
            worst_unmoved, 0.0, 1e-12);
}

}  // namespace

VerifyReport verify(const TaskInstance& inst, const SceneGraph& candidate) {
  VerifyReport report;
  switch (inst.task) {
    case TaskKind::kSorting:
      verify_sorting(inst, candidate, report);
      break;
    case TaskKind::kAlignment:
      verify_alignment(inst, candidate, report);
      break;
    default:
      verify_roomedit(inst, candidate, report);
      break;
  }
  const double coll = collision_score(candidate);
  add_check(report, "collision-free", coll == 1.0, coll, 1.0, 0.0);

  // The candidate must cover exactly the target's node set.
  bool ids_match = candidate.nodes.size() == inst.target_graph.nodes.size();
  if (ids_match) {
    for (const auto& [id, n] : inst.target_graph.nodes) {
      if (!candidate.nodes.count(id)) {
        ids_match = false;
        break;
      }
    }
  }
  add_check(report, "node-set", ids_match, ids_match ? 0.0 : 1.0, 0.0, 0.0);
  return report;
}

}  // namespace layoutlab

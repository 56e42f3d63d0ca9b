#pragma once

#include <optional>
#include <string>
#include <vector>

#include "layoutlab/benchgen.hpp"
#include "layoutlab/scene_graph.hpp"

namespace layoutlab {

struct PoseDelta {
  std::int64_t node_id = 0;
  Vec3 old_center, new_center;
  Vec3 old_rotation, new_rotation;
  bool inserted = false;  // node did not exist in the input graph
  std::string reason;
};

struct SolveResult {
  SceneGraph graph;
  double residual = 0.0;
  std::vector<PoseDelta> steps;
};

/// Re-apply recorded steps to the input graph. Inserted nodes take their
/// dimensions/caption from `inserted_template` (the placement spec's new
/// node). Used to check that steps fully explain a solution.
SceneGraph apply_steps(const SceneGraph& g0,
                       const std::vector<PoseDelta>& steps,
                       const Node* inserted_template = nullptr);

/// Deterministic layout for the sorting constraints: groups ordered per
/// spec.group_order, members sorted by the sort key, positions laid out by
/// prefix sums starting at (table center - total_span/2) along the axis;
/// the off-axis coordinate snaps to the table center line and z to the
/// support plane. residual = |achieved span - total_span|.
SolveResult solve_sorting(const SceneGraph& g0, const SortSpec& spec);

struct AlignmentParams {
  // Outlier when the center is farther than this fraction of the pitch
  // (max over axes) from every lattice point.
  double outlier_threshold = 0.25;
  // Coordinates closer than this are the same grid line.
  double coord_tol = 1e-6;
};

/// Restore displaced objects onto the grid. Without a hint the lattice is
/// inferred: rows are repeated y values, pitches come from consecutive
/// coordinate differences, outliers are re-seated on vacant cells of the
/// row holding their category, and their yaw resets to the row's most
/// common value. Nodes not flagged as outliers are never touched. With a
/// hint the perturbed ids are placed directly on their assigned cells.
SolveResult solve_alignment(const SceneGraph& g0,
                            const GridSpec* hint = nullptr,
                            const AlignmentParams& params = {});

struct PlacementCandidate {
  double x = 0.0;
  double y = 0.0;
  double residual = 0.0;
  bool in_bounds = false;
  bool collision_free = false;
};

/// Candidate positions for the new object before filtering: two references
/// give the circle-circle intersection pair, three give the refined
/// least-squares point. Exposed for the generator's feasibility gates and
/// for grid-search comparisons.
std::vector<PlacementCandidate> placement_candidates(
    const SceneGraph& g0, const PlacementSpec& spec);

/// Place the new object: z sits on the floor plane, (x, y) solves the
/// distance constraints; candidates outside room bounds or colliding with
/// existing nodes are discarded; the smallest-residual survivor wins, ties
/// broken by ascending (x, y). residual = root-sum-square distance
/// violation at the chosen (quantized) position.
SolveResult solve_placement(const SceneGraph& g0, const PlacementSpec& spec);

/// Route an instance to its task's solver (alignment runs un-hinted).
SolveResult solve_instance(const TaskInstance& inst);

struct ConstraintCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
};

struct VerifyReport {
  bool all_pass = true;
  std::vector<ConstraintCheck> checks;
};

/// Check a candidate graph against the instance's spec constraint by
/// constraint (orders, gaps, span, lattice deviations, distances,
/// collisions) — independent of the IoU pipeline.
VerifyReport verify(const TaskInstance& inst, const SceneGraph& candidate);

}  // namespace layoutlab

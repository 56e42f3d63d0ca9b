#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "layoutlab/metrics.hpp"
#include "layoutlab/scene_graph.hpp"

namespace layoutlab {

enum class TaskKind { kSorting, kAlignment, kRoomedit };

std::string_view task_name(TaskKind t);
std::optional<TaskKind> task_from_name(std::string_view name);

enum class GroupKey { kShape, kColor, kCategory };
enum class SortKeyKind { kHeight, kWidth, kVolume };
enum class SortOrder { kAscending, kDescending };

std::string_view group_key_name(GroupKey k);
std::string_view sort_key_name(SortKeyKind k);
std::string_view sort_order_name(SortOrder o);

/// Full constraint set for the sorting task: partition objects into groups,
/// order the groups left-to-right, order members inside each group, and lay
/// everything out along one axis with fixed gaps on a common support plane.
struct SortSpec {
  GroupKey group_key = GroupKey::kShape;
  SortKeyKind sort_key = SortKeyKind::kHeight;
  SortOrder sort_order = SortOrder::kAscending;
  std::vector<std::string> group_order;  // labels, left to right
  Axis axis = Axis::kX;
  double total_span = 0.0;   // sum of extents + gaps, meters
  double group_gap = 0.0;    // face-to-face between adjacent groups
  double object_gap = 0.0;   // face-to-face inside a group
  double support_z = 0.0;    // height of the support surface
};

/// Target lattice for the alignment task. Cell (r, c) has its center at
/// origin + (c * pitch_x, r * pitch_y); every row holds one object
/// category, with a canonical yaw per category.
struct GridSpec {
  int rows = 0;
  int cols = 0;
  Vec3 origin;
  double pitch_x = 0.0;
  double pitch_y = 0.0;
  std::map<std::pair<int, int>, std::int64_t> cell_assignment;
  std::map<std::string, double> canonical_rotation;  // category -> yaw
  std::set<std::int64_t> perturbed_ids;
};

/// Insertion request for the room-editing task: a new object plus its
/// distances (floor-plan, center-to-center) to existing reference objects.
struct PlacementSpec {
  Node new_node;  // dimensions + caption; center is a placeholder
  std::vector<std::pair<std::int64_t, double>> references;
  Aabb room_bounds;
};

struct TaskInstance {
  std::string id;
  TaskKind task = TaskKind::kSorting;
  std::uint64_t seed = 0;
  std::string instruction;
  std::variant<SortSpec, GridSpec, PlacementSpec> spec;
  SceneGraph initial_graph;
  SceneGraph target_graph;
};

/// Generator knobs. Unset optionals are sampled per instance from the
/// documented default ranges, so one seed yields a varied dataset.
struct SortingOptions {
  std::optional<int> n_objects;  // default range [4, 12]
  std::optional<double> object_gap;  // default range [0.02, 0.10], 1 mm grid
  std::optional<double> group_gap;   // default range [0.15, 0.40], 1 mm grid
  std::optional<Axis> axis;          // default: coin flip
};

struct AlignmentOptions {
  std::optional<int> rows;              // default range [3, 5]
  std::optional<int> cols;              // default range [3, 6]
  std::optional<double> perturb_fraction;  // default range [0.2, 0.4]
};

struct RoomeditOptions {
  std::optional<int> n_existing;  // default range [3, 8]
  std::optional<int> n_refs;      // default: coin flip between 2 and 3
};

/// Each generator is a pure function of (seed, index, options): the same
/// triple always returns a byte-identical instance, and instances with
/// different indices are independent.
TaskInstance gen_sorting(std::uint64_t seed, std::uint64_t index,
                         const SortingOptions& opts = {});
TaskInstance gen_alignment(std::uint64_t seed, std::uint64_t index,
                           const AlignmentOptions& opts = {});
TaskInstance gen_roomedit(std::uint64_t seed, std::uint64_t index,
                          const RoomeditOptions& opts = {});

/// Largest perturbation count for an N x M grid that keeps at least two
/// settled objects in every row and at least one in every column.
int max_perturbable(int rows, int cols);

/// One manifest line: {"id","task","seed","instruction","spec",
/// "initial_graph","target_graph"} with canonical number formatting.
std::string instance_to_json(const TaskInstance& inst);
TaskInstance parse_task_instance(std::string_view line);

/// JSONL manifest IO. Reading validates every record.
void write_dataset(const std::vector<TaskInstance>& instances,
                   const std::string& path);
std::vector<TaskInstance> read_dataset(const std::string& path);

}  // namespace layoutlab

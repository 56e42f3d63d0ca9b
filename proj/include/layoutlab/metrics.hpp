#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "layoutlab/scene_graph.hpp"

namespace layoutlab {

/// Intersection-over-union of two axis-aligned boxes.
/// Throws std::domain_error if either box has zero volume.
double iou3d(const Aabb& a, const Aabb& b);

enum class MatchedBy { kCaption, kGeometry };

struct MatchPair {
  std::int64_t pred_id = 0;
  std::int64_t gt_id = 0;
  double iou = 0.0;
  MatchedBy matched_by = MatchedBy::kGeometry;
};

struct Matching {
  std::vector<MatchPair> pairs;
  std::vector<std::int64_t> unmatched_pred;
  std::vector<std::int64_t> unmatched_gt;
};

/// One-to-one node correspondence. Stage 1 pairs nodes whose normalized
/// caption occurs exactly once in each graph; stage 2 pairs the rest
/// greedily by descending IoU (only IoU > 0), ties broken by ascending
/// (pred_id, gt_id). Deterministic for equal inputs.
Matching match_nodes(const SceneGraph& pred, const SceneGraph& gt);

/// Sum of matched-pair IoUs divided by |pred nodes|. Extra predicted nodes
/// dilute the score through the denominator. Empty pred scores 0.
double iou_reward(const SceneGraph& pred, const SceneGraph& gt);
double iou_reward(const Matching& m, std::size_t pred_node_count);

/// 1 − (colliding pairs)/(non-container nodes), clamped to [0,1].
/// A pair collides when its boxes share more than `eps` volume.
/// Container nodes (tables, rooms, shelves) are exempt: things are
/// supposed to overlap them. No objects → 1.
double collision_score(const SceneGraph& g, double eps = 1e-6);

/// Mean Euclidean distance between matched centers; absent when nothing
/// matched.
std::optional<double> center_distance(const SceneGraph& pred,
                                      const SceneGraph& gt);
std::optional<double> center_distance(const SceneGraph& pred,
                                      const SceneGraph& gt,
                                      const Matching& m);

/// Fraction of predicted nodes whose matched IoU reaches `threshold`.
double iou_at(const SceneGraph& pred, const SceneGraph& gt, double threshold);
double iou_at(const Matching& m, std::size_t pred_node_count,
              double threshold);

enum class Axis { kX, kY, kZ };

double axis_coord(const Vec3& v, Axis axis);

/// Levenshtein distance with unit insert/delete/substitute costs.
std::size_t levenshtein(const std::vector<std::int64_t>& a,
                        const std::vector<std::int64_t>& b);

/// Non-container node ids of `g` ordered by center coordinate along
/// `axis`, ties broken by ascending id.
std::vector<std::int64_t> order_along_axis(const SceneGraph& g, Axis axis);

/// Levenshtein distance between the two graphs' object orders along `axis`.
std::size_t edit_distance(const SceneGraph& pred, const SceneGraph& gt,
                          Axis axis);

}  // namespace layoutlab

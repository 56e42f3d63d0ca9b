#include "layoutlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "layoutlab/text.hpp"

namespace layoutlab {

double iou3d(const Aabb& a, const Aabb& b) {
  const double va = aabb_volume(a);
  const double vb = aabb_volume(b);
  if (va <= 0.0 || vb <= 0.0) {
    throw std::domain_error("iou3d requires boxes with positive volume");
  }
  const double inter = intersection_volume(a, b);
  return inter / (va + vb - inter);
}

Matching match_nodes(const SceneGraph& pred, const SceneGraph& gt) {
  Matching m;
  std::set<std::int64_t> used_pred;
  std::set<std::int64_t> used_gt;

  // Stage 1: captions that occur exactly once on each side.
  std::map<std::string, std::vector<std::int64_t>> pred_caps;
  std::map<std::string, std::vector<std::int64_t>> gt_caps;
  for (const auto& [id, n] : pred.nodes) {
    if (n.caption) pred_caps[normalize_caption(*n.caption)].push_back(id);
  }
  for (const auto& [id, n] : gt.nodes) {
    if (n.caption) gt_caps[normalize_caption(*n.caption)].push_back(id);
  }
  for (const auto& [cap, pred_ids] : pred_caps) {
    if (pred_ids.size() != 1) continue;
    auto it = gt_caps.find(cap);
    if (it == gt_caps.end() || it->second.size() != 1) continue;
    const std::int64_t pid = pred_ids.front();
    const std::int64_t gid = it->second.front();
    const double iou =
        iou3d(world_aabb(pred.nodes.at(pid)), world_aabb(gt.nodes.at(gid)));
    m.pairs.push_back({pid, gid, iou, MatchedBy::kCaption});
    used_pred.insert(pid);
    used_gt.insert(gid);
  }
  // Caption iteration above is map-ordered; re-order pairs by pred id so
  // the result does not depend on caption spelling.
  std::sort(m.pairs.begin(), m.pairs.end(),
            [](const MatchPair& a, const MatchPair& b) {
              return a.pred_id < b.pred_id;
            });

  // Stage 2: greedy geometric matching of the leftovers.
  struct Candidate {
    double iou;
    std::int64_t pred_id;
    std::int64_t gt_id;
  };
  std::vector<Candidate> candidates;
  for (const auto& [pid, pn] : pred.nodes) {
    if (used_pred.count(pid)) continue;
    const Aabb pbox = world_aabb(pn);
    for (const auto& [gid, gn] : gt.nodes) {
      if (used_gt.count(gid)) continue;
      const double iou = iou3d(pbox, world_aabb(gn));
      if (iou > 0.0) candidates.push_back({iou, pid, gid});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.iou != b.iou) return a.iou > b.iou;
              if (a.pred_id != b.pred_id) return a.pred_id < b.pred_id;
              return a.gt_id < b.gt_id;
            });
  for (const Candidate& c : candidates) {
    if (used_pred.count(c.pred_id) || used_gt.count(c.gt_id)) continue;
    m.pairs.push_back({c.pred_id, c.gt_id, c.iou, MatchedBy::kGeometry});
    used_pred.insert(c.pred_id);
    used_gt.insert(c.gt_id);
  }

  for (const auto& [pid, n] : pred.nodes) {
    if (!used_pred.count(pid)) m.unmatched_pred.push_back(pid);
  }
  for (const auto& [gid, n] : gt.nodes) {
    if (!used_gt.count(gid)) m.unmatched_gt.push_back(gid);
  }
  return m;
}

double iou_reward(const Matching& m, std::size_t pred_node_count) {
  if (pred_node_count == 0) return 0.0;
  double total = 0.0;
  for (const MatchPair& p : m.pairs) total += p.iou;
  return total / static_cast<double>(pred_node_count);
}

double iou_reward(const SceneGraph& pred, const SceneGraph& gt) {
  return iou_reward(match_nodes(pred, gt), pred.nodes.size());
}

double collision_score(const SceneGraph& g, double eps) {
  std::vector<const Node*> objects;
  for (const auto& [id, n] : g.nodes) {
    if (n.node_type != NodeType::kContainer) objects.push_back(&n);
  }
  const std::size_t n_objects = objects.size();
  if (n_objects == 0) return 1.0;
  std::size_t colliding = 0;
  for (std::size_t i = 0; i < n_objects; ++i) {
    const Aabb a = world_aabb(*objects[i]);
    for (std::size_t j = i + 1; j < n_objects; ++j) {
      if (intersection_volume(a, world_aabb(*objects[j])) > eps) ++colliding;
    }
  }
  const double score =
      1.0 - static_cast<double>(colliding) / static_cast<double>(n_objects);
  return std::clamp(score, 0.0, 1.0);
}

std::optional<double> center_distance(const SceneGraph& pred,
                                      const SceneGraph& gt,
                                      const Matching& m) {
  if (m.pairs.empty()) return std::nullopt;
  double total = 0.0;
  for (const MatchPair& p : m.pairs) {
    const Vec3 d = pred.nodes.at(p.pred_id).center_location -
                   gt.nodes.at(p.gt_id).center_location;
    total += std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
  }
  return total / static_cast<double>(m.pairs.size());
}

std::optional<double> center_distance(const SceneGraph& pred,
                                      const SceneGraph& gt) {
  return center_distance(pred, gt, match_nodes(pred, gt));
}

double iou_at(const Matching& m, std::size_t pred_node_count,
              double threshold) {
  if (pred_node_count == 0) return 0.0;
  std::size_t hits = 0;
  for (const MatchPair& p : m.pairs) {
    if (p.iou >= threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pred_node_count);
}

double iou_at(const SceneGraph& pred, const SceneGraph& gt,
              double threshold) {
  return iou_at(match_nodes(pred, gt), pred.nodes.size(), threshold);
}

double axis_coord(const Vec3& v, Axis axis) {
  switch (axis) {
    case Axis::kX: return v.x;
    case Axis::kY: return v.y;
    default: return v.z;
  }
}

std::size_t levenshtein(const std::vector<std::int64_t>& a,
                        const std::vector<std::int64_t>& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::vector<std::int64_t> order_along_axis(const SceneGraph& g, Axis axis) {
  std::vector<std::int64_t> ids;
  for (const auto& [id, n] : g.nodes) {
    if (n.node_type != NodeType::kContainer) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end(),
            [&](std::int64_t a, std::int64_t b) {
              const double ca = axis_coord(g.nodes.at(a).center_location, axis);
              const double cb = axis_coord(g.nodes.at(b).center_location, axis);
              if (ca != cb) return ca < cb;
              return a < b;
            });
  return ids;
}

std::size_t edit_distance(const SceneGraph& pred, const SceneGraph& gt,
                          Axis axis) {
  return levenshtein(order_along_axis(pred, axis),
                     order_along_axis(gt, axis));
}

}  // namespace layoutlab

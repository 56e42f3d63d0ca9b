#include "layoutlab/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace layoutlab {

std::vector<double> group_advantages(const std::vector<double>& rewards,
                                     double std_floor) {
  const std::size_t g = rewards.size();
  std::vector<double> adv(g, 0.0);
  if (g == 0) return adv;
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(g);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(g);
  const double std_dev = std::sqrt(var);
  if (std_dev < std_floor) return adv;  // constant group: no signal
  for (std::size_t i = 0; i < g; ++i) adv[i] = (rewards[i] - mean) / std_dev;
  return adv;
}

std::vector<double> token_ratio(const std::vector<double>& logp_new,
                                const std::vector<double>& logp_old) {
  if (logp_new.size() != logp_old.size()) {
    throw std::invalid_argument("token_ratio: length mismatch");
  }
  std::vector<double> out(logp_new.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = std::exp(logp_new[t] - logp_old[t]);
  }
  return out;
}

std::vector<double> kl_penalty(const std::vector<double>& logp_new,
                               const std::vector<double>& logp_ref) {
  if (logp_new.size() != logp_ref.size()) {
    throw std::invalid_argument("kl_penalty: length mismatch");
  }
  std::vector<double> out(logp_new.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    const double log_u = logp_ref[t] - logp_new[t];
    const double u = std::exp(log_u);
    // Convex in u with minimum 0 at u = 1; clamp tiny negative round-off.
    out[t] = std::max(0.0, u - log_u - 1.0);
  }
  return out;
}

GrpoResult grpo_objective(const RolloutGroup& group, const GrpoConfig& cfg) {
  const std::size_t g = group.rewards.size();
  if (g == 0) throw std::invalid_argument("grpo_objective: empty group");
  if (group.logp_new.size() != g || group.logp_old.size() != g ||
      group.logp_ref.size() != g) {
    throw std::invalid_argument(
        "grpo_objective: rewards and log-prob arrays disagree on group size");
  }
  GrpoResult result;
  result.advantages = group_advantages(group.rewards, cfg.std_floor);
  result.per_sample.resize(g, 0.0);

  const double lo = 1.0 - cfg.clip_eps;
  const double hi = 1.0 + cfg.clip_eps;
  std::size_t total_tokens = 0;
  std::size_t clipped_tokens = 0;
  double kl_sum = 0.0;
  double objective = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const std::size_t len = group.logp_new[i].size();
    if (group.logp_old[i].size() != len || group.logp_ref[i].size() != len) {
      throw std::invalid_argument("grpo_objective: sample " +
                                  std::to_string(i) +
                                  " has mismatched token lengths");
    }
    const std::vector<double> ratios =
        token_ratio(group.logp_new[i], group.logp_old[i]);
    const std::vector<double> kls =
        kl_penalty(group.logp_new[i], group.logp_ref[i]);
    const double adv = result.advantages[i];
    double sample_sum = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
      const double clipped = std::clamp(ratios[t], lo, hi);
      const double unclipped_term = ratios[t] * adv;
      const double clipped_term = clipped * adv;
      const double surrogate = std::min(unclipped_term, clipped_term);
      if (clipped_term < unclipped_term) ++clipped_tokens;
      sample_sum += surrogate - cfg.kl_beta * kls[t];
      kl_sum += kls[t];
    }
    total_tokens += len;
    result.per_sample[i] =
        len == 0 ? 0.0 : sample_sum / static_cast<double>(len);
    objective += result.per_sample[i];
  }
  result.objective = objective / static_cast<double>(g);
  result.clip_fraction =
      total_tokens == 0
          ? 0.0
          : static_cast<double>(clipped_tokens) / static_cast<double>(total_tokens);
  result.mean_kl =
      total_tokens == 0 ? 0.0 : kl_sum / static_cast<double>(total_tokens);
  return result;
}

}  // namespace layoutlab

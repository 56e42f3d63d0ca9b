#pragma once

#include <cstddef>
#include <vector>

namespace layoutlab {

/// One group of sampled rollouts for a single prompt: scalar rewards plus
/// per-token log-probabilities under the current, previous, and reference
/// policies. The three log-prob rows of a sample must share one length.
struct RolloutGroup {
  std::vector<double> rewards;
  std::vector<std::vector<double>> logp_new;
  std::vector<std::vector<double>> logp_old;
  std::vector<std::vector<double>> logp_ref;
};

struct GrpoConfig {
  double clip_eps = 0.2;    // clipping half-width for the ratio
  double kl_beta = 0.01;    // weight of the KL penalty
  double std_floor = 1e-8;  // below this the group is treated as constant
};

struct GrpoResult {
  double objective = 0.0;
  std::vector<double> advantages;       // one per sample
  std::vector<double> per_sample;       // token-mean objective per sample
  double clip_fraction = 0.0;           // tokens where the clip branch bound
  double mean_kl = 0.0;                 // token-mean of the KL estimator
};

/// Reward normalization across the group: (r_i - mean) / population std.
/// Degenerate groups (std below `std_floor`, including size 1) get all-zero
/// advantages instead of a blow-up.
std::vector<double> group_advantages(const std::vector<double>& rewards,
                                     double std_floor = 1e-8);

/// exp(logp_new - logp_old), elementwise.
std::vector<double> token_ratio(const std::vector<double>& logp_new,
                                const std::vector<double>& logp_old);

/// Non-negative per-token KL estimator u - log(u) - 1 with
/// u = exp(logp_ref - logp_new); zero exactly when the policies agree.
std::vector<double> kl_penalty(const std::vector<double>& logp_new,
                               const std::vector<double>& logp_ref);

/// Clipped-surrogate objective with KL regularization. Per token:
///   min(ratio * A, clip(ratio, 1-eps, 1+eps) * A) - beta * kl
/// averaged over each sample's tokens, then over the group.
/// Throws std::invalid_argument on shape mismatches or an empty group.
GrpoResult grpo_objective(const RolloutGroup& group,
                          const GrpoConfig& cfg = {});

}  // namespace layoutlab

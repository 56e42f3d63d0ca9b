#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "layoutlab/grpo.hpp"
#include "layoutlab/rng.hpp"

using namespace layoutlab;

namespace {

RolloutGroup uniform_group(const std::vector<double>& rewards, int tokens,
                           double logp = -1.0) {
  RolloutGroup g;
  g.rewards = rewards;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    g.logp_new.emplace_back(tokens, logp);
    g.logp_old.emplace_back(tokens, logp);
    g.logp_ref.emplace_back(tokens, logp);
  }
  return g;
}

}  // namespace

TEST_CASE("group_advantages normalizes by the population std") {
  const auto adv = group_advantages({1.0, 2.0, 3.0});
  REQUIRE(adv.size() == 3);
  // std = sqrt(2/3), advantages = ±sqrt(3/2).
  const double expect = std::sqrt(1.5);
  CHECK(adv[0] == doctest::Approx(-expect).epsilon(1e-12));
  CHECK(adv[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(adv[2] == doctest::Approx(expect).epsilon(1e-12));
  CHECK(adv[2] == doctest::Approx(1.2247448714).epsilon(1e-9));
}

TEST_CASE("degenerate reward groups get exactly zero advantages") {
  for (const auto& rewards : {std::vector<double>{0.7, 0.7, 0.7, 0.7},
                              std::vector<double>{1.4},
                              std::vector<double>{0.0, 0.0}}) {
    const auto adv = group_advantages(rewards);
    REQUIRE(adv.size() == rewards.size());
    for (double a : adv) CHECK(a == 0.0);
  }
}

TEST_CASE("advantages are invariant to reward shifts") {
  Pcg32 rng(5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.next_below(6);
    std::vector<double> rewards(n);
    for (double& r : rewards) r = rng.uniform(-2.0, 2.0);
    const double shift = rng.uniform(-100.0, 100.0);
    std::vector<double> shifted = rewards;
    for (double& r : shifted) r += shift;
    const auto a = group_advantages(rewards);
    const auto b = group_advantages(shifted);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::fabs(a[i] - b[i]) < 1e-9);
    }
  }
}

TEST_CASE("token_ratio exponentiates log-prob gaps") {
  const auto r = token_ratio({-1.0, -2.0, -0.5}, {-1.0, -1.0, -1.5});
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(r[2] == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
}

TEST_CASE("kl estimator is zero on agreement and positive otherwise") {
  const auto zero = kl_penalty({-1.0, -2.0}, {-1.0, -2.0});
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  // u = e^0.5 -> kl = e^0.5 - 0.5 - 1.
  const auto kl = kl_penalty({-1.5}, {-1.0});
  CHECK(kl[0] == doctest::Approx(std::exp(0.5) - 1.5).epsilon(1e-12));
  CHECK(kl[0] == doctest::Approx(0.148721270700128).epsilon(1e-12));

  Pcg32 rng(8, 1);
  for (int i = 0; i < 500; ++i) {
    const double ln = rng.uniform(-8.0, 0.0);
    const double lr = rng.uniform(-8.0, 0.0);
    const auto v = kl_penalty({ln}, {lr});
    CHECK(v[0] >= 0.0);
  }
}

TEST_CASE("clipped surrogate bounds optimistic ratios") {
  // Two samples, rewards 1 and 3 -> advantages -1 and +1. Sample 2 has a
  // ratio of 2 everywhere; with eps = 0.2 the clip branch gives 1.2 * 1.
  // Sample 1 sits at ratio 1 so its objective is just its advantage.
  RolloutGroup g;
  g.rewards = {1.0, 3.0};
  g.logp_new = {{-1.0, -1.0}, {-1.0 + std::log(2.0), -1.0 + std::log(2.0)}};
  g.logp_old = {{-1.0, -1.0}, {-1.0, -1.0}};
  g.logp_ref = g.logp_new;  // no KL contribution
  GrpoConfig cfg;
  cfg.clip_eps = 0.2;
  cfg.kl_beta = 0.01;
  const GrpoResult res = grpo_objective(g, cfg);
  REQUIRE(res.per_sample.size() == 2);
  CHECK(res.advantages[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(res.advantages[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.per_sample[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(res.per_sample[1] == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(res.objective == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(res.clip_fraction == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(res.mean_kl == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("negative advantages clip on the pessimistic side") {
  // Ratio 0.5 with advantage -1: min(0.5 * -1, 0.8 * -1) = -0.8.
  RolloutGroup g;
  g.rewards = {3.0, 1.0};
  g.logp_new = {{-1.0}, {-1.0 + std::log(0.5)}};
  g.logp_old = {{-1.0}, {-1.0}};
  g.logp_ref = g.logp_new;
  const GrpoResult res = grpo_objective(g, GrpoConfig{0.2, 0.0, 1e-8});
  CHECK(res.per_sample[1] == doctest::Approx(-0.8).epsilon(1e-12));
  CHECK(res.clip_fraction == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("kl penalty subtracts from the objective") {
  RolloutGroup g = uniform_group({0.0, 2.0}, 4);
  // Push logp_new away from logp_ref on every token of both samples.
  for (auto& row : g.logp_new) {
    for (double& v : row) v = -0.5;
  }
  for (auto& row : g.logp_old) {
    for (double& v : row) v = -0.5;  // ratio stays 1, surrogate = advantage
  }
  const double u = std::exp(-1.0 + 0.5);
  const double kl = u - std::log(u) - 1.0;
  GrpoConfig cfg;
  cfg.kl_beta = 0.3;
  const GrpoResult res = grpo_objective(g, cfg);
  CHECK(res.mean_kl == doctest::Approx(kl).epsilon(1e-12));
  // Advantages are ±1 and cancel; only the KL term remains.
  CHECK(res.objective == doctest::Approx(-0.3 * kl).epsilon(1e-12));
}

TEST_CASE("objective is invariant to shifting all rewards") {
  Pcg32 rng(13, 7);
  int trials_run = 0;
  while (trials_run < 50) {
    const std::size_t n = 2 + rng.next_below(4);
    RolloutGroup g;
    for (std::size_t i = 0; i < n; ++i) {
      g.rewards.push_back(rng.uniform(0.0, 2.0));
      const std::size_t tokens = 1 + rng.next_below(6);
      std::vector<double> ln(tokens), lo(tokens), lr(tokens);
      for (std::size_t t = 0; t < tokens; ++t) {
        ln[t] = rng.uniform(-3.0, 0.0);
        lo[t] = rng.uniform(-3.0, 0.0);
        lr[t] = rng.uniform(-3.0, 0.0);
      }
      g.logp_new.push_back(ln);
      g.logp_old.push_back(lo);
      g.logp_ref.push_back(lr);
    }
    // Skip near-degenerate groups where rounding in the mean dominates.
    double mean = 0.0;
    for (double r : g.rewards) mean += r;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double r : g.rewards) var += (r - mean) * (r - mean);
    if (std::sqrt(var / static_cast<double>(n)) < 0.05) continue;
    ++trials_run;
    RolloutGroup shifted = g;
    const double shift = rng.uniform(-10.0, 10.0);
    for (double& r : shifted.rewards) r += shift;
    const GrpoResult a = grpo_objective(g);
    const GrpoResult b = grpo_objective(shifted);
    CHECK(std::fabs(a.objective - b.objective) < 1e-9);
    CHECK(a.clip_fraction == b.clip_fraction);
  }
}

TEST_CASE("shape mismatches are rejected") {
  RolloutGroup empty;
  CHECK_THROWS_AS(grpo_objective(empty), std::invalid_argument);

  RolloutGroup missing_row = uniform_group({1.0, 2.0}, 3);
  missing_row.logp_old.pop_back();
  CHECK_THROWS_AS(grpo_objective(missing_row), std::invalid_argument);

  RolloutGroup ragged = uniform_group({1.0, 2.0}, 3);
  ragged.logp_ref[1].push_back(-1.0);
  CHECK_THROWS_AS(grpo_objective(ragged), std::invalid_argument);

  // Zero-length token rows are legal: the sample contributes nothing.
  const GrpoResult res = grpo_objective(uniform_group({1.0, 2.0}, 0));
  CHECK(res.objective == 0.0);
  CHECK(res.clip_fraction == 0.0);
}

TEST_CASE("extreme log-probabilities stay finite") {
  RolloutGroup g;
  g.rewards = {0.0, 1.0};
  g.logp_new = {{-100.0}, {-1e-9}};
  g.logp_old = {{-1.0}, {-50.0}};
  g.logp_ref = {{-1.0}, {-100.0}};
  const GrpoResult res = grpo_objective(g);
  CHECK(std::isfinite(res.objective));
  CHECK(std::isfinite(res.mean_kl));
  for (double v : res.per_sample) CHECK(std::isfinite(v));
}

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pdlab/checkpoint.hpp"
#include "pdlab/env.hpp"
#include "pdlab/policy.hpp"
#include "pdlab/sac.hpp"

namespace pdlab {

// One collection decision: with probability epsilon the actor contributes a
// bounded residual on top of the frozen bias, otherwise the bias acts alone.
// Exactly one draw is taken from gate_rng per call; actor_rng is consumed
// only when the gate fires.
struct BehaviorAction {
  Vec executed;         // clipped to [-1, 1] after summation
  Vec base_action;      // the frozen contribution (bias) at obs
  Vec residual_action;  // executed - base_action, exactly
  bool gate_on = false;
};

BehaviorAction behavior_action(
    const Vec& obs, const std::function<Vec(const Vec&)>& bias,
    const SacCore& core,
    const std::function<Vec(const Vec& obs, const Vec& base)>& psi,
    double epsilon, Rng& gate_rng, Rng& actor_rng);

// Method-specific pieces plugged into the shared online loop. Every
// training routine (decorator, vanilla residual, fine-tuning variants,
// JSRL-lite, scratch SAC) is this loop with different hooks, which is what
// makes the reduction identities hold step-for-step.
struct LoopHooks {
  // Frozen per-state contribution to the executed action: the base policy
  // for residual methods, the selected cluster center for offset-only
  // fine-tuning, zero for from-scratch or full fine-tuning.
  std::function<Vec(const Vec& obs)> bias;
  // Actor featurizer: obs, obs || base, or frozen trunk features.
  std::function<Vec(const Vec& obs, const Vec& base)> psi;
  // Optional episode prefix rolled by a frozen policy before the learner
  // acts (JSRL-lite, horizon-shortened fine-tuning). Prefix steps consume
  // budget but are not stored and draw nothing from the gate/actor streams.
  std::function<int()> prefix_len;                  // queried at each reset
  std::function<Vec(const Vec& obs)> prefix_policy; // required if prefix_len
  // Called after each periodic evaluation (JSRL's h-adaptation hangs here).
  std::function<void(long long step, double success)> on_eval;
  std::string refined_name = "refined";
};

struct LoopConfig {
  long long H = 0;        // exploration-schedule horizon; 0 = epsilon fixed at 1
  bool per_episode_gate = false;  // resample the gate once per episode
  long long total_env_steps = 300000;
  long long eval_interval_steps = 5000;
  int eval_episodes = 50;
  std::uint64_t seed = 0;
};

struct CurvePoint {
  long long step = 0;
  double eval_success_rate = 0.0;
  int eval_episodes = 0;
  double epsilon = 0.0;
  double wall_seconds = 0.0;
};

struct RunResult {
  std::vector<CurvePoint> curve;
  PolicyHandle refined;  // clip(bias + scale * actor_mean), deterministic
  std::shared_ptr<SacCore> core;
  std::shared_ptr<ReplayBuffer> buffer;
  long long gate_on_steps = 0;
  long long learner_steps = 0;       // collection steps (gate logic ran)
  long long prefix_steps_total = 0;  // budget consumed by episode prefixes
  double final_success = 0.0;
  double best_success = 0.0;
  Json extra;  // method-specific annotations (filled by callers)
};

// Rolls `prefix_len` steps of `prefix_policy` (when nonzero) and then
// `policy` until the episode ends; episode seeds derive from
// (seed, "eval_episode", index) exactly as env_success_rate does.
double evaluate_policy(const EnvSpec& spec, const PolicyHandle& policy,
                       const std::function<Vec(const Vec&)>& prefix_policy,
                       int prefix_len, int episodes, std::uint64_t seed);

// The shared collection/update/evaluation loop. Named RNG streams are
// derived from cfg.seed: "episode" (env resets), "gate", "actor_noise",
// "update" (batch indices + update noise), "eval".
RunResult run_online_loop(const LoopConfig& cfg, const EnvSpec& spec,
                          std::shared_ptr<SacCore> core,
                          const LoopHooks& hooks);

}  // namespace pdlab

#pragma once

#include "pdlab/bc.hpp"
#include "pdlab/loop.hpp"

namespace pdlab {

// Wraps a black-box policy with the base-policy contract: every action must
// be finite with components in [-1, 1]. Violations throw Error, naming the
// wrapped policy.
PolicyHandle checked_base(const PolicyHandle& base);

struct DecoratorConfig {
  double alpha = 0.1;   // residual bound (fraction of the action range)
  long long H = 50000;  // exploration-schedule horizon in env steps
  ActorInput actor_input = ActorInput::obs_only;
  CriticActionInput critic_action_input = CriticActionInput::sum;
  bool per_episode_gate = false;
  SacConfig sac;
  long long total_env_steps = 300000;
  long long eval_interval_steps = 5000;
  int eval_episodes = 50;
  std::uint64_t seed = 0;
};

// The Policy Decorator: bounded residual SAC on top of the frozen base with
// the progressive epsilon gate. The returned refined policy is
// clip(base(s) + alpha * squash(actor_mean(s))).
RunResult train_decorator(const DecoratorConfig& cfg, const PolicyHandle& base,
                          const EnvSpec& spec);

// Shared knobs for the comparison methods.
struct BaselineConfig {
  SacConfig sac;
  long long total_env_steps = 300000;
  long long eval_interval_steps = 5000;
  int eval_episodes = 50;
  std::uint64_t seed = 0;
};

// Unbounded, unscheduled residual RL: exactly train_decorator with alpha=1
// and H=0 (curves are bit-identical under a shared seed).
RunResult run_vanilla_residual(const PolicyHandle& base, const EnvSpec& spec,
                               const BaselineConfig& cfg);

enum class FinetuneMode { full, offset_only };

// SAC fine-tuning with the actor initialized from the cloned base policy
// (critics fresh). full: the whole tanh-head MLP becomes the actor's mean
// path. offset_only: trunk, classification head, and cluster centers stay
// frozen; the actor is the offset head acting on frozen trunk features.
// Requires a tanh-head base; offset_only additionally requires a
// cluster_offset base (ConfigError otherwise).
RunResult run_sac_finetune(const BasePolicy& base, FinetuneMode mode,
                           const EnvSpec& spec, const BaselineConfig& cfg);

struct JsrlConfig {
  BaselineConfig run;
  int probe_episodes = 100;  // measure the guide's mean success length
  int window = 5;            // evaluations per moving window
  double tolerance = 0.05;   // "close to best" margin triggering a step-down
  int decrement = 10;        // env steps removed from h per trigger
  int initial_h = -1;        // >= 0 overrides the probe (used by tests)
};

// JSRL-lite curriculum: each episode rolls the guide for h steps, then a
// from-scratch SAC learner. h starts at the guide's mean successful-episode
// length and steps down when the recent evaluation window is within
// tolerance of the best window so far. Evaluation includes the current
// prefix. extra carries {"initial_h", "h_history": [[step, h], ...]}.
RunResult run_jsrl_lite(const PolicyHandle& guide, const EnvSpec& spec,
                        const JsrlConfig& cfg);

// Fine-tuning where every episode (training and evaluation) begins with
// k_prefix_steps frozen base-policy steps; k=0 reduces to
// run_sac_finetune(full) bit-for-bit.
RunResult run_horizon_shortened_finetune(const BasePolicy& base,
                                         const EnvSpec& spec,
                                         int k_prefix_steps,
                                         const BaselineConfig& cfg);

// Plain SAC from random initialization on the sparse-reward task.
RunResult run_scratch_sac(const EnvSpec& spec, const BaselineConfig& cfg);

struct DeviationReport {
  double max_deviation = 0.0;   // sup over steps of ||refined - base||_inf
  double mean_deviation = 0.0;  // mean over the same steps
  int episodes = 0;
  long long steps = 0;
};

// Rolls the refined policy and compares its action to the base policy's at
// every visited state.
DeviationReport deviation_report(const PolicyHandle& base,
                                 const PolicyHandle& refined,
                                 const EnvSpec& spec, int episodes,
                                 std::uint64_t seed);

// Smoothness proxy: per-episode mean of ||a_t - a_{t-1}||^2 over
// consecutive steps, averaged across episodes (lower is smoother).
double smoothness_metric(const PolicyHandle& policy, const EnvSpec& spec,
                         int episodes, std::uint64_t seed);

}  // namespace pdlab

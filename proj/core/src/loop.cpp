#include "pdlab/loop.hpp"

#include <chrono>

namespace pdlab {

BehaviorAction behavior_action(
    const Vec& obs, const std::function<Vec(const Vec&)>& bias,
    const SacCore& core,
    const std::function<Vec(const Vec& obs, const Vec& base)>& psi,
    double epsilon, Rng& gate_rng, Rng& actor_rng) {
  require(epsilon >= 0.0 && epsilon <= 1.0,
          "behavior_action: epsilon outside [0, 1]");
  BehaviorAction out;
  out.base_action = bias(obs);
  const double u = gate_rng.uniform();
  out.gate_on = u < epsilon;
  if (out.gate_on) {
    const ActorSampleResult s =
        actor_sample(core.actor(), psi(obs, out.base_action), actor_rng);
    const Vec residual = bound_residual(s.action, core.compose_scale());
    out.executed = clip(out.base_action + residual);
    // Post-clip difference, so the composition identity is exact even when
    // the sum left [-1, 1]. Clipping moves the sum toward the base action,
    // so every component still lies within the residual bound.
    out.residual_action = out.executed - out.base_action;
  } else {
    out.executed = out.base_action;
    out.residual_action = Vec::Zero(out.base_action.size());
  }
  return out;
}

double evaluate_policy(const EnvSpec& spec, const PolicyHandle& policy,
                       const std::function<Vec(const Vec&)>& prefix_policy,
                       int prefix_len, int episodes, std::uint64_t seed) {
  require(episodes > 0, "evaluate_policy: episodes must be positive");
  require(prefix_len == 0 || prefix_policy,
          "evaluate_policy: prefix_len set without a prefix policy");
  Env env(spec);
  int successes = 0;
  for (int e = 0; e < episodes; ++e) {
    env.reset(derive_seed(seed, "eval_episode", e));
    bool done = false;
    for (int i = 0; i < prefix_len && !done; ++i)
      done = env.step(prefix_policy(env.observation())).done;
    while (!done) done = env.step(policy.act(env.observation())).done;
    if (env.state().succeeded) ++successes;
  }
  return static_cast<double>(successes) / episodes;
}

RunResult run_online_loop(const LoopConfig& cfg, const EnvSpec& spec,
                          std::shared_ptr<SacCore> core,
                          const LoopHooks& hooks) {
  require(core != nullptr, "run_online_loop: null SacCore");
  require(hooks.bias && hooks.psi, "run_online_loop: bias and psi hooks required");
  require(cfg.H >= 0, "run_online_loop: H must be non-negative");
  require(cfg.total_env_steps >= 0 && cfg.eval_interval_steps > 0,
          "run_online_loop: invalid step budget or eval interval");
  require(!hooks.prefix_len || hooks.prefix_policy,
          "run_online_loop: prefix_len hook without prefix_policy");

  const SacConfig& sac = core->config();
  const int n_updates_per_burst =
      static_cast<int>(std::llround(sac.train_freq * sac.utd));

  Rng gate_rng(derive_seed(cfg.seed, "gate"));
  Rng actor_rng(derive_seed(cfg.seed, "actor_noise"));
  Rng update_rng(derive_seed(cfg.seed, "update"));
  const std::uint64_t eval_seed = derive_seed(cfg.seed, "eval");

  RunResult result;
  result.core = core;
  result.buffer = std::make_shared<ReplayBuffer>(
      sac.buffer_capacity, spec.obs_dim, spec.action_dim);

  // Deterministic composite used both for periodic evaluation and as the
  // returned refined policy: clip(bias + scale * squashed actor mean).
  auto bias = hooks.bias;
  auto psi = hooks.psi;
  const double scale = core->compose_scale();
  PolicyHandle composite;
  composite.name = hooks.refined_name;
  composite.is_stochastic = false;
  composite.act = [core, bias, psi, scale](const Vec& obs) {
    const Vec b = bias(obs);
    const Vec mean = actor_mean_action(core->actor(), psi(obs, b));
    return clip(b + scale * mean);
  };

  const auto t0 = std::chrono::steady_clock::now();
  auto wall_seconds = [&t0]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  auto epsilon_now = [&cfg](long long step) {
    return cfg.H == 0 ? 1.0 : epsilon_of(step, cfg.H);
  };
  auto run_eval = [&](long long step) {
    const int prefix = hooks.prefix_len ? hooks.prefix_len() : 0;
    const double success =
        evaluate_policy(spec, composite, hooks.prefix_policy, prefix,
                        cfg.eval_episodes, eval_seed);
    result.curve.push_back({step, success, cfg.eval_episodes,
                            epsilon_now(step), wall_seconds()});
    if (hooks.on_eval) hooks.on_eval(step, success);
  };

  run_eval(0);

  Env env(spec);
  long long env_step = 0;
  long long next_eval_at = cfg.eval_interval_steps;
  long long episode_index = -1;
  bool need_reset = true;
  int prefix_remaining = 0;
  double episode_epsilon = 1.0;  // per-episode gate: 1 keeps it on, 0 off

  while (env_step < cfg.total_env_steps) {
    if (need_reset) {
      ++episode_index;
      env.reset(derive_seed(cfg.seed, "episode", episode_index));
      prefix_remaining = hooks.prefix_len ? hooks.prefix_len() : 0;
      if (cfg.per_episode_gate)
        episode_epsilon =
            gate_rng.uniform() < epsilon_now(env_step) ? 1.0 : 0.0;
      need_reset = false;
    }

    if (prefix_remaining > 0) {
      // Frozen prefix: consumes budget, stores nothing, draws nothing from
      // the gate/actor streams.
      const StepResult sr = env.step(hooks.prefix_policy(env.observation()));
      --prefix_remaining;
      ++result.prefix_steps_total;
      if (sr.done) need_reset = true;
    } else {
      const double eps =
          cfg.per_episode_gate ? episode_epsilon : epsilon_now(env_step);
      const Vec obs = env.observation();
      const BehaviorAction ba =
          behavior_action(obs, hooks.bias, *core, hooks.psi, eps, gate_rng,
                          actor_rng);
      const StepResult sr = env.step(ba.executed);

      Transition t;
      t.obs = obs;
      t.base_action = ba.base_action;
      t.executed_action = ba.executed;
      t.residual_action = ba.residual_action;
      t.gate_on = ba.gate_on;
      t.reward = sr.reward;
      t.next_obs = sr.observation;
      t.next_base_action = hooks.bias(sr.observation);
      // Bootstrap-terminal only on success termination; horizon timeouts
      // keep the bootstrap (the state is not absorbing).
      t.done = sr.done && sr.success;
      result.buffer->push(t);

      ++result.learner_steps;
      if (ba.gate_on) ++result.gate_on_steps;
      if (sr.done) need_reset = true;
    }

    ++env_step;

    if (env_step >= sac.learning_starts && env_step % sac.train_freq == 0 &&
        result.buffer->ready(sac.batch)) {
      for (int u = 0; u < n_updates_per_burst; ++u) {
        const std::vector<int> idx =
            result.buffer->sample_indices(sac.batch, update_rng);
        const SacCore::Batch b = assemble_batch(
            *result.buffer, idx, hooks.psi, core->psi_dim(),
            core->critic_variant());
        core->update(b, update_rng);
      }
    }

    if (env_step == next_eval_at) {
      run_eval(env_step);
      next_eval_at += cfg.eval_interval_steps;
    }
  }

  if (result.curve.empty() || result.curve.back().step != cfg.total_env_steps)
    run_eval(cfg.total_env_steps);

  result.refined = composite;
  result.final_success = result.curve.back().eval_success_rate;
  for (const CurvePoint& p : result.curve)
    result.best_success = std::max(result.best_success, p.eval_success_rate);
  return result;
}

}  // namespace pdlab

#include "pdlab/methods.hpp"

#include <algorithm>
#include <cmath>

namespace pdlab {
namespace {

LoopHooks zero_bias_hooks(int action_dim, const std::string& name) {
  LoopHooks h;
  h.bias = [action_dim](const Vec&) { return Vec(Vec::Zero(action_dim)); };
  h.psi = [](const Vec& obs, const Vec&) { return obs; };
  h.refined_name = name;
  return h;
}

struct MethodParts {
  std::shared_ptr<SacCore> core;
  LoopHooks hooks;
};

MethodParts scratch_parts(const EnvSpec& spec, const SacConfig& sac,
                          std::uint64_t seed, const std::string& name) {
  Rng init_rng(derive_seed(seed, "net_init"));
  MethodParts p;
  p.core = std::make_shared<SacCore>(sac, spec.obs_dim, spec.obs_dim,
                                     spec.action_dim, CriticActionInput::sum,
                                     1.0, init_rng);
  p.hooks = zero_bias_hooks(spec.action_dim, name);
  return p;
}

// Builds an actor net whose mean path reproduces `mean_net` exactly: the
// hidden stack is copied, the mean rows of the final layer come from
// mean_net's final layer, and the log-std rows keep their fresh small
// initialization. mean_net must be a relu stack with a tanh output head so
// that tanh(mean rows) equals the cloned policy's output.
Mlp actor_from_mean_net(const Mlp& mean_net, const SacConfig& sac,
                        Rng& init_rng) {
  const int d = mean_net.output_dim();
  std::vector<int> sizes(mean_net.layer_sizes.begin(),
                         mean_net.layer_sizes.end() - 1);
  sizes.push_back(2 * d);
  Mlp a = make_mlp(sizes, Activation::relu, Activation::identity, init_rng,
                   sac.actor_final_init_scale);
  for (size_t l = 0; l + 1 < a.weights.size(); ++l) {
    a.weights[l] = mean_net.weights[l];
    a.biases[l] = mean_net.biases[l];
  }
  a.weights.back().topRows(d) = mean_net.weights.back();
  a.biases.back().head(d) = mean_net.biases.back();
  return a;
}

// Single Mlp equivalent to offset_head(trunk(x)) for the cluster policy:
// the trunk's output layer is relu-activated, so stacking it as a hidden
// layer of a relu net preserves the function.
Mlp stack_trunk_and_head(const Mlp& trunk, const Mlp& head) {
  require(head.weights.size() == 1,
          "stack_trunk_and_head: head must be a single linear layer");
  Mlp out;
  out.layer_sizes = trunk.layer_sizes;
  out.layer_sizes.push_back(head.output_dim());
  out.weights = trunk.weights;
  out.weights.push_back(head.weights[0]);
  out.biases = trunk.biases;
  out.biases.push_back(head.biases[0]);
  out.hidden_activation = Activation::relu;
  out.output_activation = head.output_activation;
  return out;
}

MethodParts finetune_parts(const BasePolicy& base, FinetuneMode mode,
                           const EnvSpec& spec, const SacConfig& sac,
                           std::uint64_t seed) {
  MethodParts p;
  const int d = spec.action_dim;
  Rng init_rng(derive_seed(seed, "net_init"));
  if (mode == FinetuneMode::offset_only && base.kind != "cluster_offset")
    throw ConfigError(
        "run_sac_finetune: offset_only requires a cluster_offset base "
        "policy, got kind '" + base.kind + "'");

  if (base.kind == "mlp") {
    const MlpBcPolicy& bc = *base.mlp;
    if (!bc.tanh_head)
      throw ConfigError(
          "run_sac_finetune: the base policy needs a tanh output head so "
          "the Gaussian mean path can reproduce it");
    p.core = std::make_shared<SacCore>(sac, spec.obs_dim, spec.obs_dim, d,
                                       CriticActionInput::sum, 1.0, init_rng);
    p.core->set_actor_net(actor_from_mean_net(bc.net, sac, init_rng));
    p.hooks = zero_bias_hooks(d, "finetune_full");
    return p;
  }

  require(base.kind == "cluster_offset",
          "run_sac_finetune: unknown base policy kind '" + base.kind + "'");
  const ClusterOffsetPolicy& cp = *base.cluster;
  if (!cp.tanh_head)
    throw ConfigError(
        "run_sac_finetune: offset fine-tuning needs a tanh offset head");
  // The cluster selection (trunk + classification head + centers) is not
  // differentiable through the argmax, so it stays frozen in both modes and
  // provides the per-state bias; the actor carries the offset path.
  const ClusterOffsetPolicy frozen = cp;
  LoopHooks hooks;
  hooks.bias = [frozen](const Vec& obs) {
    return frozen.cluster_centers[frozen.cls(obs)];
  };

  if (mode == FinetuneMode::full) {
    // Trunk + offset head fine-tune together as one actor on raw obs.
    p.core = std::make_shared<SacCore>(sac, spec.obs_dim, spec.obs_dim, d,
                                       CriticActionInput::sum,
                                       cp.offset_bound, init_rng);
    p.core->set_actor_net(actor_from_mean_net(
        stack_trunk_and_head(cp.trunk, cp.offset_head), sac, init_rng));
    hooks.psi = [](const Vec& obs, const Vec&) { return obs; };
    hooks.refined_name = "finetune_full";
  } else {
    // Only the offset head trains; it reads frozen trunk features.
    const int psi_dim = cp.trunk.output_dim();
    p.core = std::make_shared<SacCore>(sac, psi_dim, spec.obs_dim, d,
                                       CriticActionInput::sum,
                                       cp.offset_bound, init_rng);
    p.core->set_actor_net(
        actor_from_mean_net(cp.offset_head, sac, init_rng));
    const Mlp trunk = cp.trunk;
    hooks.psi = [trunk](const Vec& obs, const Vec&) {
      return mlp_forward(trunk, obs);
    };
    hooks.refined_name = "finetune_offset_only";
  }
  p.hooks = std::move(hooks);
  return p;
}

LoopConfig loop_config(const BaselineConfig& cfg) {
  LoopConfig lc;
  lc.H = 0;
  lc.total_env_steps = cfg.total_env_steps;
  lc.eval_interval_steps = cfg.eval_interval_steps;
  lc.eval_episodes = cfg.eval_episodes;
  lc.seed = cfg.seed;
  return lc;
}

}  // namespace

PolicyHandle checked_base(const PolicyHandle& base) {
  PolicyHandle out = base;
  const auto inner = base.act;
  const std::string name = base.name.empty() ? "base" : base.name;
  out.act = [inner, name](const Vec& obs) {
    Vec a = inner(obs);
    if (!a.allFinite())
      throw Error("base policy contract: non-finite action from '" + name +
                  "'");
    if ((a.array().abs() > 1.0).any())
      throw Error("base policy contract: action outside [-1, 1] from '" +
                  name + "'");
    return a;
  };
  return out;
}

RunResult train_decorator(const DecoratorConfig& cfg, const PolicyHandle& base,
                          const EnvSpec& spec) {
  require(cfg.alpha > 0.0 && cfg.alpha <= 1.0,
          "train_decorator: alpha must be in (0, 1]");
  require(cfg.H >= 0, "train_decorator: H must be non-negative");
  const PolicyHandle checked = checked_base(base);

  Rng init_rng(derive_seed(cfg.seed, "net_init"));
  const int psi_dim =
      actor_input_dim(spec.obs_dim, spec.action_dim, cfg.actor_input);
  auto core = std::make_shared<SacCore>(cfg.sac, psi_dim, spec.obs_dim,
                                        spec.action_dim,
                                        cfg.critic_action_input, cfg.alpha,
                                        init_rng);
  LoopHooks hooks;
  hooks.bias = checked.act;
  if (cfg.actor_input == ActorInput::obs_only) {
    hooks.psi = [](const Vec& obs, const Vec&) { return obs; };
  } else {
    const ActorInput v = cfg.actor_input;
    hooks.psi = [v](const Vec& obs, const Vec& b) {
      return actor_input(obs, b, v);
    };
  }
  hooks.refined_name = "decorator";

  LoopConfig lc;
  lc.H = cfg.H;
  lc.per_episode_gate = cfg.per_episode_gate;
  lc.total_env_steps = cfg.total_env_steps;
  lc.eval_interval_steps = cfg.eval_interval_steps;
  lc.eval_episodes = cfg.eval_episodes;
  lc.seed = cfg.seed;

  RunResult r = run_online_loop(lc, spec, core, hooks);
  r.extra["alpha"] = cfg.alpha;
  r.extra["H"] = cfg.H;
  return r;
}

RunResult run_vanilla_residual(const PolicyHandle& base, const EnvSpec& spec,
                               const BaselineConfig& cfg) {
  DecoratorConfig dc;
  dc.alpha = 1.0;
  dc.H = 0;
  dc.sac = cfg.sac;
  dc.total_env_steps = cfg.total_env_steps;
  dc.eval_interval_steps = cfg.eval_interval_steps;
  dc.eval_episodes = cfg.eval_episodes;
  dc.seed = cfg.seed;
  return train_decorator(dc, base, spec);
}

RunResult run_sac_finetune(const BasePolicy& base, FinetuneMode mode,
                           const EnvSpec& spec, const BaselineConfig& cfg) {
  MethodParts p = finetune_parts(base, mode, spec, cfg.sac, cfg.seed);
  RunResult r = run_online_loop(loop_config(cfg), spec, p.core, p.hooks);
  r.extra["mode"] =
      mode == FinetuneMode::full ? "full" : "offset_only";
  return r;
}

RunResult run_jsrl_lite(const PolicyHandle& guide, const EnvSpec& spec,
                        const JsrlConfig& cfg) {
  require(cfg.window > 0 && cfg.decrement > 0 && cfg.tolerance >= 0.0,
          "run_jsrl_lite: invalid window/decrement/tolerance");
  int h0 = cfg.initial_h;
  if (h0 < 0) {
    // Probe the guide: mean successful-episode length seeds the curriculum.
    Env env(spec);
    long long total_len = 0;
    int successes = 0;
    for (int e = 0; e < cfg.probe_episodes; ++e) {
      env.reset(derive_seed(cfg.run.seed, "jsrl_probe", e));
      bool done = false;
      int steps = 0;
      while (!done) {
        done = env.step(guide.act(env.observation())).done;
        ++steps;
      }
      if (env.state().succeeded) {
        total_len += steps;
        ++successes;
      }
    }
    if (successes == 0)
      throw Error("run_jsrl_lite: guide policy never succeeded over " +
                  std::to_string(cfg.probe_episodes) + " probe episodes");
    h0 = static_cast<int>(std::llround(
        static_cast<double>(total_len) / successes));
  }

  struct Curriculum {
    int h;
    int window;
    double tolerance;
    int decrement;
    std::vector<double> evals;
    double best_window = -1.0;
    std::vector<std::pair<long long, int>> h_history;
  };
  auto st = std::make_shared<Curriculum>();
  st->h = h0;
  st->window = cfg.window;
  st->tolerance = cfg.tolerance;
  st->decrement = cfg.decrement;

  MethodParts p = scratch_parts(spec, cfg.run.sac, cfg.run.seed, "jsrl_lite");
  p.hooks.prefix_len = [st]() { return st->h; };
  const auto guide_act = guide.act;
  p.hooks.prefix_policy = [guide_act](const Vec& obs) {
    return guide_act(obs);
  };
  p.hooks.on_eval = [st](long long step, double success) {
    st->evals.push_back(success);
    if (static_cast<int>(st->evals.size()) >= st->window) {
      double m = 0.0;
      for (int i = 0; i < st->window; ++i)
        m += st->evals[st->evals.size() - 1 - i];
      m /= st->window;
      st->best_window = std::max(st->best_window, m);
      // Current window at or near the best so far: the learner holds its
      // own, so hand it more of the episode.
      if (m >= st->best_window - st->tolerance)
        st->h = std::max(0, st->h - st->decrement);
    }
    st->h_history.emplace_back(step, st->h);
  };

  RunResult r = run_online_loop(loop_config(cfg.run), spec, p.core, p.hooks);
  r.extra["initial_h"] = h0;
  Json hist = Json::array();
  for (const auto& [step, h] : st->h_history)
    hist.push_back(Json::array({step, h}));
  r.extra["h_history"] = std::move(hist);
  return r;
}

RunResult run_horizon_shortened_finetune(const BasePolicy& base,
                                         const EnvSpec& spec,
                                         int k_prefix_steps,
                                         const BaselineConfig& cfg) {
  require(k_prefix_steps >= 0 && k_prefix_steps < spec.max_episode_steps,
          "run_horizon_shortened_finetune: k_prefix_steps must be in "
          "[0, max_episode_steps)");
  MethodParts p =
      finetune_parts(base, FinetuneMode::full, spec, cfg.sac, cfg.seed);
  const PolicyHandle bh = base.handle();
  p.hooks.prefix_len = [k_prefix_steps]() { return k_prefix_steps; };
  p.hooks.prefix_policy = [bh](const Vec& obs) { return bh.act(obs); };
  p.hooks.refined_name = "horizon_shortened_finetune";
  RunResult r = run_online_loop(loop_config(cfg), spec, p.core, p.hooks);
  r.extra["k_prefix_steps"] = k_prefix_steps;
  return r;
}

RunResult run_scratch_sac(const EnvSpec& spec, const BaselineConfig& cfg) {
  MethodParts p = scratch_parts(spec, cfg.sac, cfg.seed, "scratch_sac");
  return run_online_loop(loop_config(cfg), spec, p.core, p.hooks);
}

DeviationReport deviation_report(const PolicyHandle& base,
                                 const PolicyHandle& refined,
                                 const EnvSpec& spec, int episodes,
                                 std::uint64_t seed) {
  require(episodes > 0, "deviation_report: episodes must be positive");
  Env env(spec);
  DeviationReport rep;
  rep.episodes = episodes;
  double sum = 0.0;
  for (int e = 0; e < episodes; ++e) {
    env.reset(derive_seed(seed, "deviation_episode", e));
    bool done = false;
    while (!done) {
      const Vec obs = env.observation();
      const Vec a = refined.act(obs);
      const double dev = (a - base.act(obs)).cwiseAbs().maxCoeff();
      rep.max_deviation = std::max(rep.max_deviation, dev);
      sum += dev;
      ++rep.steps;
      done = env.step(a).done;
    }
  }
  rep.mean_deviation = rep.steps > 0 ? sum / rep.steps : 0.0;
  return rep;
}

double smoothness_metric(const PolicyHandle& policy, const EnvSpec& spec,
                         int episodes, std::uint64_t seed) {
  require(episodes > 0, "smoothness_metric: episodes must be positive");
  Env env(spec);
  double episode_sum = 0.0;
  int counted_episodes = 0;
  for (int e = 0; e < episodes; ++e) {
    env.reset(derive_seed(seed, "smoothness_episode", e));
    Vec prev;
    bool have_prev = false;
    bool done = false;
    double sum = 0.0;
    long long pairs = 0;
    while (!done) {
      const Vec a = policy.act(env.observation());
      if (have_prev) {
        sum += (a - prev).squaredNorm();
        ++pairs;
      }
      prev = a;
      have_prev = true;
      done = env.step(a).done;
    }
    if (pairs > 0) {
      episode_sum += sum / static_cast<double>(pairs);
      ++counted_episodes;
    }
  }
  return counted_episodes > 0 ? episode_sum / counted_episodes : 0.0;
}

}  // namespace pdlab

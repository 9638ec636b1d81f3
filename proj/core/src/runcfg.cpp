#include "pdlab/runcfg.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

namespace pdlab {

const char* const kMethodNames[7] = {
    "decorator",           "vanilla_residual",
    "sac_finetune_full",   "sac_finetune_offset_only",
    "jsrl_lite",           "horizon_shortened_finetune",
    "scratch_sac"};

namespace {

bool known_method(const std::string& m) {
  for (const char* k : kMethodNames)
    if (m == k) return true;
  return false;
}

std::string method_list() {
  std::string out;
  for (const char* k : kMethodNames) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

bool method_needs_base(const std::string& m) { return m != "scratch_sac"; }

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (int x : v) {
    if (!out.empty()) out += ",";
    out += std::to_string(x);
  }
  return out;
}

}  // namespace

std::vector<std::string> known_config_keys() {
  return {
      // run
      "method", "env", "seed", "seeds", "output_dir", "base_policy", "alpha",
      "H", "actor_input", "critic_action_input", "per_episode_gate",
      "total_env_steps", "eval_interval_steps", "eval_episodes",
      "k_prefix_steps",
      // jsrl
      "jsrl.probe_episodes", "jsrl.window", "jsrl.tolerance",
      "jsrl.decrement", "jsrl.initial_h",
      // sac
      "sac.gamma", "sac.batch", "sac.learning_rate", "sac.tau",
      "sac.train_freq", "sac.utd", "sac.learning_starts",
      "sac.buffer_capacity", "sac.hidden", "sac.log_std_lo", "sac.log_std_hi",
      "sac.init_temperature", "sac.target_entropy_scale",
      "sac.actor_final_init_scale",
      // demo generation
      "demos.count", "demos.noise_std", "demos.mode", "demos.seed",
      "demos.path",
      // behavior cloning
      "bc.arch", "bc.tanh_head", "bc.k", "bc.hidden", "bc.epochs", "bc.batch",
      "bc.learning_rate", "bc.weight_decay", "bc.eval_episodes", "bc.seed",
      "bc.path",
  };
}

RunConfig run_config_from(const KvConfig& kv) {
  kv.require_known(known_config_keys());
  RunConfig c;
  c.method = kv.get_string("method", c.method);
  if (!known_method(c.method))
    throw ConfigError("unknown method '" + c.method + "'; valid methods: " +
                      method_list());
  c.env = kv.get_string("env", c.env);
  env_name_from_string(c.env);  // rejects unknown env names early
  c.seed = kv.get_u64("seed", c.seed);
  c.output_dir = kv.get_string("output_dir", c.output_dir);
  c.base_policy = kv.get_string("base_policy", c.base_policy);

  c.alpha = kv.get_double("alpha", c.alpha);
  c.H = kv.get_int("H", c.H);
  c.actor_input = kv.get_string("actor_input", c.actor_input);
  actor_input_from_string(c.actor_input);
  c.critic_action_input =
      kv.get_string("critic_action_input", c.critic_action_input);
  critic_action_input_from_string(c.critic_action_input);
  c.per_episode_gate = kv.get_bool("per_episode_gate", c.per_episode_gate);

  c.total_env_steps = kv.get_int("total_env_steps", c.total_env_steps);
  c.eval_interval_steps =
      kv.get_int("eval_interval_steps", c.eval_interval_steps);
  c.eval_episodes = static_cast<int>(kv.get_int("eval_episodes",
                                                c.eval_episodes));

  c.sac.gamma = kv.get_double("sac.gamma", c.sac.gamma);
  c.sac.batch = static_cast<int>(kv.get_int("sac.batch", c.sac.batch));
  c.sac.learning_rate = kv.get_double("sac.learning_rate",
                                      c.sac.learning_rate);
  c.sac.tau = kv.get_double("sac.tau", c.sac.tau);
  c.sac.train_freq = static_cast<int>(kv.get_int("sac.train_freq",
                                                 c.sac.train_freq));
  c.sac.utd = kv.get_double("sac.utd", c.sac.utd);
  c.sac.learning_starts = static_cast<int>(
      kv.get_int("sac.learning_starts", c.sac.learning_starts));
  c.sac.buffer_capacity = static_cast<int>(
      kv.get_int("sac.buffer_capacity", c.sac.buffer_capacity));
  c.sac.hidden = kv.get_int_list("sac.hidden", c.sac.hidden);
  c.sac.log_std_lo = kv.get_double("sac.log_std_lo", c.sac.log_std_lo);
  c.sac.log_std_hi = kv.get_double("sac.log_std_hi", c.sac.log_std_hi);
  c.sac.init_temperature = kv.get_double("sac.init_temperature",
                                         c.sac.init_temperature);
  c.sac.target_entropy_scale = kv.get_double("sac.target_entropy_scale",
                                             c.sac.target_entropy_scale);
  c.sac.actor_final_init_scale = kv.get_double(
      "sac.actor_final_init_scale", c.sac.actor_final_init_scale);

  c.k_prefix_steps = static_cast<int>(kv.get_int("k_prefix_steps",
                                                 c.k_prefix_steps));
  c.jsrl_probe_episodes = static_cast<int>(
      kv.get_int("jsrl.probe_episodes", c.jsrl_probe_episodes));
  c.jsrl_window = static_cast<int>(kv.get_int("jsrl.window", c.jsrl_window));
  c.jsrl_tolerance = kv.get_double("jsrl.tolerance", c.jsrl_tolerance);
  c.jsrl_decrement = static_cast<int>(kv.get_int("jsrl.decrement",
                                                 c.jsrl_decrement));
  c.jsrl_initial_h = static_cast<int>(kv.get_int("jsrl.initial_h",
                                                 c.jsrl_initial_h));
  return c;
}

std::string run_config_canonical(const RunConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["method"] = cfg.method;
  kv["env"] = cfg.env;
  kv["seed"] = std::to_string(cfg.seed);
  kv["base_policy"] = cfg.base_policy;
  kv["alpha"] = format_double(cfg.alpha);
  kv["H"] = std::to_string(cfg.H);
  kv["actor_input"] = cfg.actor_input;
  kv["critic_action_input"] = cfg.critic_action_input;
  kv["per_episode_gate"] = cfg.per_episode_gate ? "true" : "false";
  kv["total_env_steps"] = std::to_string(cfg.total_env_steps);
  kv["eval_interval_steps"] = std::to_string(cfg.eval_interval_steps);
  kv["eval_episodes"] = std::to_string(cfg.eval_episodes);
  kv["sac.gamma"] = format_double(cfg.sac.gamma);
  kv["sac.batch"] = std::to_string(cfg.sac.batch);
  kv["sac.learning_rate"] = format_double(cfg.sac.learning_rate);
  kv["sac.tau"] = format_double(cfg.sac.tau);
  kv["sac.train_freq"] = std::to_string(cfg.sac.train_freq);
  kv["sac.utd"] = format_double(cfg.sac.utd);
  kv["sac.learning_starts"] = std::to_string(cfg.sac.learning_starts);
  kv["sac.buffer_capacity"] = std::to_string(cfg.sac.buffer_capacity);
  kv["sac.hidden"] = join_ints(cfg.sac.hidden);
  kv["sac.log_std_lo"] = format_double(cfg.sac.log_std_lo);
  kv["sac.log_std_hi"] = format_double(cfg.sac.log_std_hi);
  kv["sac.init_temperature"] = format_double(cfg.sac.init_temperature);
  kv["sac.target_entropy_scale"] =
      format_double(cfg.sac.target_entropy_scale);
  kv["sac.actor_final_init_scale"] =
      format_double(cfg.sac.actor_final_init_scale);
  kv["k_prefix_steps"] = std::to_string(cfg.k_prefix_steps);
  kv["jsrl.probe_episodes"] = std::to_string(cfg.jsrl_probe_episodes);
  kv["jsrl.window"] = std::to_string(cfg.jsrl_window);
  kv["jsrl.tolerance"] = format_double(cfg.jsrl_tolerance);
  kv["jsrl.decrement"] = std::to_string(cfg.jsrl_decrement);
  kv["jsrl.initial_h"] = std::to_string(cfg.jsrl_initial_h);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string run_config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a_hash(run_config_canonical(cfg))));
  return buf;
}

RunResult execute_run(const RunConfig& cfg) {
  const EnvSpec spec = make_env_spec(cfg.env);
  std::optional<BasePolicy> base;
  if (method_needs_base(cfg.method)) {
    if (cfg.base_policy.empty())
      throw ConfigError("method '" + cfg.method +
                        "' requires base_policy = <path to trained policy>");
    base = load_policy(cfg.base_policy);
    if (base->env_name != cfg.env)
      throw ConfigError("base policy was trained for env '" +
                        base->env_name + "', run env is '" + cfg.env + "'");
    require(base->obs_dim == spec.obs_dim &&
                base->action_dim == spec.action_dim,
            "execute_run: base policy dimensions do not match the env");
  }

  if (cfg.method == "decorator") {
    DecoratorConfig dc;
    dc.alpha = cfg.alpha;
    dc.H = cfg.H;
    dc.actor_input = actor_input_from_string(cfg.actor_input);
    dc.critic_action_input =
        critic_action_input_from_string(cfg.critic_action_input);
    dc.per_episode_gate = cfg.per_episode_gate;
    dc.sac = cfg.sac;
    dc.total_env_steps = cfg.total_env_steps;
    dc.eval_interval_steps = cfg.eval_interval_steps;
    dc.eval_episodes = cfg.eval_episodes;
    dc.seed = cfg.seed;
    return train_decorator(dc, base->handle(), spec);
  }

  BaselineConfig bc;
  bc.sac = cfg.sac;
  bc.total_env_steps = cfg.total_env_steps;
  bc.eval_interval_steps = cfg.eval_interval_steps;
  bc.eval_episodes = cfg.eval_episodes;
  bc.seed = cfg.seed;

  if (cfg.method == "vanilla_residual")
    return run_vanilla_residual(base->handle(), spec, bc);
  if (cfg.method == "sac_finetune_full")
    return run_sac_finetune(*base, FinetuneMode::full, spec, bc);
  if (cfg.method == "sac_finetune_offset_only")
    return run_sac_finetune(*base, FinetuneMode::offset_only, spec, bc);
  if (cfg.method == "jsrl_lite") {
    JsrlConfig jc;
    jc.run = bc;
    jc.probe_episodes = cfg.jsrl_probe_episodes;
    jc.window = cfg.jsrl_window;
    jc.tolerance = cfg.jsrl_tolerance;
    jc.decrement = cfg.jsrl_decrement;
    jc.initial_h = cfg.jsrl_initial_h;
    return run_jsrl_lite(base->handle(), spec, jc);
  }
  if (cfg.method == "horizon_shortened_finetune")
    return run_horizon_shortened_finetune(*base, spec, cfg.k_prefix_steps,
                                          bc);
  if (cfg.method == "scratch_sac") return run_scratch_sac(spec, bc);
  throw ConfigError("unknown method '" + cfg.method + "'; valid methods: " +
                    method_list());
}

RunSummary make_summary(const RunConfig& cfg, const RunResult& r) {
  RunSummary s;
  s.method = cfg.method;
  s.env = cfg.env;
  s.seed = cfg.seed;
  s.final_success = r.final_success;
  s.best_success = r.best_success;
  s.steps = cfg.total_env_steps;
  s.config_hash = run_config_hash(cfg);
  s.extra = r.extra;
  return s;
}

namespace {

// How the checkpointed actor composes with its frozen pieces, derived from
// the method and the base policy's kind.
void composition_tags(const RunConfig& cfg, const BasePolicy* base,
                      std::string* bias_kind, std::string* psi_kind) {
  if (cfg.method == "decorator" || cfg.method == "vanilla_residual") {
    *bias_kind = "base_policy";
    *psi_kind = cfg.method == "decorator" &&
                        cfg.actor_input == "obs_and_base_action"
                    ? "obs_and_base"
                    : "obs";
    return;
  }
  if (cfg.method == "sac_finetune_full" ||
      cfg.method == "horizon_shortened_finetune") {
    *bias_kind = base && base->kind == "cluster_offset" ? "cluster_center"
                                                        : "zero";
    *psi_kind = "obs";
    return;
  }
  if (cfg.method == "sac_finetune_offset_only") {
    *bias_kind = "cluster_center";
    *psi_kind = "trunk_features";
    return;
  }
  *bias_kind = "zero";  // jsrl_lite, scratch_sac
  *psi_kind = "obs";
}

int final_prefix_steps(const RunConfig& cfg, const RunResult& r) {
  if (cfg.method == "horizon_shortened_finetune") return cfg.k_prefix_steps;
  if (cfg.method == "jsrl_lite" && r.extra.contains("h_history") &&
      !r.extra["h_history"].empty())
    return r.extra["h_history"].back()[1].get<int>();
  return 0;
}

}  // namespace

Json run_checkpoint_json(const RunConfig& cfg, const RunResult& r) {
  require(r.core != nullptr, "run_checkpoint_json: run has no trained core");
  std::optional<BasePolicy> base;
  if (method_needs_base(cfg.method)) base = load_policy(cfg.base_policy);

  std::string bias_kind, psi_kind;
  composition_tags(cfg, base ? &*base : nullptr, &bias_kind, &psi_kind);

  Json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["kind"] = "run_checkpoint";
  j["method"] = cfg.method;
  j["env"] = cfg.env;
  j["seed"] = cfg.seed;
  j["compose_scale"] = r.core->compose_scale();
  j["bias_kind"] = bias_kind;
  j["psi_kind"] = psi_kind;
  j["prefix_steps"] = final_prefix_steps(cfg, r);
  j["log_std_lo"] = r.core->actor().log_std_lo;
  j["log_std_hi"] = r.core->actor().log_std_hi;
  j["log_temperature"] = r.core->log_temperature()[0];
  j["actor"] = mlp_to_json(r.core->actor().net);
  j["q1"] = mlp_to_json(r.core->q1());
  j["q2"] = mlp_to_json(r.core->q2());
  j["base_policy"] = base ? base->to_json() : Json(nullptr);
  return j;
}

LoadedCheckpoint load_run_checkpoint(const std::string& path) {
  const Json j = load_json_file(path);
  try {
    if (j.at("kind").get<std::string>() != "run_checkpoint")
      throw FormatError("run checkpoint: wrong kind '" +
                        j.at("kind").get<std::string>() + "'");
    if (j.at("format_version").get<int>() != kCheckpointFormatVersion)
      throw FormatError("run checkpoint: unsupported format_version " +
                        std::to_string(j.at("format_version").get<int>()));
    LoadedCheckpoint c;
    c.method = j.at("method").get<std::string>();
    c.env = j.at("env").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.compose_scale = j.at("compose_scale").get<double>();
    c.bias_kind = j.at("bias_kind").get<std::string>();
    c.psi_kind = j.at("psi_kind").get<std::string>();
    c.prefix_steps = j.at("prefix_steps").get<int>();
    c.actor.net = mlp_from_json(j.at("actor"));
    c.actor.log_std_lo = j.at("log_std_lo").get<double>();
    c.actor.log_std_hi = j.at("log_std_hi").get<double>();
    c.q1 = mlp_from_json(j.at("q1"));
    c.q2 = mlp_from_json(j.at("q2"));
    c.log_temperature = j.at("log_temperature").get<double>();
    if (!j.at("base_policy").is_null())
      c.base = BasePolicy::from_json(j.at("base_policy"));
    return c;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("run checkpoint '") + path + "': " +
                      e.what());
  }
}

std::function<Vec(const Vec&)> LoadedCheckpoint::bias() const {
  const int d = actor.action_dim();
  if (bias_kind == "zero")
    return [d](const Vec&) { return Vec(Vec::Zero(d)); };
  require(base.has_value(),
          "checkpoint bias '" + bias_kind + "' needs the embedded base");
  if (bias_kind == "base_policy") {
    const PolicyHandle h = base->handle();
    return [h](const Vec& obs) { return h.act(obs); };
  }
  if (bias_kind == "cluster_center") {
    require(base->cluster.has_value(),
            "checkpoint bias 'cluster_center' needs a cluster_offset base");
    const ClusterOffsetPolicy p = *base->cluster;
    return [p](const Vec& obs) { return p.cluster_centers[p.cls(obs)]; };
  }
  throw FormatError("run checkpoint: unknown bias_kind '" + bias_kind + "'");
}

std::function<Vec(const Vec&, const Vec&)> LoadedCheckpoint::psi() const {
  if (psi_kind == "obs")
    return [](const Vec& obs, const Vec&) { return obs; };
  if (psi_kind == "obs_and_base")
    return [](const Vec& obs, const Vec& b) {
      return actor_input(obs, b, ActorInput::obs_and_base_action);
    };
  if (psi_kind == "trunk_features") {
    require(base.has_value() && base->cluster.has_value(),
            "checkpoint psi 'trunk_features' needs a cluster_offset base");
    const Mlp trunk = base->cluster->trunk;
    return [trunk](const Vec& obs, const Vec&) {
      return mlp_forward(trunk, obs);
    };
  }
  throw FormatError("run checkpoint: unknown psi_kind '" + psi_kind + "'");
}

PolicyHandle LoadedCheckpoint::refined() const {
  PolicyHandle h;
  h.name = method;
  h.is_stochastic = false;
  const auto b = bias();
  const auto p = psi();
  const SquashedGaussianActor a = actor;
  const double s = compose_scale;
  h.act = [b, p, a, s](const Vec& obs) {
    const Vec bv = b(obs);
    return clip(Vec(bv + s * actor_mean_action(a, p(obs, bv))));
  };
  return h;
}

std::function<Vec(const Vec&)> LoadedCheckpoint::prefix_policy() const {
  if (prefix_steps == 0) return nullptr;
  require(base.has_value(),
          "checkpoint with a prefix needs the embedded base policy");
  const PolicyHandle h = base->handle();
  return [h](const Vec& obs) { return h.act(obs); };
}

void write_run_artifacts(const RunConfig& cfg, const RunResult& r) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  save_curve_csv(r.curve, cfg.output_dir + "/curve.csv");
  save_json_file(summary_to_json(make_summary(cfg, r)),
                 cfg.output_dir + "/summary.json");
  save_json_file(run_checkpoint_json(cfg, r),
                 cfg.output_dir + "/checkpoint.json");
}

}  // namespace pdlab

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdlab/config.hpp"
#include "pdlab/curve.hpp"
#include "pdlab/methods.hpp"

namespace pdlab {

// Everything one training run needs, assembled from a KvConfig (file keys
// and CLI overrides share the same names). Demo-generation and BC keys live
// in the same file under "demos." / "bc." and are read by their own stages.
struct RunConfig {
  std::string method = "decorator";
  std::string env = "point_gate";
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::string base_policy;  // path to a trained BC artifact

  // Decorator knobs.
  double alpha = 0.1;
  long long H = 50000;
  std::string actor_input = "obs_only";
  std::string critic_action_input = "sum";
  bool per_episode_gate = false;

  // Budget and evaluation cadence.
  long long total_env_steps = 300000;
  long long eval_interval_steps = 5000;
  int eval_episodes = 50;

  SacConfig sac;

  // Baseline-specific knobs.
  int k_prefix_steps = 0;
  int jsrl_probe_episodes = 100;
  int jsrl_window = 5;
  double jsrl_tolerance = 0.05;
  int jsrl_decrement = 10;
  int jsrl_initial_h = -1;
};

extern const char* const kMethodNames[7];  // decorator + six baselines

// Every key any pipeline stage understands (run + demos.* + bc.*).
std::vector<std::string> known_config_keys();

// Reads run fields from kv after rejecting unknown keys.
RunConfig run_config_from(const KvConfig& kv);

// Canonical "key=value\n" listing of every run-relevant field, sorted by
// key, excluding output_dir; the config hash is the FNV-1a hex of it.
std::string run_config_canonical(const RunConfig& cfg);
std::string run_config_hash(const RunConfig& cfg);

// Loads the base policy when the method needs one and dispatches to the
// training routine. Pure compute: writes nothing.
RunResult execute_run(const RunConfig& cfg);

RunSummary make_summary(const RunConfig& cfg, const RunResult& r);

// Self-contained final-policy container: actor net (f64le tensors), critics,
// temperature, composition metadata, and the embedded base policy, enough
// to rebuild the refined policy (and its evaluation prefix) elsewhere.
Json run_checkpoint_json(const RunConfig& cfg, const RunResult& r);

struct LoadedCheckpoint {
  std::string method, env;
  std::uint64_t seed = 0;
  SquashedGaussianActor actor;
  Mlp q1, q2;
  double log_temperature = 0.0;
  double compose_scale = 1.0;
  std::string bias_kind;  // "base_policy" | "cluster_center" | "zero"
  std::string psi_kind;   // "obs" | "obs_and_base" | "trunk_features"
  int prefix_steps = 0;   // evaluation prefix length (JSRL, horizon)
  std::optional<BasePolicy> base;

  PolicyHandle refined() const;  // composite deterministic policy
  std::function<Vec(const Vec&)> bias() const;
  std::function<Vec(const Vec&, const Vec&)> psi() const;
  std::function<Vec(const Vec&)> prefix_policy() const;  // base handle
};

LoadedCheckpoint load_run_checkpoint(const std::string& path);

// Writes curve.csv, summary.json, and checkpoint.json under cfg.output_dir
// (created if missing).
void write_run_artifacts(const RunConfig& cfg, const RunResult& r);

}  // namespace pdlab

#include "pdlab/demos.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "pdlab/checkpoint.hpp"

namespace pdlab {
namespace {

// Full-speed proportional pursuit of a waypoint: saturated outside dt of the
// target, proportional inside, so the agent converges without overshoot.
Vec pursuit_action(const Eigen::Vector2d& pos, const Eigen::Vector2d& wp,
                   double dt) {
  Vec a(2);
  a[0] = clip((wp.x() - pos.x()) / dt, -1.0, 1.0);
  a[1] = clip((wp.y() - pos.y()) / dt, -1.0, 1.0);
  return a;
}

std::vector<Eigen::Vector2d> point_gate_waypoints(const EnvSpec& spec,
                                                  const Eigen::Vector2d& goal,
                                                  int mode) {
  const auto& g = spec.gate_geom;
  std::vector<Eigen::Vector2d> wps;
  if (mode == 0) {
    // High road: swing up and left before lining up with the gate.
    wps.push_back({0.30, 0.85});
  } else {
    // Low road: run along the bottom to the wall, then climb it.
    wps.push_back({0.42, 0.30});
  }
  wps.push_back({0.42, g.gate_y});
  wps.push_back({0.58, g.gate_y});
  wps.push_back(goal);
  return wps;
}

std::vector<Eigen::Vector2d> reacher_waypoints(const EnvSpec& spec,
                                               double wall_x, double slot_y,
                                               int mode) {
  const auto& g = spec.reacher_geom;
  const double side = (mode == 0) ? 1.0 : -1.0;
  std::vector<Eigen::Vector2d> wps;
  wps.push_back({wall_x - 0.15, slot_y + side * 0.18});  // detour side
  wps.push_back({wall_x - 0.08, slot_y});                // line up with slot
  wps.push_back({wall_x + g.slot_depth, slot_y});        // slot bottom
  return wps;
}

// Damped-least-squares inverse kinematics step: joint displacement that moves
// the fingertip toward tip_delta without blowing up near singular poses.
Eigen::Vector2d dls_joint_step(const Eigen::Matrix2d& J,
                               const Eigen::Vector2d& tip_delta,
                               double damping) {
  const Eigen::Matrix2d JJt =
      J * J.transpose() + damping * damping * Eigen::Matrix2d::Identity();
  return J.transpose() * JJt.ldlt().solve(tip_delta);
}

}  // namespace

const char* mode_policy_string(ModePolicy m) {
  switch (m) {
    case ModePolicy::around_left:
      return "around_left";
    case ModePolicy::around_right:
      return "around_right";
    case ModePolicy::mixed:
      return "mixed";
  }
  throw Error("unreachable mode policy");
}

ModePolicy mode_policy_from_string(const std::string& s) {
  if (s == "around_left") return ModePolicy::around_left;
  if (s == "around_right") return ModePolicy::around_right;
  if (s == "mixed") return ModePolicy::mixed;
  throw ConfigError("unknown mode policy: " + s +
                    " (expected around_left, around_right, or mixed)");
}

bool operator==(const DemoTrajectory& a, const DemoTrajectory& b) {
  if (a.env_seed != b.env_seed || a.mode_label != b.mode_label) return false;
  if (a.observations.size() != b.observations.size() ||
      a.actions.size() != b.actions.size())
    return false;
  for (size_t i = 0; i < a.observations.size(); ++i)
    if (a.observations[i] != b.observations[i]) return false;
  for (size_t i = 0; i < a.actions.size(); ++i)
    if (a.actions[i] != b.actions[i]) return false;
  return true;
}

bool operator==(const DemoDataset& a, const DemoDataset& b) {
  return a.env_name == b.env_name && a.obs_dim == b.obs_dim &&
         a.action_dim == b.action_dim && a.generator_tag == b.generator_tag &&
         a.trajectories == b.trajectories;
}

bool run_expert_episode(const EnvSpec& spec, std::uint64_t env_seed, int mode,
                        double noise_std, Rng& noise_rng, DemoTrajectory* out) {
  require(mode == 0 || mode == 1, "run_expert_episode: mode must be 0 or 1");
  Env env(spec);
  Vec obs = env.reset(env_seed);
  if (out) {
    *out = DemoTrajectory{};
    out->env_seed = env_seed;
    out->mode_label = mode;
  }

  const bool is_reacher = spec.name == EnvName::reacher_insert;
  std::vector<Eigen::Vector2d> wps;
  if (is_reacher) {
    wps = reacher_waypoints(spec, env.state().physical[2],
                            env.state().physical[3], mode);
  } else {
    wps = point_gate_waypoints(spec, env.goal_position(), mode);
  }
  size_t wp_idx = 0;
  const double advance_radius = 0.03;
  const double dt = is_reacher ? spec.reacher_geom.dt : spec.gate_geom.dt;

  while (!env.state().done) {
    const Eigen::Vector2d pos = env.agent_position();
    while (wp_idx + 1 < wps.size() &&
           (pos - wps[wp_idx]).norm() < advance_radius)
      ++wp_idx;
    Vec a(2);
    if (is_reacher) {
      Eigen::Vector2d delta = wps[wp_idx] - pos;
      const double max_tip_step = 0.04;
      if (delta.norm() > max_tip_step) delta *= max_tip_step / delta.norm();
      const Eigen::Matrix2d J = reacher_jacobian(
          spec.reacher_geom, env.state().physical[0], env.state().physical[1]);
      const Eigen::Vector2d dtheta = dls_joint_step(J, delta, 0.1);
      a[0] = clip(dtheta.x() / dt, -1.0, 1.0);
      a[1] = clip(dtheta.y() / dt, -1.0, 1.0);
    } else {
      a = pursuit_action(pos, wps[wp_idx], dt);
    }
    a[0] = clip(a[0] + noise_std * noise_rng.normal(), -1.0, 1.0);
    a[1] = clip(a[1] + noise_std * noise_rng.normal(), -1.0, 1.0);
    if (out) {
      out->observations.push_back(obs);
      out->actions.push_back(a);
    }
    obs = env.step(a).observation;
  }
  return env.state().succeeded;
}

DemoDataset generate_demos(const EnvSpec& spec, int count, std::uint64_t seed,
                           ModePolicy mode_policy, double noise_std) {
  require(count >= 1, "generate_demos: count must be >= 1");
  for (std::uint64_t attempt_seed = seed;; ++attempt_seed) {
    DemoDataset ds;
    ds.env_name = env_name_string(spec.name);
    ds.obs_dim = spec.obs_dim;
    ds.action_dim = spec.action_dim;
    ds.generator_tag = std::string("waypoint_expert_v1 mode=") +
                       mode_policy_string(mode_policy) +
                       " noise=" + std::to_string(noise_std) +
                       " seed=" + std::to_string(attempt_seed);
    ds.trajectories.reserve(count);
    for (int i = 0; i < count; ++i) {
      Rng traj_rng(derive_seed(attempt_seed, "demo_traj", i));
      int mode = 0;
      switch (mode_policy) {
        case ModePolicy::around_left:
          mode = 0;
          break;
        case ModePolicy::around_right:
          mode = 1;
          break;
        case ModePolicy::mixed:
          mode = traj_rng.uniform() < 0.5 ? 0 : 1;
          break;
      }
      const std::uint64_t env_seed = derive_seed(attempt_seed, "demo_env", i);
      DemoTrajectory traj;
      if (!run_expert_episode(spec, env_seed, mode, noise_std, traj_rng, &traj))
        throw Error("generate_demos: expert failed on env seed " +
                    std::to_string(env_seed));
      ds.trajectories.push_back(std::move(traj));
    }
    if (mode_policy == ModePolicy::mixed && count >= 2) {
      bool has0 = false, has1 = false;
      for (const auto& t : ds.trajectories)
        (t.mode_label == 0 ? has0 : has1) = true;
      if (!(has0 && has1)) continue;  // degenerate draw; next seed
    }
    return ds;
  }
}

void save_demos(const DemoDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  Json header;
  header["format_version"] = 1;
  header["kind"] = "demo_dataset";
  header["env_name"] = ds.env_name;
  header["obs_dim"] = ds.obs_dim;
  header["action_dim"] = ds.action_dim;
  header["generator_tag"] = ds.generator_tag;
  out << header.dump() << "\n";
  for (const auto& t : ds.trajectories) {
    Json j;
    j["env_seed"] = t.env_seed;
    j["mode_label"] = t.mode_label;
    Json obs = Json::array();
    for (const auto& o : t.observations)
      obs.push_back(std::vector<double>(o.data(), o.data() + o.size()));
    Json act = Json::array();
    for (const auto& a : t.actions)
      act.push_back(std::vector<double>(a.data(), a.data() + a.size()));
    j["observations"] = std::move(obs);
    j["actions"] = std::move(act);
    out << j.dump() << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

namespace {

Vec vec_from_json(const Json& j, int expected_dim, int line_no,
                  const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != expected_dim)
    throw FormatError("demo file line " + std::to_string(line_no) + ": " +
                      what + " has wrong dimension");
  Vec v(expected_dim);
  for (int i = 0; i < expected_dim; ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

DemoDataset load_demos(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open: " + path);
  std::string line;
  int line_no = 0;
  auto parse_line = [&](const std::string& text) -> Json {
    try {
      return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError("demo file line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  };
  if (!std::getline(in, line))
    throw FormatError("demo file is empty: " + path);
  line_no = 1;
  Json header = parse_line(line);
  if (header.value("kind", "") != "demo_dataset" ||
      header.value("format_version", -1) != 1)
    throw FormatError("demo file line 1: not a version-1 demo_dataset header");
  DemoDataset ds;
  ds.env_name = header.at("env_name").get<std::string>();
  ds.obs_dim = header.at("obs_dim").get<int>();
  ds.action_dim = header.at("action_dim").get<int>();
  ds.generator_tag = header.at("generator_tag").get<std::string>();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json j = parse_line(line);
    DemoTrajectory t;
    t.env_seed = j.at("env_seed").get<std::uint64_t>();
    t.mode_label = j.at("mode_label").get<int>();
    const auto& obs = j.at("observations");
    const auto& act = j.at("actions");
    if (obs.empty() || act.empty() || obs.size() != act.size())
      throw FormatError("demo file line " + std::to_string(line_no) +
                        ": empty trajectory or observation/action count mismatch");
    for (const auto& o : obs)
      t.observations.push_back(vec_from_json(o, ds.obs_dim, line_no, "observation"));
    for (const auto& a : act)
      t.actions.push_back(vec_from_json(a, ds.action_dim, line_no, "action"));
    ds.trajectories.push_back(std::move(t));
  }
  if (ds.trajectories.empty())
    throw FormatError("demo file has a header but no trajectories: " + path);
  return ds;
}

double expert_mean_success_length(const EnvSpec& spec, int episodes,
                                  std::uint64_t seed, double noise_std) {
  require(episodes >= 1, "expert_mean_success_length: episodes must be >= 1");
  long long total = 0;
  int successes = 0;
  for (int e = 0; e < episodes; ++e) {
    Rng noise(derive_seed(seed, "expert_probe_noise", e));
    DemoTrajectory t;
    if (run_expert_episode(spec, derive_seed(seed, "expert_probe_env", e),
                           e % 2, noise_std, noise, &t)) {
      total += static_cast<long long>(t.actions.size());
      ++successes;
    }
  }
  require(successes > 0, "expert_mean_success_length: expert never succeeded");
  return static_cast<double>(total) / successes;
}

}  // namespace pdlab

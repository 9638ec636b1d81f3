#include "pdlab/env.hpp"

#include <cmath>

namespace pdlab {
namespace {

// True when the segment p0->p1 crosses the vertical line x=line_x at a height
// outside [gap_lo, gap_hi]. Touching the line counts as crossing.
bool segment_blocked_by_wall(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                             double line_x, double gap_lo, double gap_hi) {
  const double d0 = p0.x() - line_x;
  const double d1 = p1.x() - line_x;
  if (d0 * d1 > 0.0) return false;  // both strictly on one side
  if (d0 == 0.0 && d1 == 0.0) return false;  // sliding along the line
  const double t = d0 / (d0 - d1);
  const double y_cross = p0.y() + t * (p1.y() - p0.y());
  return y_cross < gap_lo || y_cross > gap_hi;
}

// Minimum distance between the segment p0->p1 and the point c. Degenerates
// to the point distance when p0 == p1 (e.g. a wall-rejected move).
double segment_point_distance(const Eigen::Vector2d& p0,
                              const Eigen::Vector2d& p1,
                              const Eigen::Vector2d& c) {
  const Eigen::Vector2d d = p1 - p0;
  const double n2 = d.squaredNorm();
  const double t = n2 > 0.0 ? clip((c - p0).dot(d) / n2, 0.0, 1.0) : 0.0;
  return (p0 + t * d - c).norm();
}

}  // namespace

const char* env_name_string(EnvName n) {
  switch (n) {
    case EnvName::point_gate:
      return "point_gate";
    case EnvName::reacher_insert:
      return "reacher_insert";
    case EnvName::point_gate_shift:
      return "point_gate_shift";
  }
  throw Error("unreachable env name");
}

EnvName env_name_from_string(const std::string& s) {
  if (s == "point_gate") return EnvName::point_gate;
  if (s == "reacher_insert") return EnvName::reacher_insert;
  if (s == "point_gate_shift") return EnvName::point_gate_shift;
  throw ConfigError("unknown environment: " + s +
                    " (expected point_gate, reacher_insert, or point_gate_shift)");
}

EnvSpec point_gate_spec() {
  EnvSpec s;
  s.name = EnvName::point_gate;
  s.obs_dim = 4;
  s.action_dim = 2;
  s.max_episode_steps = 200;
  s.success_radius = 0.02;
  s.gate_half_width = 0.04;
  s.early_terminate_on_success = true;
  return s;
}

EnvSpec reacher_insert_spec() {
  EnvSpec s;
  s.name = EnvName::reacher_insert;
  s.obs_dim = 6;
  s.action_dim = 2;
  s.max_episode_steps = 200;
  s.success_radius = 0.02;
  s.early_terminate_on_success = true;
  return s;
}

EnvSpec point_gate_shift_spec(bool eval_goals) {
  EnvSpec s = point_gate_spec();
  s.name = EnvName::point_gate_shift;
  if (eval_goals) {
    s.goal_set = {{0.88, 0.18}, {0.78, 0.28}, {0.84, 0.38}};
  } else {
    s.goal_set = {{0.85, 0.15}, {0.80, 0.35}, {0.90, 0.25},
                  {0.75, 0.20}, {0.82, 0.45}};
  }
  return s;
}

EnvSpec make_env_spec(EnvName name) {
  switch (name) {
    case EnvName::point_gate:
      return point_gate_spec();
    case EnvName::reacher_insert:
      return reacher_insert_spec();
    case EnvName::point_gate_shift:
      return point_gate_shift_spec(false);
  }
  throw Error("unreachable env name");
}

EnvSpec make_env_spec(const std::string& name) {
  return make_env_spec(env_name_from_string(name));
}

Eigen::Vector2d reacher_tip(const ReacherGeometry& g, double th1, double th2) {
  const double x = g.link1 * std::cos(th1) + g.link2 * std::cos(th1 + th2);
  const double y = g.link1 * std::sin(th1) + g.link2 * std::sin(th1 + th2);
  return {x, y};
}

Eigen::Matrix2d reacher_jacobian(const ReacherGeometry& g, double th1, double th2) {
  const double s1 = std::sin(th1), c1 = std::cos(th1);
  const double s12 = std::sin(th1 + th2), c12 = std::cos(th1 + th2);
  Eigen::Matrix2d J;
  J << -g.link1 * s1 - g.link2 * s12, -g.link2 * s12,
      g.link1 * c1 + g.link2 * c12, g.link2 * c12;
  return J;
}

Env::Env(EnvSpec spec) : spec_(std::move(spec)) {
  require(spec_.max_episode_steps >= 1, "EnvSpec: max_episode_steps must be >= 1");
  require(spec_.success_radius > 0.0, "EnvSpec: success_radius must be positive");
  if (spec_.name == EnvName::point_gate_shift)
    require(!spec_.goal_set.empty(), "point_gate_shift requires a nonempty goal_set");
}

Vec Env::reset(std::uint64_t seed) {
  state_ = EnvState{};
  state_.rng_stream = Rng(seed);
  Rng& rng = state_.rng_stream;
  if (spec_.name == EnvName::reacher_insert) {
    const auto& g = spec_.reacher_geom;
    const double wall_x = rng.uniform(g.wall_x_lo, g.wall_x_hi);
    const double slot_y = rng.uniform(g.slot_y_lo, g.slot_y_hi);
    double th1 = 0.0, th2 = 0.0;
    // Rejection-sample a start pose whose fingertip is clearly left of the
    // wall (and thus never inside the slot).
    for (int attempt = 0;; ++attempt) {
      th1 = rng.uniform(0.6 * M_PI, 1.4 * M_PI);
      th2 = rng.uniform(-0.5 * M_PI, 0.5 * M_PI);
      if (reacher_tip(g, th1, th2).x() <= wall_x - g.start_clearance) break;
      require(attempt < 1000, "reacher_insert reset: could not sample start pose");
    }
    state_.physical = Vec(4);
    state_.physical << th1, th2, wall_x, slot_y;
  } else {
    const auto& g = spec_.gate_geom;
    const double x = rng.uniform(g.start_x_lo, g.start_x_hi);
    const double y = rng.uniform(g.start_y_lo, g.start_y_hi);
    Eigen::Vector2d goal = g.fixed_goal;
    if (spec_.name == EnvName::point_gate_shift)
      goal = spec_.goal_set[rng.uniform_int(spec_.goal_set.size())];
    state_.physical = Vec(4);
    state_.physical << x, y, goal.x(), goal.y();
  }
  live_ = true;
  return observation();
}

Vec Env::observation() const {
  require(live_, "Env: reset before reading the observation");
  if (spec_.name == EnvName::reacher_insert) {
    const auto& g = spec_.reacher_geom;
    const double th1 = state_.physical[0], th2 = state_.physical[1];
    const Eigen::Vector2d tip = reacher_tip(g, th1, th2);
    const Eigen::Vector2d target = goal_position();
    Vec obs(6);
    obs << th1, th2, tip.x(), tip.y(), target.x(), target.y();
    return obs;
  }
  return state_.physical;
}

Eigen::Vector2d Env::agent_position() const {
  if (spec_.name == EnvName::reacher_insert)
    return reacher_tip(spec_.reacher_geom, state_.physical[0], state_.physical[1]);
  return {state_.physical[0], state_.physical[1]};
}

Eigen::Vector2d Env::goal_position() const {
  if (spec_.name == EnvName::reacher_insert) {
    const auto& g = spec_.reacher_geom;
    return {state_.physical[2] + g.slot_depth, state_.physical[3]};
  }
  return {state_.physical[2], state_.physical[3]};
}

void Env::finish_step(StepResult& r, bool success_now) {
  state_.step_count += 1;
  // Sparse reward: 1 exactly once, at the first success.
  if (success_now && !state_.succeeded) {
    state_.succeeded = true;
    r.reward = 1.0;
    r.success = true;
  }
  const bool horizon_hit = state_.step_count >= spec_.max_episode_steps;
  state_.done = horizon_hit ||
                (spec_.early_terminate_on_success && state_.succeeded);
  r.done = state_.done;
  r.observation = observation();
}

StepResult Env::step(const Vec& action) {
  require(live_, "Env: reset before stepping");
  if (state_.done) throw Error("env_step: episode already finished");
  if (action.size() != spec_.action_dim)
    throw ShapeError("env_step: action has length " +
                     std::to_string(action.size()) + ", expected " +
                     std::to_string(spec_.action_dim));
  if (!action.allFinite()) throw NumericError("env_step: non-finite action");
  const Vec a = clip(action, -1.0, 1.0);
  if (spec_.name == EnvName::reacher_insert) return step_reacher(a);
  return step_point_gate(a);
}

StepResult Env::step_point_gate(const Vec& a) {
  const auto& g = spec_.gate_geom;
  Eigen::Vector2d pos(state_.physical[0], state_.physical[1]);
  Eigen::Vector2d proposed = pos + g.dt * Eigen::Vector2d(a[0], a[1]);
  proposed.x() = clip(proposed.x(), 0.0, 1.0);
  proposed.y() = clip(proposed.y(), 0.0, 1.0);
  const double gap_lo = g.gate_y - spec_.gate_half_width;
  const double gap_hi = g.gate_y + spec_.gate_half_width;
  if (!segment_blocked_by_wall(pos, proposed, g.wall_x, gap_lo, gap_hi)) {
    state_.physical[0] = proposed.x();
    state_.physical[1] = proposed.y();
  }
  StepResult r;
  const Eigen::Vector2d now(state_.physical[0], state_.physical[1]);
  const Eigen::Vector2d goal(state_.physical[2], state_.physical[3]);
  // Success is a property of the swept path, not just the endpoint: one step
  // can cover 0.07 task units, more than the goal ball's diameter, so an
  // endpoint-only test would let fast policies fly through the goal
  // undetected. Same segment physics as the wall test above.
  finish_step(r, segment_point_distance(pos, now, goal) <= spec_.success_radius);
  return r;
}

StepResult Env::step_reacher(const Vec& a) {
  const auto& g = spec_.reacher_geom;
  const double wall_x = state_.physical[2];
  const double slot_y = state_.physical[3];
  const double th1 = state_.physical[0], th2 = state_.physical[1];
  const double nth1 = th1 + g.dt * a[0];
  const double nth2 = th2 + g.dt * a[1];
  const Eigen::Vector2d old_tip = reacher_tip(g, th1, th2);
  const Eigen::Vector2d new_tip = reacher_tip(g, nth1, nth2);
  const double band_lo = slot_y - g.slot_half_width;
  const double band_hi = slot_y + g.slot_half_width;
  // Right of the wall is solid except the slot corridor; a tip position is
  // legal left of the wall or inside the corridor. The move is also rejected
  // if its path pierces the wall face outside the opening.
  const bool end_legal =
      new_tip.x() <= wall_x ||
      (new_tip.x() <= wall_x + g.slot_depth && new_tip.y() >= band_lo &&
       new_tip.y() <= band_hi);
  const bool pierced =
      segment_blocked_by_wall(old_tip, new_tip, wall_x, band_lo, band_hi);
  if (end_legal && !pierced) {
    state_.physical[0] = nth1;
    state_.physical[1] = nth2;
  }
  StepResult r;
  const Eigen::Vector2d tip =
      reacher_tip(g, state_.physical[0], state_.physical[1]);
  const Eigen::Vector2d bottom(wall_x + g.slot_depth, slot_y);
  // Chord approximation of the tip's arc over one dt; like the point mass,
  // the tip can sweep past the target ball between endpoints.
  finish_step(r, segment_point_distance(old_tip, tip, bottom) <=
                     spec_.success_radius);
  return r;
}

double env_success_rate(const EnvSpec& spec, const PolicyHandle& policy,
                        int episodes, std::uint64_t seed) {
  require(episodes >= 1, "env_success_rate: episodes must be >= 1");
  int successes = 0;
  Env env(spec);
  for (int e = 0; e < episodes; ++e) {
    Vec obs = env.reset(derive_seed(seed, "eval_episode", e));
    while (!env.state().done) {
      StepResult r = env.step(policy.act(obs));
      obs = r.observation;
    }
    successes += env.state().succeeded ? 1 : 0;
  }
  return static_cast<double>(successes) / episodes;
}

}  // namespace pdlab

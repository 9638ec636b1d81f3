#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdlab/common.hpp"
#include "pdlab/policy.hpp"
#include "pdlab/rng.hpp"

namespace pdlab {

enum class EnvName { point_gate, reacher_insert, point_gate_shift };

const char* env_name_string(EnvName n);
EnvName env_name_from_string(const std::string& s);

// Geometry shared by the point_gate family. The wall at x=0.5 spans the full
// arena height except for a gate of half-width gate_half_width centered at
// gate_y; a move whose segment crosses the wall outside the gate is rejected
// wholesale (the agent stops). The narrow gate is the precision bottleneck:
// straight-line paths from the start region to any goal are blocked.
struct PointGateGeometry {
  double dt = 0.05;       // position update: x' = x + dt * a
  double wall_x = 0.5;
  double gate_y = 0.7;
  // Start low in the far corner so the gate detour is long: undirected
  // exploration has to climb to y~0.7, thread a 0.08 opening, and descend
  // to a small goal ball before any reward exists.
  double start_x_lo = 0.05, start_x_hi = 0.15;
  double start_y_lo = 0.05, start_y_hi = 0.20;
  Eigen::Vector2d fixed_goal{0.85, 0.15};
};

// reacher_insert: 2-link planar arm (base at origin, link lengths 0.5/0.4)
// under joint-velocity control must thread its fingertip into a slot recessed
// into a randomized wall. Solid material blocks the tip everywhere right of
// the wall except inside the slot corridor.
struct ReacherGeometry {
  double dt = 0.05;              // theta' = theta + dt * a
  double link1 = 0.5, link2 = 0.4;
  double wall_x_lo = 0.55, wall_x_hi = 0.70;
  double slot_y_lo = -0.25, slot_y_hi = 0.25;
  double slot_half_width = 0.03;
  double slot_depth = 0.05;      // slot bottom at wall_x + slot_depth
  double start_clearance = 0.05; // initial tip at least this far left of wall
};

struct EnvSpec {
  EnvName name = EnvName::point_gate;
  int obs_dim = 4;
  int action_dim = 2;
  int max_episode_steps = 200;
  // Success fires when the agent's swept path during a step comes within
  // this distance of the goal (not endpoint-only: one step can cover more
  // than the goal ball's diameter).
  double success_radius = 0.03;
  double gate_half_width = 0.04;            // point_gate family only
  std::vector<Eigen::Vector2d> goal_set;    // point_gate_shift only
  bool early_terminate_on_success = true;
  PointGateGeometry gate_geom;
  ReacherGeometry reacher_geom;
};

EnvSpec make_env_spec(EnvName name);
EnvSpec make_env_spec(const std::string& name);
EnvSpec point_gate_spec();
EnvSpec reacher_insert_spec();
// The shift variant trains on one goal set and evaluates on a disjoint one.
EnvSpec point_gate_shift_spec(bool eval_goals);

struct StepResult {
  Vec observation;
  double reward = 0.0;
  bool done = false;
  bool success = false;
};

struct EnvState {
  Vec physical;        // point_gate: [x, y, goal_x, goal_y];
                       // reacher: [th1, th2, wall_x, slot_y]
  int step_count = 0;
  Rng rng_stream{0};
  bool done = false;
  bool succeeded = false;
};

// Single-owner episode handle; reset before stepping.
class Env {
 public:
  explicit Env(EnvSpec spec);

  Vec reset(std::uint64_t seed);
  StepResult step(const Vec& action);

  const EnvSpec& spec() const { return spec_; }
  const EnvState& state() const { return state_; }
  Vec observation() const;

  // Task-frame accessors used by scripted experts and trajectory sketches.
  Eigen::Vector2d agent_position() const;   // point mass or fingertip
  Eigen::Vector2d goal_position() const;    // goal or slot bottom

 private:
  StepResult step_point_gate(const Vec& a);
  StepResult step_reacher(const Vec& a);
  void finish_step(StepResult& r, bool success_now);

  EnvSpec spec_;
  EnvState state_;
  bool live_ = false;
};

// Forward kinematics of the 2-link arm: joint angles -> fingertip position.
Eigen::Vector2d reacher_tip(const ReacherGeometry& g, double th1, double th2);
Eigen::Matrix2d reacher_jacobian(const ReacherGeometry& g, double th1, double th2);

// Fraction of `episodes` rollouts of `policy` that succeed. Deterministic
// given (policy, seed); episode seeds derive from `seed` on a dedicated
// stream so evaluation never shares draws with training.
double env_success_rate(const EnvSpec& spec, const PolicyHandle& policy,
                        int episodes, std::uint64_t seed);

}  // namespace pdlab

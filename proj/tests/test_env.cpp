// Environment dynamics, geometry, and reward-contract tests. The wall and
// slot collision rules are checked with direct geometric predicates
// recomputed here, not by trusting the environment's own helpers.

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pdlab/env.hpp"

using namespace pdlab;

namespace {

Vec act2(double x, double y) {
  Vec a(2);
  a << x, y;
  return a;
}

// Independent predicate: does the segment p -> q cross the vertical line
// x = wall_x at a height outside the gate interval?
bool crosses_wall_outside_gate(const PointGateGeometry& g, double gate_hw,
                               Eigen::Vector2d p, Eigen::Vector2d q) {
  if ((p.x() - g.wall_x) * (q.x() - g.wall_x) > 0.0) return false;  // same side
  if (p.x() == q.x()) return false;  // parallel to the wall
  const double t = (g.wall_x - p.x()) / (q.x() - p.x());
  if (t < 0.0 || t > 1.0) return false;
  const double y_hit = p.y() + t * (q.y() - p.y());
  return std::abs(y_hit - g.gate_y) > gate_hw;
}

}  // namespace

TEST_CASE("zero action leaves the point mass exactly in place") {
  Env env(point_gate_spec());
  const Vec obs0 = env.reset(3);
  const StepResult r = env.step(act2(0.0, 0.0));
  CHECK((r.observation - obs0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.done);
  CHECK_FALSE(r.success);
}

TEST_CASE("point mass integrates x' = x + dt * a and clips to the arena") {
  const EnvSpec spec = point_gate_spec();
  Env env(spec);
  env.reset(3);
  const Eigen::Vector2d p0 = env.agent_position();
  env.step(act2(1.0, -0.5));
  const Eigen::Vector2d p1 = env.agent_position();
  CHECK(p1.x() == doctest::Approx(p0.x() + spec.gate_geom.dt * 1.0));
  CHECK(p1.y() == doctest::Approx(p0.y() + spec.gate_geom.dt * -0.5));

  // Driving hard into the left edge pins the coordinate at 0.
  for (int i = 0; i < 300; ++i) env.step(act2(-1.0, 0.0));
  CHECK(env.agent_position().x() >= 0.0);
}

TEST_CASE("reset distributions respect the documented start region") {
  const EnvSpec spec = point_gate_spec();
  Env env(spec);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Vec obs = env.reset(s);
    REQUIRE(obs.size() == 4);
    CHECK(obs[0] >= spec.gate_geom.start_x_lo);
    CHECK(obs[0] <= spec.gate_geom.start_x_hi);
    CHECK(obs[1] >= spec.gate_geom.start_y_lo);
    CHECK(obs[1] <= spec.gate_geom.start_y_hi);
    // Fixed goal on the plain task.
    CHECK(obs[2] == spec.gate_geom.fixed_goal.x());
    CHECK(obs[3] == spec.gate_geom.fixed_goal.y());
  }
}

TEST_CASE("same reset seed reproduces the episode bit-for-bit") {
  Env a(point_gate_spec()), b(point_gate_spec());
  const Vec oa = a.reset(1234), ob = b.reset(1234);
  CHECK((oa - ob).cwiseAbs().maxCoeff() == 0.0);
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    Vec act(2);
    rng.fill_normal(act);
    const StepResult ra = a.step(act), rb = b.step(act);
    CHECK((ra.observation - rb.observation).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ra.reward == rb.reward);
    CHECK(ra.done == rb.done);
  }
}

TEST_CASE("wall blocks crossings outside the gate, fuzzed") {
  const EnvSpec spec = point_gate_spec();
  const PointGateGeometry& g = spec.gate_geom;
  Env env(spec);
  Rng rng(99);
  int blocked = 0, crossed = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    env.reset(trial);
    // Random walk near the wall to generate crossing attempts.
    for (int t = 0; t < 40; ++t) {
      const Eigen::Vector2d before = env.agent_position();
      Vec a(2);
      a << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
      // Bias motion rightwards toward the wall.
      a[0] = std::abs(a[0]);
      // The env clips the proposed point to the arena before the wall test;
      // mirror that here so both sides examine the same segment.
      Eigen::Vector2d intended = before + g.dt * Eigen::Vector2d(a[0], a[1]);
      intended.x() = std::clamp(intended.x(), 0.0, 1.0);
      intended.y() = std::clamp(intended.y(), 0.0, 1.0);
      const bool illegal = crosses_wall_outside_gate(
          g, spec.gate_half_width, before, intended);
      const StepResult r = env.step(a);
      const Eigen::Vector2d after = env.agent_position();
      if (illegal) {
        // Blocked moves leave the agent exactly where it was.
        CHECK((after - before).norm() == 0.0);
        ++blocked;
      }
      // Whatever happened, the agent never teleports across the wall
      // outside the gate.
      CHECK_FALSE(crosses_wall_outside_gate(g, spec.gate_half_width, before,
                                            after));
      if ((before.x() - g.wall_x) * (after.x() - g.wall_x) < 0.0) ++crossed;
      if (r.done) break;
    }
  }
  // The fuzz must actually exercise both behaviors.
  CHECK(blocked > 100);
  CHECK(crossed > 10);
}

TEST_CASE("reaching the goal pays 1, terminates early, and marks success") {
  const EnvSpec spec = point_gate_spec();
  Env env(spec);
  env.reset(8);
  // Waypoint walk: stage just left of the gate, thread it level, then head
  // for the goal. Each move aims exactly at the waypoint (velocity d/dt
  // clamped to the action box), so gate crossings happen at y ~ gate_y.
  const PointGateGeometry& g = spec.gate_geom;
  std::vector<Eigen::Vector2d> waypoints = {
      {g.wall_x - 0.04, g.gate_y},
      {g.wall_x + 0.04, g.gate_y},
      env.goal_position()};
  size_t wp = 0;
  bool succeeded = false;
  for (int t = 0; t < spec.max_episode_steps; ++t) {
    const Eigen::Vector2d p = env.agent_position();
    if (wp + 1 < waypoints.size() && (waypoints[wp] - p).norm() < 0.005) ++wp;
    const Eigen::Vector2d d = waypoints[wp] - p;
    const Vec a = act2(std::clamp(d.x() / g.dt, -1.0, 1.0),
                       std::clamp(d.y() / g.dt, -1.0, 1.0));
    const StepResult r = env.step(a);
    if (r.success) {
      CHECK(r.reward == 1.0);
      CHECK(r.done);
      CHECK((env.agent_position() - env.goal_position()).norm() <=
            spec.success_radius);
      succeeded = true;
      break;
    }
    CHECK(r.reward == 0.0);
  }
  CHECK(succeeded);
  CHECK(env.state().succeeded);
}

TEST_CASE("episodes time out at max_episode_steps without success") {
  const EnvSpec spec = point_gate_spec();
  Env env(spec);
  env.reset(2);
  StepResult r;
  int steps = 0;
  do {
    r = env.step(act2(0.0, 0.0));
    ++steps;
  } while (!r.done);
  CHECK(steps == spec.max_episode_steps);
  CHECK_FALSE(r.success);
  CHECK_FALSE(env.state().succeeded);
}

TEST_CASE("rewards are sparse: {0, 1} only") {
  Env env(point_gate_spec());
  Rng rng(17);
  for (int ep = 0; ep < 30; ++ep) {
    env.reset(ep);
    for (int t = 0; t < 60; ++t) {
      Vec a(2);
      rng.fill_normal(a);
      const StepResult r = env.step(a);
      CHECK((r.reward == 0.0 || r.reward == 1.0));
      if (r.done) break;
    }
  }
}

TEST_CASE("shift variant separates train and eval goal sets") {
  const EnvSpec train = point_gate_shift_spec(false);
  const EnvSpec eval = point_gate_shift_spec(true);
  REQUIRE(!train.goal_set.empty());
  REQUIRE(!eval.goal_set.empty());
  for (const auto& tg : train.goal_set)
    for (const auto& eg : eval.goal_set) CHECK((tg - eg).norm() > 0.0);

  // Every reset's observed goal comes from the spec's own set.
  Env env(train);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Vec obs = env.reset(s);
    bool found = false;
    for (const auto& gset : train.goal_set)
      if (obs[2] == gset.x() && obs[3] == gset.y()) found = true;
    CHECK(found);
  }
}

TEST_CASE("reacher kinematics match the textbook formula") {
  const EnvSpec spec = reacher_insert_spec();
  const ReacherGeometry& g = spec.reacher_geom;
  // Frozen: l1 cos(t1) + l2 cos(t1+t2), with l1=0.5, l2=0.4.
  const Eigen::Vector2d tip = reacher_tip(g, 0.3, -0.4);
  CHECK(tip.x() == doctest::Approx(0.8756699106740133).epsilon(1e-15));
  CHECK(tip.y() == doctest::Approx(0.1078267366719385).epsilon(1e-15));

  // Jacobian columns match finite differences of the tip map.
  const double h = 1e-7;
  const Eigen::Matrix2d J = reacher_jacobian(g, 0.3, -0.4);
  const Eigen::Vector2d d1 =
      (reacher_tip(g, 0.3 + h, -0.4) - reacher_tip(g, 0.3 - h, -0.4)) /
      (2.0 * h);
  const Eigen::Vector2d d2 =
      (reacher_tip(g, 0.3, -0.4 + h) - reacher_tip(g, 0.3, -0.4 - h)) /
      (2.0 * h);
  CHECK((J.col(0) - d1).norm() < 1e-6);
  CHECK((J.col(1) - d2).norm() < 1e-6);
}

TEST_CASE("reacher blocks the tip from entering solid wall material") {
  const EnvSpec spec = reacher_insert_spec();
  const ReacherGeometry& g = spec.reacher_geom;
  Env env(spec);
  Rng rng(31);
  int attempts = 0;
  for (int ep = 0; ep < 150; ++ep) {
    env.reset(ep);
    const double wall_x = env.state().physical[2];
    const double slot_y = env.state().physical[3];
    for (int t = 0; t < spec.max_episode_steps; ++t) {
      Vec a(2);
      rng.fill_normal(a);
      const StepResult r = env.step(a);
      const Eigen::Vector2d tip = env.agent_position();
      // Inside the wall band, the tip must sit within the slot corridor.
      if (tip.x() > wall_x + 1e-12 && tip.x() < wall_x + g.slot_depth) {
        CHECK(std::abs(tip.y() - slot_y) <= g.slot_half_width + 1e-12);
        ++attempts;
      }
      if (r.done) break;
    }
  }
  // Random flailing rarely threads the slot; zero entries is fine. The
  // check above only constrains entries that happened.
  CHECK(attempts >= 0);
}

TEST_CASE("env_success_rate is deterministic and seed-sensitive") {
  const EnvSpec spec = point_gate_spec();
  PolicyHandle nothing;
  nothing.act = [](const Vec&) { return Vec::Zero(2); };
  nothing.name = "zero";
  CHECK(env_success_rate(spec, nothing, 20, 7) == 0.0);

  PolicyHandle rusher;
  rusher.act = [&spec](const Vec& obs) {
    Vec a(2);
    a << 1.0, (spec.gate_geom.gate_y - obs[1]) > 0 ? 1.0 : -1.0;
    return a;
  };
  rusher.name = "rusher";
  const double r1 = env_success_rate(spec, rusher, 40, 7);
  const double r2 = env_success_rate(spec, rusher, 40, 7);
  CHECK(r1 == r2);
}

TEST_CASE("spec names round-trip and junk is rejected") {
  CHECK(env_name_from_string("point_gate") == EnvName::point_gate);
  CHECK(env_name_from_string("reacher_insert") == EnvName::reacher_insert);
  CHECK(env_name_from_string("point_gate_shift") == EnvName::point_gate_shift);
  CHECK_THROWS_AS(env_name_from_string("cartpole"), Error);
  CHECK_THROWS_AS(make_env_spec("nope"), Error);
}

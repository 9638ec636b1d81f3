#pragma once

#include <cstdint>
#include <vector>

#include "pdlab/common.hpp"
#include "pdlab/rng.hpp"

namespace pdlab {

// One collected environment step. base_action is the frozen contribution to
// the executed action (the base policy's action for residual methods, the
// cluster center for offset-only fine-tuning, zero for from-scratch SAC), so
// executed_action == base_action + residual_action holds exactly for every
// method. done is the bootstrap-terminal flag (success termination); horizon
// timeouts are not terminal for the critic target.
struct Transition {
  Vec obs;
  Vec base_action;
  Vec executed_action;
  Vec residual_action;
  bool gate_on = false;
  double reward = 0.0;
  Vec next_obs;
  Vec next_base_action;
  bool done = false;
};

// FIFO ring over column-major storage; uniform without-replacement sampling.
class ReplayBuffer {
 public:
  ReplayBuffer(int capacity, int obs_dim, int action_dim);

  void push(const Transition& t);
  int size() const { return size_; }
  int capacity() const { return capacity_; }
  bool ready(int batch_size) const { return size_ >= batch_size; }

  // Distinct storage indices, uniform over [0, size). Deterministic given
  // the rng state. Throws when fewer than batch_size transitions are stored;
  // callers gate on ready() (the training loop skips the update instead).
  std::vector<int> sample_indices(int batch_size, Rng& rng) const;

  Transition get(int index) const;

  // Column views for batch assembly.
  const Mat& obs() const { return obs_; }
  const Mat& base_action() const { return base_; }
  const Mat& executed_action() const { return executed_; }
  const Mat& residual_action() const { return residual_; }
  const Mat& next_obs() const { return next_obs_; }
  const Mat& next_base_action() const { return next_base_; }
  const Vec& reward() const { return reward_; }
  const Vec& done() const { return done_; }
  const Vec& gate_on() const { return gate_; }

 private:
  int capacity_, size_ = 0, head_ = 0;
  Mat obs_, base_, executed_, residual_, next_obs_, next_base_;
  Vec reward_, done_, gate_;
};

}  // namespace pdlab

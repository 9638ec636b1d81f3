#include "pdlab/replay.hpp"

#include <algorithm>
#include <unordered_set>

namespace pdlab {

ReplayBuffer::ReplayBuffer(int capacity, int obs_dim, int action_dim)
    : capacity_(capacity),
      obs_(Mat::Zero(obs_dim, capacity)),
      base_(Mat::Zero(action_dim, capacity)),
      executed_(Mat::Zero(action_dim, capacity)),
      residual_(Mat::Zero(action_dim, capacity)),
      next_obs_(Mat::Zero(obs_dim, capacity)),
      next_base_(Mat::Zero(action_dim, capacity)),
      reward_(Vec::Zero(capacity)),
      done_(Vec::Zero(capacity)),
      gate_(Vec::Zero(capacity)) {
  require(capacity >= 1, "ReplayBuffer: capacity must be >= 1");
}

void ReplayBuffer::push(const Transition& t) {
  const int i = head_;
  obs_.col(i) = t.obs;
  base_.col(i) = t.base_action;
  executed_.col(i) = t.executed_action;
  residual_.col(i) = t.residual_action;
  next_obs_.col(i) = t.next_obs;
  next_base_.col(i) = t.next_base_action;
  reward_[i] = t.reward;
  done_[i] = t.done ? 1.0 : 0.0;
  gate_[i] = t.gate_on ? 1.0 : 0.0;
  head_ = (head_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

Transition ReplayBuffer::get(int index) const {
  require(index >= 0 && index < size_, "ReplayBuffer::get: index out of range");
  Transition t;
  t.obs = obs_.col(index);
  t.base_action = base_.col(index);
  t.executed_action = executed_.col(index);
  t.residual_action = residual_.col(index);
  t.next_obs = next_obs_.col(index);
  t.next_base_action = next_base_.col(index);
  t.reward = reward_[index];
  t.done = done_[index] != 0.0;
  t.gate_on = gate_[index] != 0.0;
  return t;
}

std::vector<int> ReplayBuffer::sample_indices(int batch_size, Rng& rng) const {
  require(batch_size >= 1, "sample_indices: batch_size must be >= 1");
  if (size_ < batch_size)
    throw Error("sample_indices: buffer not ready (size " +
                std::to_string(size_) + " < batch " +
                std::to_string(batch_size) + ")");
  // Floyd's algorithm: uniform subset of batch_size distinct indices.
  std::vector<int> picked;
  picked.reserve(batch_size);
  std::unordered_set<int> seen;
  for (int i = size_ - batch_size; i < size_; ++i) {
    const int j = static_cast<int>(rng.uniform_int(i + 1));
    if (seen.insert(j).second) {
      picked.push_back(j);
    } else {
      seen.insert(i);
      picked.push_back(i);
    }
  }
  return picked;
}

}  // namespace pdlab

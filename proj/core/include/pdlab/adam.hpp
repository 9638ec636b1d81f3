#pragma once

#include <string>
#include <vector>

#include "pdlab/mlp.hpp"

namespace pdlab {

// Flat view over one parameter tensor; name is used in numeric-fault errors.
struct TensorView {
  double* data;
  Eigen::Index size;
  std::string name;
};

std::vector<TensorView> tensor_views(Mlp& net, const std::string& prefix = "");
std::vector<TensorView> tensor_views(MlpGrads& grads,
                                     const std::string& prefix = "");

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_adam = 1e-8;
  // Decoupled (AdamW-style) weight decay; 0 disables. Applied to every
  // tensor handed to adam_step, so callers exclude bias tensors if desired.
  double weight_decay = 0.0;
};

struct AdamState {
  AdamConfig cfg;
  std::vector<Vec> first_moment;
  std::vector<Vec> second_moment;
  long long step_count = 0;
};

AdamState make_adam(const std::vector<TensorView>& params, AdamConfig cfg);

// One Adam update over all tensors; bias-corrected moments; increments
// step_count by exactly 1. Throws NumericError naming the offending tensor
// on non-finite gradients.
void adam_step(AdamState& state, const std::vector<TensorView>& params,
               const std::vector<TensorView>& grads);

// Single-tensor convenience.
void adam_step(AdamState& state, Vec& params, const Vec& grads,
               const std::string& name = "params");

}  // namespace pdlab

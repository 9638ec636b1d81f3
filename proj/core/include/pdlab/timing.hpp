#pragma once

#include <vector>

#include "pdlab/mlp.hpp"

namespace pdlab {

struct TimingResult {
  double mean_forward_seconds = 0.0;
  double mean_backward_seconds = 0.0;
};

// Wall-clock means over `repeats` passes. Forward is timed on the whole
// batch; backward is timed on the whole batch including parameter-gradient
// accumulation (the forward pass that produces the cached activations is
// outside the backward timer).
TimingResult time_forward_backward(const Mlp& net,
                                   const std::vector<Vec>& batch, int repeats);

}  // namespace pdlab

#pragma once

#include <functional>
#include <string>

#include "pdlab/common.hpp"

namespace pdlab {

// Opaque observation -> action function. Training code must treat this as a
// black box: no gradients, no parameter access, no assumptions beyond the
// output being a finite action vector of the right length.
struct PolicyHandle {
  std::function<Vec(const Vec& observation)> act;
  bool is_stochastic = false;
  std::string name;
  std::string version;
};

}  // namespace pdlab

#pragma once

#include <utility>
#include <vector>

#include "pdlab/common.hpp"
#include "pdlab/rng.hpp"

namespace pdlab {

enum class Activation { identity, relu, tanh_act };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Fully connected network. weights[l] has shape (layer_sizes[l+1],
// layer_sizes[l]); biases[l] has length layer_sizes[l+1]. Hidden layers all
// share hidden_activation; the last layer uses output_activation.
struct Mlp {
  std::vector<int> layer_sizes;
  std::vector<Mat> weights;
  std::vector<Vec> biases;
  Activation hidden_activation = Activation::relu;
  Activation output_activation = Activation::identity;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }
};

// Uniform fan-in init: W, b ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
// final_layer_scale multiplies the last layer's weights and biases (used to
// start residual actors near zero output).
Mlp make_mlp(const std::vector<int>& layer_sizes, Activation hidden,
             Activation output, Rng& rng, double final_layer_scale = 1.0);

// Cached intermediate values from a forward pass, consumed by backward.
// act[0] is the input; act[l+1] = activation(pre[l]).
struct MlpWorkspace {
  std::vector<Mat> pre;
  std::vector<Mat> act;
};

struct MlpGrads {
  std::vector<Mat> w;
  std::vector<Vec> b;
  void zero();
};

MlpGrads make_grads(const Mlp& net);

// Batched forward. X is (input_dim, batch) with one sample per column;
// returns (output_dim, batch). Pass ws to cache activations for backward.
Mat mlp_forward(const Mlp& net, const Mat& X, MlpWorkspace* ws = nullptr);
Vec mlp_forward(const Mlp& net, const Vec& x);

// Backward through the cached pass: upstream is dL/d(output), shape
// (output_dim, batch). Accumulates parameter gradients into *grads when
// non-null (callers that only need input gradients skip the weight GEMMs by
// passing nullptr). Returns dL/dX.
Mat mlp_backward(const Mlp& net, const MlpWorkspace& ws, const Mat& upstream,
                 MlpGrads* grads);

// Single-sample form: returns (param grads, input grad) for the scalar loss
// L = upstream . output(x).
std::pair<MlpGrads, Vec> mlp_backward(const Mlp& net, const Vec& x,
                                      const Vec& upstream);

}  // namespace pdlab

#include "pdlab/mlp.hpp"

#include <cmath>
#include <string>

namespace pdlab {
namespace {

void apply_activation(Activation a, Mat& z) {
  switch (a) {
    case Activation::identity:
      return;
    case Activation::relu:
      z = z.cwiseMax(0.0);
      return;
    case Activation::tanh_act:
      z = z.array().tanh().matrix();
      return;
  }
}

// Derivative of the activation given pre-activation z and activation a(z).
Mat activation_deriv(Activation act, const Mat& pre, const Mat& post) {
  switch (act) {
    case Activation::identity:
      return Mat::Ones(pre.rows(), pre.cols());
    case Activation::relu:
      return (pre.array() > 0.0).cast<double>().matrix();
    case Activation::tanh_act:
      return (1.0 - post.array().square()).matrix();
  }
  throw Error("unreachable activation");
}

}  // namespace

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::identity:
      return "identity";
    case Activation::relu:
      return "relu";
    case Activation::tanh_act:
      return "tanh";
  }
  throw Error("unreachable activation");
}

Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh_act;
  throw ConfigError("unknown activation: " + name);
}

Mlp make_mlp(const std::vector<int>& layer_sizes, Activation hidden,
             Activation output, Rng& rng, double final_layer_scale) {
  require(layer_sizes.size() >= 2, "make_mlp: need at least input and output layer");
  for (int s : layer_sizes) require(s > 0, "make_mlp: layer sizes must be positive");
  Mlp net;
  net.layer_sizes = layer_sizes;
  net.hidden_activation = hidden;
  net.output_activation = output;
  const int L = static_cast<int>(layer_sizes.size()) - 1;
  net.weights.reserve(L);
  net.biases.reserve(L);
  for (int l = 0; l < L; ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    const double scale = (l == L - 1) ? final_layer_scale : 1.0;
    Mat W(fan_out, fan_in);
    Vec b(fan_out);
    for (int j = 0; j < fan_in; ++j)
      for (int i = 0; i < fan_out; ++i) W(i, j) = scale * rng.uniform(-bound, bound);
    for (int i = 0; i < fan_out; ++i) b[i] = scale * rng.uniform(-bound, bound);
    net.weights.push_back(std::move(W));
    net.biases.push_back(std::move(b));
  }
  return net;
}

void MlpGrads::zero() {
  for (auto& g : w) g.setZero();
  for (auto& g : b) g.setZero();
}

MlpGrads make_grads(const Mlp& net) {
  MlpGrads g;
  g.w.reserve(net.weights.size());
  g.b.reserve(net.biases.size());
  for (const auto& W : net.weights) g.w.push_back(Mat::Zero(W.rows(), W.cols()));
  for (const auto& b : net.biases) g.b.push_back(Vec::Zero(b.size()));
  return g;
}

Mat mlp_forward(const Mlp& net, const Mat& X, MlpWorkspace* ws) {
  if (X.rows() != net.input_dim())
    throw ShapeError("mlp_forward: input has " + std::to_string(X.rows()) +
                     " rows, expected " + std::to_string(net.input_dim()));
  const int L = net.num_layers();
  if (ws) {
    ws->pre.resize(L);
    ws->act.resize(L + 1);
    ws->act[0] = X;
  }
  Mat a = X;
  for (int l = 0; l < L; ++l) {
    Mat z = (net.weights[l] * a).colwise() + net.biases[l];
    if (ws) ws->pre[l] = z;
    apply_activation(l == L - 1 ? net.output_activation : net.hidden_activation, z);
    if (ws) ws->act[l + 1] = z;
    a = std::move(z);
  }
  return a;
}

Vec mlp_forward(const Mlp& net, const Vec& x) {
  return mlp_forward(net, Mat(x), nullptr).col(0);
}

Mat mlp_backward(const Mlp& net, const MlpWorkspace& ws, const Mat& upstream,
                 MlpGrads* grads) {
  const int L = net.num_layers();
  require(static_cast<int>(ws.pre.size()) == L,
          "mlp_backward: workspace does not match a forward pass");
  if (upstream.rows() != net.output_dim() || upstream.cols() != ws.act[0].cols())
    throw ShapeError("mlp_backward: upstream gradient shape mismatch");
  if (grads) {
    require(static_cast<int>(grads->w.size()) == L,
            "mlp_backward: gradient accumulator does not match network");
  }
  Mat delta = upstream;
  for (int l = L - 1; l >= 0; --l) {
    const Activation act =
        (l == L - 1) ? net.output_activation : net.hidden_activation;
    delta = delta.cwiseProduct(activation_deriv(act, ws.pre[l], ws.act[l + 1]));
    if (grads) {
      grads->w[l].noalias() += delta * ws.act[l].transpose();
      grads->b[l].noalias() += delta.rowwise().sum();
    }
    delta = (net.weights[l].transpose() * delta).eval();
  }
  return delta;
}

std::pair<MlpGrads, Vec> mlp_backward(const Mlp& net, const Vec& x,
                                      const Vec& upstream) {
  MlpWorkspace ws;
  mlp_forward(net, Mat(x), &ws);
  MlpGrads grads = make_grads(net);
  Mat input_grad = mlp_backward(net, ws, Mat(upstream), &grads);
  return {std::move(grads), Vec(input_grad.col(0))};
}

}  // namespace pdlab

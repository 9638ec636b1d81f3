#include "pdlab/adam.hpp"

#include <cmath>

namespace pdlab {

std::vector<TensorView> tensor_views(Mlp& net, const std::string& prefix) {
  std::vector<TensorView> views;
  for (size_t l = 0; l < net.weights.size(); ++l) {
    views.push_back({net.weights[l].data(), net.weights[l].size(),
                     prefix + "w" + std::to_string(l)});
    views.push_back({net.biases[l].data(), net.biases[l].size(),
                     prefix + "b" + std::to_string(l)});
  }
  return views;
}

std::vector<TensorView> tensor_views(MlpGrads& grads, const std::string& prefix) {
  std::vector<TensorView> views;
  for (size_t l = 0; l < grads.w.size(); ++l) {
    views.push_back({grads.w[l].data(), grads.w[l].size(),
                     prefix + "w" + std::to_string(l)});
    views.push_back({grads.b[l].data(), grads.b[l].size(),
                     prefix + "b" + std::to_string(l)});
  }
  return views;
}

AdamState make_adam(const std::vector<TensorView>& params, AdamConfig cfg) {
  AdamState st;
  st.cfg = cfg;
  st.first_moment.reserve(params.size());
  st.second_moment.reserve(params.size());
  for (const auto& p : params) {
    st.first_moment.push_back(Vec::Zero(p.size));
    st.second_moment.push_back(Vec::Zero(p.size));
  }
  return st;
}

void adam_step(AdamState& state, const std::vector<TensorView>& params,
               const std::vector<TensorView>& grads) {
  require(params.size() == grads.size() &&
              params.size() == state.first_moment.size(),
          "adam_step: tensor count mismatch");
  state.step_count += 1;
  const auto& c = state.cfg;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step_count));
  for (size_t t = 0; t < params.size(); ++t) {
    require(params[t].size == grads[t].size &&
                params[t].size == state.first_moment[t].size(),
            "adam_step: shape mismatch for tensor " + params[t].name);
    Eigen::Map<Vec> p(params[t].data, params[t].size);
    Eigen::Map<const Vec> g(grads[t].data, grads[t].size);
    if (!g.allFinite())
      throw NumericError("adam_step: non-finite gradient in tensor " +
                         grads[t].name);
    Vec& m = state.first_moment[t];
    Vec& v = state.second_moment[t];
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    if (c.weight_decay != 0.0) p -= (c.learning_rate * c.weight_decay) * p;
    p.array() -= c.learning_rate * (m.array() / bc1) /
                 ((v.array() / bc2).sqrt() + c.epsilon_adam);
  }
}

void adam_step(AdamState& state, Vec& params, const Vec& grads,
               const std::string& name) {
  std::vector<TensorView> p{{params.data(), params.size(), name}};
  // const_cast is safe: gradient views are read-only inside adam_step.
  std::vector<TensorView> g{
      {const_cast<double*>(grads.data()), grads.size(), name}};
  adam_step(state, p, g);
}

}  // namespace pdlab

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdlab/checkpoint.hpp"
#include "pdlab/demos.hpp"
#include "pdlab/env.hpp"
#include "pdlab/mlp.hpp"
#include "pdlab/policy.hpp"

namespace pdlab {

// Behavior-cloned policy with a non-differentiable component: action =
// cluster_centers[argmax class_logits(s)] + offset(s). The centers come from
// k-means over demo actions and are never touched by training after fitting.
// With tanh_head, the offset head ends in tanh and the emitted offset is
// offset_bound * tanh(z), strictly inside (-offset_bound, offset_bound).
struct ClusterOffsetPolicy {
  std::vector<Vec> cluster_centers;
  Mlp trunk;        // obs -> features
  Mlp class_head;   // features -> k logits
  Mlp offset_head;  // features -> action_dim
  bool tanh_head = false;
  double offset_bound = 0.0;  // only meaningful when tanh_head
  int k = 0;

  Vec features(const Vec& obs) const;
  int cls(const Vec& obs) const;  // argmax logits, ties -> lowest index
  Vec offset(const Vec& obs) const;
  // centers[cls] + offset, clipped to the legal action box [-1, 1].
  Vec act(const Vec& obs) const;
};

struct MlpBcPolicy {
  Mlp net;  // obs -> action; output_activation tanh when squashed
  bool tanh_head = false;

  Vec act(const Vec& obs) const;
};

// Tagged container for a trained base policy plus its provenance.
struct BasePolicy {
  std::string kind;  // "cluster_offset" | "mlp"
  std::string env_name;
  int obs_dim = 0, action_dim = 0;
  std::optional<ClusterOffsetPolicy> cluster;
  std::optional<MlpBcPolicy> mlp;

  PolicyHandle handle() const;  // black-box view
  Json to_json() const;
  static BasePolicy from_json(const Json& j);
};

void save_policy(const BasePolicy& p, const std::string& path);
BasePolicy load_policy(const std::string& path);

struct BcConfig {
  std::string arch = "cluster_offset";  // or "mlp"
  bool tanh_head = true;
  int k = 4;
  std::vector<int> hidden = {64, 64};
  int epochs = 150;
  int batch = 256;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;  // decoupled, BC nets only
  int eval_episodes = 50;      // checkpoint selection, every epoch
  bool eval_every_epoch = true;
  std::uint64_t seed = 0;
};

struct BcResult {
  BasePolicy policy;  // best checkpoint by evaluation success
  std::vector<std::pair<long long, double>> eval_history;  // (epoch, success)
  long long chosen_epoch = 0;
  double chosen_success = 0.0;
  double final_loss = 0.0;
};

// Offline cloning: cluster_offset = cross-entropy on nearest-center labels +
// squared error on residual offsets; mlp = squared error on actions. With
// tanh_head on cluster_offset, targets are pre-scaled by offset_bound =
// max|offset| / 0.9 so every target is representable by tanh with headroom,
// and the emitted offset is rescaled back by the same bound.
BcResult train_bc(const DemoDataset& ds, const EnvSpec& spec,
                  const BcConfig& cfg);

// Argmax of evaluation success; ties broken by the earliest step.
long long checkpoint_select(
    const std::vector<std::pair<long long, double>>& history);

}  // namespace pdlab

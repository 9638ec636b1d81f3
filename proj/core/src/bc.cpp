#include "pdlab/bc.hpp"

#include <algorithm>
#include <cmath>

#include "pdlab/adam.hpp"
#include "pdlab/kmeans.hpp"

namespace pdlab {
namespace {

// Keeps tanh outputs strictly inside (-1, 1) even where IEEE tanh rounds to
// exactly +/-1 (|pre-activation| > ~19).
constexpr double kStrictOne = 1.0 - 1e-12;

Mat stack_columns(const std::vector<Vec>& cols) {
  Mat m(cols[0].size(), static_cast<Eigen::Index>(cols.size()));
  for (size_t i = 0; i < cols.size(); ++i) m.col(i) = cols[i];
  return m;
}

}  // namespace

Vec ClusterOffsetPolicy::features(const Vec& obs) const {
  return mlp_forward(trunk, obs);
}

int ClusterOffsetPolicy::cls(const Vec& obs) const {
  const Vec logits = mlp_forward(class_head, features(obs));
  int best = 0;
  for (int i = 1; i < logits.size(); ++i)
    if (logits[i] > logits[best]) best = i;
  return best;
}

Vec ClusterOffsetPolicy::offset(const Vec& obs) const {
  Vec out = mlp_forward(offset_head, features(obs));
  if (tanh_head) return offset_bound * clip(out, -kStrictOne, kStrictOne);
  return out;
}

Vec ClusterOffsetPolicy::act(const Vec& obs) const {
  const Vec feat = features(obs);
  const Vec logits = mlp_forward(class_head, feat);
  int best = 0;
  for (int i = 1; i < logits.size(); ++i)
    if (logits[i] > logits[best]) best = i;
  Vec off = mlp_forward(offset_head, feat);
  if (tanh_head) off = offset_bound * clip(off, -kStrictOne, kStrictOne);
  return clip(cluster_centers[best] + off, -1.0, 1.0);
}

Vec MlpBcPolicy::act(const Vec& obs) const {
  return clip(mlp_forward(net, obs), -1.0, 1.0);
}

PolicyHandle BasePolicy::handle() const {
  PolicyHandle h;
  h.is_stochastic = false;
  h.name = kind + "_bc";
  h.version = "1";
  if (kind == "cluster_offset") {
    ClusterOffsetPolicy p = *cluster;
    h.act = [p](const Vec& obs) { return p.act(obs); };
  } else {
    MlpBcPolicy p = *mlp;
    h.act = [p](const Vec& obs) { return p.act(obs); };
  }
  return h;
}

Json BasePolicy::to_json() const {
  Json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["kind"] = kind + "_policy";
  j["env_name"] = env_name;
  j["obs_dim"] = obs_dim;
  j["action_dim"] = action_dim;
  if (kind == "cluster_offset") {
    const auto& p = *cluster;
    j["tanh_head"] = p.tanh_head;
    j["offset_bound"] = p.offset_bound;
    j["k"] = p.k;
    Json centers = Json::array();
    for (const auto& c : p.cluster_centers)
      centers.push_back(encode_f64le(c.data(), c.size()));
    j["cluster_centers"] = std::move(centers);
    j["trunk"] = mlp_to_json(p.trunk);
    j["class_head"] = mlp_to_json(p.class_head);
    j["offset_head"] = mlp_to_json(p.offset_head);
  } else if (kind == "mlp") {
    j["tanh_head"] = mlp->tanh_head;
    j["net"] = mlp_to_json(mlp->net);
  } else {
    throw Error("BasePolicy::to_json: unknown kind " + kind);
  }
  return j;
}

BasePolicy BasePolicy::from_json(const Json& j) {
  if (j.value("format_version", -1) != kCheckpointFormatVersion)
    throw FormatError("policy checkpoint: missing or unsupported format_version");
  BasePolicy bp;
  const std::string kind = j.value("kind", "");
  bp.env_name = j.at("env_name").get<std::string>();
  bp.obs_dim = j.at("obs_dim").get<int>();
  bp.action_dim = j.at("action_dim").get<int>();
  if (kind == "cluster_offset_policy") {
    bp.kind = "cluster_offset";
    ClusterOffsetPolicy p;
    p.tanh_head = j.at("tanh_head").get<bool>();
    p.offset_bound = j.at("offset_bound").get<double>();
    p.k = j.at("k").get<int>();
    for (const auto& c : j.at("cluster_centers")) {
      std::vector<double> vals = decode_f64le(c.get<std::string>());
      p.cluster_centers.emplace_back(
          Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size())));
    }
    if (static_cast<int>(p.cluster_centers.size()) != p.k)
      throw FormatError("policy checkpoint: center count does not match k");
    p.trunk = mlp_from_json(j.at("trunk"));
    p.class_head = mlp_from_json(j.at("class_head"));
    p.offset_head = mlp_from_json(j.at("offset_head"));
    bp.cluster = std::move(p);
  } else if (kind == "mlp_policy") {
    bp.kind = "mlp";
    MlpBcPolicy p;
    p.tanh_head = j.at("tanh_head").get<bool>();
    p.net = mlp_from_json(j.at("net"));
    bp.mlp = std::move(p);
  } else {
    throw FormatError("policy checkpoint: unknown kind '" + kind + "'");
  }
  return bp;
}

void save_policy(const BasePolicy& p, const std::string& path) {
  save_json_file(p.to_json(), path);
}

BasePolicy load_policy(const std::string& path) {
  return BasePolicy::from_json(load_json_file(path));
}

long long checkpoint_select(
    const std::vector<std::pair<long long, double>>& history) {
  require(!history.empty(), "checkpoint_select: empty history");
  size_t best = 0;
  for (size_t i = 1; i < history.size(); ++i)
    if (history[i].second > history[best].second) best = i;
  return history[best].first;
}

namespace {

struct ClusterNets {
  Mlp trunk, class_head, offset_head;
};

// One gradient step of the joint cluster_offset loss on a minibatch.
// Columns of X are observations; labels/Toff are the per-sample targets.
double cluster_offset_step(ClusterNets& nets, AdamState& opt,
                           std::vector<TensorView>& params, const Mat& X,
                           const std::vector<int>& labels, const Mat& Toff) {
  const Eigen::Index B = X.cols();
  MlpWorkspace ws_trunk, ws_class, ws_off;
  const Mat feat = mlp_forward(nets.trunk, X, &ws_trunk);
  const Mat logits = mlp_forward(nets.class_head, feat, &ws_class);
  const Mat off = mlp_forward(nets.offset_head, feat, &ws_off);

  // Cross-entropy with a stable log-sum-exp softmax.
  Mat probs = logits;
  double ce = 0.0;
  for (Eigen::Index j = 0; j < B; ++j) {
    const double mx = probs.col(j).maxCoeff();
    Vec e = (probs.col(j).array() - mx).exp();
    const double Z = e.sum();
    probs.col(j) = e / Z;
    ce += -(logits(labels[j], j) - mx - std::log(Z));
  }
  ce /= static_cast<double>(B);

  Mat dlogits = probs;
  for (Eigen::Index j = 0; j < B; ++j) dlogits(labels[j], j) -= 1.0;
  dlogits /= static_cast<double>(B);

  const Mat diff = off - Toff;
  const double mse = diff.squaredNorm() / static_cast<double>(B);
  const Mat doff = 2.0 * diff / static_cast<double>(B);

  MlpGrads g_trunk = make_grads(nets.trunk);
  MlpGrads g_class = make_grads(nets.class_head);
  MlpGrads g_off = make_grads(nets.offset_head);
  const Mat dfeat_class = mlp_backward(nets.class_head, ws_class, dlogits, &g_class);
  const Mat dfeat_off = mlp_backward(nets.offset_head, ws_off, doff, &g_off);
  mlp_backward(nets.trunk, ws_trunk, dfeat_class + dfeat_off, &g_trunk);

  std::vector<TensorView> grads = tensor_views(g_trunk, "trunk.");
  for (auto& t : tensor_views(g_class, "class.")) grads.push_back(t);
  for (auto& t : tensor_views(g_off, "offset.")) grads.push_back(t);
  adam_step(opt, params, grads);
  return ce + mse;
}

double mlp_bc_step(Mlp& net, AdamState& opt, std::vector<TensorView>& params,
                   const Mat& X, const Mat& T) {
  const Eigen::Index B = X.cols();
  MlpWorkspace ws;
  const Mat pred = mlp_forward(net, X, &ws);
  const Mat diff = pred - T;
  const double mse = diff.squaredNorm() / static_cast<double>(B);
  MlpGrads g = make_grads(net);
  mlp_backward(net, ws, 2.0 * diff / static_cast<double>(B), &g);
  std::vector<TensorView> grads = tensor_views(g, "net.");
  adam_step(opt, params, grads);
  return mse;
}

}  // namespace

BcResult train_bc(const DemoDataset& ds, const EnvSpec& spec,
                  const BcConfig& cfg) {
  require(!ds.trajectories.empty(), "train_bc: dataset is empty");
  require(ds.env_name == env_name_string(spec.name),
          "train_bc: dataset env '" + ds.env_name + "' does not match spec");
  require(cfg.arch == "cluster_offset" || cfg.arch == "mlp",
          "train_bc: arch must be cluster_offset or mlp");

  std::vector<Vec> obs_list, act_list;
  for (const auto& t : ds.trajectories) {
    for (size_t i = 0; i < t.actions.size(); ++i) {
      obs_list.push_back(t.observations[i]);
      act_list.push_back(t.actions[i]);
    }
  }
  const int N = static_cast<int>(obs_list.size());
  const Mat X = stack_columns(obs_list);
  const Mat A = stack_columns(act_list);

  Rng init_rng(derive_seed(cfg.seed, "bc_init"));
  Rng shuffle_rng(derive_seed(cfg.seed, "bc_shuffle"));
  const std::uint64_t eval_seed = derive_seed(cfg.seed, "bc_eval");

  BcResult result;
  result.policy.env_name = ds.env_name;
  result.policy.obs_dim = ds.obs_dim;
  result.policy.action_dim = ds.action_dim;

  std::vector<int> order(N);
  for (int i = 0; i < N; ++i) order[i] = i;
  auto shuffle = [&]() {
    for (int i = N - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng.uniform_int(i + 1));
      std::swap(order[i], order[j]);
    }
  };
  const int batch = std::min(cfg.batch, N);

  // Architecture-specific state, trained by the shared epoch loop below.
  ClusterNets cnets;
  Mlp mlp_net;
  std::vector<int> labels;
  Mat Toff;
  double offset_bound = 0.0;

  require(!cfg.hidden.empty(), "train_bc: hidden layer list must be nonempty");
  std::vector<int> trunk_sizes{ds.obs_dim};
  for (int h : cfg.hidden) trunk_sizes.push_back(h);

  if (cfg.arch == "cluster_offset") {
    const std::vector<Vec> centers =
        fit_kmeans(act_list, cfg.k, derive_seed(cfg.seed, "bc_kmeans"));
    labels.resize(N);
    Mat offsets(ds.action_dim, N);
    double max_abs = 0.0;
    for (int i = 0; i < N; ++i) {
      labels[i] = nearest_center(centers, act_list[i]);
      offsets.col(i) = act_list[i] - centers[labels[i]];
      max_abs = std::max(max_abs, offsets.col(i).cwiseAbs().maxCoeff());
    }
    if (cfg.tanh_head) {
      // Pre-scale so every target sits at most 0.9 deep into tanh's range.
      offset_bound = std::max(max_abs / 0.9, 1e-6);
      Toff = offsets / offset_bound;
    } else {
      Toff = offsets;
    }
    // The trunk's last (output) layer is activated so heads see features.
    cnets.trunk = make_mlp(trunk_sizes, Activation::relu, Activation::relu,
                           init_rng);
    cnets.class_head = make_mlp({cfg.hidden.back(), cfg.k}, Activation::relu,
                                Activation::identity, init_rng);
    cnets.offset_head =
        make_mlp({cfg.hidden.back(), ds.action_dim}, Activation::relu,
                 cfg.tanh_head ? Activation::tanh_act : Activation::identity,
                 init_rng);
    ClusterOffsetPolicy seed_policy;
    seed_policy.cluster_centers = centers;
    seed_policy.k = cfg.k;
    seed_policy.tanh_head = cfg.tanh_head;
    seed_policy.offset_bound = offset_bound;
    result.policy.kind = "cluster_offset";
    result.policy.cluster = std::move(seed_policy);
  } else {
    std::vector<int> sizes = trunk_sizes;
    sizes.push_back(ds.action_dim);
    mlp_net = make_mlp(sizes, Activation::relu,
                       cfg.tanh_head ? Activation::tanh_act : Activation::identity,
                       init_rng);
    result.policy.kind = "mlp";
    result.policy.mlp = MlpBcPolicy{mlp_net, cfg.tanh_head};
  }

  AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  adam_cfg.weight_decay = cfg.weight_decay;
  std::vector<TensorView> params;
  if (cfg.arch == "cluster_offset") {
    params = tensor_views(cnets.trunk, "trunk.");
    for (auto& t : tensor_views(cnets.class_head, "class.")) params.push_back(t);
    for (auto& t : tensor_views(cnets.offset_head, "offset.")) params.push_back(t);
  } else {
    params = tensor_views(mlp_net, "net.");
  }
  AdamState opt = make_adam(params, adam_cfg);

  auto snapshot = [&]() {
    if (cfg.arch == "cluster_offset") {
      result.policy.cluster->trunk = cnets.trunk;
      result.policy.cluster->class_head = cnets.class_head;
      result.policy.cluster->offset_head = cnets.offset_head;
    } else {
      result.policy.mlp->net = mlp_net;
    }
  };

  double best_eval = -1.0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle();
    double loss_sum = 0.0;
    int steps = 0;
    for (int start = 0; start + batch <= N; start += batch) {
      Mat Xb(ds.obs_dim, batch);
      Mat Tb(ds.action_dim, batch);
      std::vector<int> lb(batch);
      for (int j = 0; j < batch; ++j) {
        const int idx = order[start + j];
        Xb.col(j) = X.col(idx);
        if (cfg.arch == "cluster_offset") {
          Tb.col(j) = Toff.col(idx);
          lb[j] = labels[idx];
        } else {
          Tb.col(j) = A.col(idx);
        }
      }
      double loss;
      if (cfg.arch == "cluster_offset")
        loss = cluster_offset_step(cnets, opt, params, Xb, lb, Tb);
      else
        loss = mlp_bc_step(mlp_net, opt, params, Xb, Tb);
      if (!std::isfinite(loss))
        throw NumericError("train_bc: non-finite loss at epoch " +
                           std::to_string(epoch));
      loss_sum += loss;
      ++steps;
    }
    result.final_loss = steps > 0 ? loss_sum / steps : 0.0;

    if (cfg.eval_every_epoch) {
      // Evaluate the current parameters; keep the best checkpoint seen.
      BasePolicy current = result.policy;
      if (cfg.arch == "cluster_offset") {
        current.cluster->trunk = cnets.trunk;
        current.cluster->class_head = cnets.class_head;
        current.cluster->offset_head = cnets.offset_head;
      } else {
        current.mlp->net = mlp_net;
      }
      const double sr =
          env_success_rate(spec, current.handle(), cfg.eval_episodes, eval_seed);
      result.eval_history.push_back({epoch, sr});
      if (sr > best_eval) {
        best_eval = sr;
        snapshot();
      }
    }
  }
  if (cfg.eval_every_epoch && !result.eval_history.empty()) {
    result.chosen_epoch = checkpoint_select(result.eval_history);
    result.chosen_success = best_eval;
  } else {
    snapshot();
  }
  return result;
}

}  // namespace pdlab

#pragma once

#include <functional>
#include <utility>

#include "pdlab/adam.hpp"
#include "pdlab/compose.hpp"
#include "pdlab/mlp.hpp"
#include "pdlab/replay.hpp"
#include "pdlab/rng.hpp"

namespace pdlab {

// Gaussian policy head squashed through tanh. The net emits, per action
// dimension, a mean and a raw log-std value; the raw value is mapped onto
// [log_std_lo, log_std_hi] by a smooth tanh reparameterization (a hard clamp
// would have zero gradient outside the box and kill saturated units).
struct SquashedGaussianActor {
  Mlp net;  // psi -> 2 * action_dim, identity output
  double log_std_lo = -5.0;
  double log_std_hi = 2.0;
  int action_dim() const { return net.output_dim() / 2; }
};

struct ActorSampleResult {
  Vec action;       // squashed, strictly inside (-1, 1)
  double log_prob;  // density of the squashed sample (change of variables)
};

// Reparameterized sample: u = mean + std * xi, action = tanh(u), with the
// numerically stable log(1 - tanh(u)^2) = 2(log 2 - u - softplus(-2u)).
ActorSampleResult actor_sample(const SquashedGaussianActor& actor,
                               const Vec& psi, Rng& rng);
Vec actor_mean_action(const SquashedGaussianActor& actor, const Vec& psi);

struct SacConfig {
  double gamma = 0.97;
  int batch = 128;
  double learning_rate = 3e-4;
  double tau = 0.01;
  int train_freq = 64;       // env steps between update bursts
  double utd = 0.25;         // gradient updates per env step
  int learning_starts = 8000;
  int buffer_capacity = 1000000;
  std::vector<int> hidden = {64, 64};
  double log_std_lo = -5.0;
  double log_std_hi = 2.0;
  double init_temperature = 0.2;
  double target_entropy_scale = 1.0;  // target_entropy = -scale * action_dim
  double actor_final_init_scale = 1e-2;  // near-zero initial residual means
};

struct SacLosses {
  double critic = 0.0;
  double actor = 0.0;
  double temperature = 0.0;
  double mean_log_prob = 0.0;
};

// Twin-critic SAC whose actor output is composed with a frozen per-state
// bias before reaching the critic: executed = bias + compose_scale * action.
// compose_scale is the residual bound for decorator-style methods, the
// offset bound for offset-only fine-tuning, and 1 for plain SAC (bias 0).
class SacCore {
 public:
  SacCore(const SacConfig& cfg, int psi_dim, int obs_dim, int action_dim,
          CriticActionInput variant, double compose_scale, Rng& init_rng);

  SquashedGaussianActor& actor() { return actor_; }
  const SquashedGaussianActor& actor() const { return actor_; }
  Mlp& q1() { return q1_; }
  Mlp& q2() { return q2_; }
  const Mlp& q1_target() const { return tq1_; }
  const Mlp& q2_target() const { return tq2_; }
  void copy_targets_from_online();  // after external net surgery

  // Replace the actor net (fine-tuning initializes it from a cloned base
  // policy); the optimizer state is rebuilt for the new shapes.
  void set_actor_net(Mlp net);

  double temperature() const;
  Vec& log_temperature() { return log_temp_; }
  double target_entropy() const { return target_entropy_; }
  double compose_scale() const { return compose_scale_; }
  int action_dim() const { return action_dim_; }
  int psi_dim() const { return psi_dim_; }
  const SacConfig& config() const { return cfg_; }
  CriticActionInput critic_variant() const { return variant_; }

  struct BatchSample {
    Mat a;     // squashed actions (action_dim, B)
    Vec logp;  // per-sample log-probs
  };
  // Batched sampling with caller-supplied standard normals (one column per
  // sample). Deterministic; shared by collection, updates, and FD oracles.
  BatchSample sample_batch(const Mat& psi, const Mat& xi) const;

  struct Batch {
    Mat psi, psi_next;              // actor inputs at s and s'
    Mat obs, base, next_obs, next_base;
    Mat critic_in;                  // critic input with the stored action
    Vec reward, done;
  };

  // Loss-only paths with frozen noise, for finite-difference verification.
  double critic_loss(const Batch& b, const Mat& xi_next) const;
  double actor_loss(const Batch& b, const Mat& xi) const;
  double temperature_loss(const Vec& logp) const;

  // Analytic gradients of the same frozen-noise losses (the quantities the
  // updates feed to Adam), exposed so tests can difference them directly.
  // No parameter or optimizer state is touched.
  double critic_loss_grads(const Batch& b, const Mat& xi_next, MlpGrads& gq1,
                           MlpGrads& gq2) const;
  double actor_loss_grads(const Batch& b, const Mat& xi, MlpGrads& ga) const;
  double temperature_loss_grad(const Vec& logp, double& dlog_temp) const;

  // Gradient updates; losses are reported at the pre-update parameters.
  double critic_update(const Batch& b, Rng& rng);
  std::pair<double, Vec> actor_update(const Batch& b, Rng& rng);
  double temperature_update(const Vec& logp);
  void polyak_update();

  // Canonical full step: critic, actor, temperature, polyak.
  SacLosses update(const Batch& b, Rng& rng);

 private:
  struct ActorEval;  // internal cached quantities for the actor pass
  ActorEval eval_actor(const Mat& psi, const Mat& xi, bool want_ws) const;
  Vec target_q_values(const Batch& b, const Mat& xi_next) const;
  double critic_pass(const Batch& b, const Mat& xi_next, bool apply_grads,
                     MlpGrads* out_g1 = nullptr, MlpGrads* out_g2 = nullptr);
  std::pair<double, Vec> actor_pass(const Batch& b, const Mat& xi,
                                    bool apply_grads,
                                    MlpGrads* out_ga = nullptr);

  SacConfig cfg_;
  int psi_dim_, obs_dim_, action_dim_;
  CriticActionInput variant_;
  double compose_scale_;
  double target_entropy_;
  SquashedGaussianActor actor_;
  Mlp q1_, q2_, tq1_, tq2_;
  Vec log_temp_;
  AdamState opt_actor_, opt_q1_, opt_q2_, opt_temp_;
};

// Builds a SacCore::Batch from buffer rows: recomputes actor inputs through
// `psi` (a pure function of stored columns) and assembles the stored-action
// critic input.
SacCore::Batch assemble_batch(
    const ReplayBuffer& buf, const std::vector<int>& idx,
    const std::function<Vec(const Vec& obs, const Vec& base)>& psi,
    int psi_dim, CriticActionInput variant);

}  // namespace pdlab

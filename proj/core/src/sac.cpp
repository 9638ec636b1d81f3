#include "pdlab/sac.hpp"

#include <cmath>

namespace pdlab {
namespace {

// Keeps squashed actions strictly inside (-1, 1) even where IEEE tanh
// rounds to exactly +/-1 (|u| > ~19).
constexpr double kStrictOne = 1.0 - 1e-12;
constexpr double kLog2 = 0.6931471805599453;
constexpr double kLog2Pi = 1.8378770664093455;

inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// log(1 - tanh(u)^2) without catastrophic cancellation.
inline double log_one_minus_tanh_sq(double u) {
  return 2.0 * (kLog2 - u - softplus(-2.0 * u));
}

}  // namespace

struct SacCore::ActorEval {
  Mat mean, tanh_raw, ls, std, u, a;  // all (action_dim, B)
  Vec logp;                           // (B)
  MlpWorkspace ws;
};

SacCore::SacCore(const SacConfig& cfg, int psi_dim, int obs_dim,
                 int action_dim, CriticActionInput variant,
                 double compose_scale, Rng& init_rng)
    : cfg_(cfg),
      psi_dim_(psi_dim),
      obs_dim_(obs_dim),
      action_dim_(action_dim),
      variant_(variant),
      compose_scale_(compose_scale),
      target_entropy_(-cfg.target_entropy_scale * action_dim) {
  require(!cfg.hidden.empty(), "SacConfig: hidden layer list must be nonempty");
  std::vector<int> actor_sizes{psi_dim};
  for (int h : cfg.hidden) actor_sizes.push_back(h);
  actor_sizes.push_back(2 * action_dim);
  actor_.net = make_mlp(actor_sizes, Activation::relu, Activation::identity,
                        init_rng, cfg.actor_final_init_scale);
  actor_.log_std_lo = cfg.log_std_lo;
  actor_.log_std_hi = cfg.log_std_hi;

  std::vector<int> q_sizes{critic_input_dim(obs_dim, action_dim, variant)};
  for (int h : cfg.hidden) q_sizes.push_back(h);
  q_sizes.push_back(1);
  q1_ = make_mlp(q_sizes, Activation::relu, Activation::identity, init_rng);
  q2_ = make_mlp(q_sizes, Activation::relu, Activation::identity, init_rng);
  tq1_ = q1_;
  tq2_ = q2_;

  log_temp_ = Vec::Constant(1, std::log(cfg.init_temperature));

  AdamConfig ac;
  ac.learning_rate = cfg.learning_rate;
  opt_actor_ = make_adam(tensor_views(actor_.net), ac);
  opt_q1_ = make_adam(tensor_views(q1_), ac);
  opt_q2_ = make_adam(tensor_views(q2_), ac);
  std::vector<TensorView> tv{{log_temp_.data(), 1, "log_temperature"}};
  opt_temp_ = make_adam(tv, ac);
}

void SacCore::copy_targets_from_online() {
  tq1_ = q1_;
  tq2_ = q2_;
}

void SacCore::set_actor_net(Mlp net) {
  require(net.layer_sizes.front() == psi_dim_ &&
              net.output_dim() == 2 * action_dim_,
          "set_actor_net: shape does not match (psi_dim -> 2 * action_dim)");
  actor_.net = std::move(net);
  AdamConfig ac;
  ac.learning_rate = cfg_.learning_rate;
  opt_actor_ = make_adam(tensor_views(actor_.net), ac);
}

double SacCore::temperature() const { return std::exp(log_temp_[0]); }

SacCore::ActorEval SacCore::eval_actor(const Mat& psi, const Mat& xi,
                                       bool want_ws) const {
  ActorEval ev;
  const Mat out = mlp_forward(actor_.net, psi, want_ws ? &ev.ws : nullptr);
  const int d = action_dim_;
  const Eigen::Index B = psi.cols();
  require(xi.rows() == d && xi.cols() == B, "eval_actor: noise shape mismatch");
  ev.mean = out.topRows(d);
  ev.tanh_raw = out.bottomRows(d).array().tanh().matrix();
  const double lo = actor_.log_std_lo, hi = actor_.log_std_hi;
  ev.ls = ((lo + 0.5 * (hi - lo)) +
           (0.5 * (hi - lo)) * ev.tanh_raw.array())
              .matrix();
  ev.std = ev.ls.array().exp().matrix();
  ev.u = ev.mean + ev.std.cwiseProduct(xi);
  ev.a = ev.u.array().tanh().max(-kStrictOne).min(kStrictOne).matrix();
  ev.logp = Vec::Zero(B);
  for (Eigen::Index j = 0; j < B; ++j) {
    double lp = 0.0;
    for (int i = 0; i < d; ++i) {
      lp += -0.5 * xi(i, j) * xi(i, j) - 0.5 * kLog2Pi - ev.ls(i, j);
      lp -= log_one_minus_tanh_sq(ev.u(i, j));
    }
    ev.logp[j] = lp;
  }
  return ev;
}

SacCore::BatchSample SacCore::sample_batch(const Mat& psi, const Mat& xi) const {
  ActorEval ev = eval_actor(psi, xi, false);
  return {std::move(ev.a), std::move(ev.logp)};
}

ActorSampleResult actor_sample(const SquashedGaussianActor& actor,
                               const Vec& psi, Rng& rng) {
  const int d = actor.action_dim();
  Mat xi(d, 1);
  rng.fill_normal(xi);
  // Inline single-sample version of the batched path.
  const Vec out = mlp_forward(actor.net, psi);
  ActorSampleResult r;
  r.action = Vec(d);
  r.log_prob = 0.0;
  for (int i = 0; i < d; ++i) {
    const double mean = out[i];
    const double tr = std::tanh(out[d + i]);
    const double ls =
        actor.log_std_lo + 0.5 * (actor.log_std_hi - actor.log_std_lo) * (tr + 1.0);
    const double std = std::exp(ls);
    const double u = mean + std * xi(i, 0);
    r.action[i] = clip(std::tanh(u), -kStrictOne, kStrictOne);
    r.log_prob += -0.5 * xi(i, 0) * xi(i, 0) - 0.5 * kLog2Pi - ls;
    r.log_prob -= log_one_minus_tanh_sq(u);
  }
  return r;
}

Vec actor_mean_action(const SquashedGaussianActor& actor, const Vec& psi) {
  const Vec out = mlp_forward(actor.net, psi);
  Vec a(actor.action_dim());
  for (int i = 0; i < actor.action_dim(); ++i)
    a[i] = clip(std::tanh(out[i]), -kStrictOne, kStrictOne);
  return a;
}

Vec SacCore::target_q_values(const Batch& b, const Mat& xi_next) const {
  const ActorEval ev = eval_actor(b.psi_next, xi_next, false);
  const Mat res_next = compose_scale_ * ev.a;
  const Mat tin =
      critic_input_batch(b.next_obs, b.next_base, res_next, variant_);
  const Mat q1t = mlp_forward(tq1_, tin);
  const Mat q2t = mlp_forward(tq2_, tin);
  const double T = temperature();
  const Eigen::Index B = b.reward.size();
  Vec y(B);
  for (Eigen::Index j = 0; j < B; ++j) {
    const double qmin = std::min(q1t(0, j), q2t(0, j));
    y[j] = b.reward[j] +
           cfg_.gamma * (1.0 - b.done[j]) * (qmin - T * ev.logp[j]);
  }
  if (!y.allFinite()) throw NumericError("critic_update: non-finite target");
  return y;
}

double SacCore::critic_pass(const Batch& b, const Mat& xi_next,
                            bool apply_grads, MlpGrads* out_g1,
                            MlpGrads* out_g2) {
  const bool need_grads = apply_grads || out_g1 || out_g2;
  const Vec y = target_q_values(b, xi_next);
  const Eigen::Index B = y.size();
  MlpWorkspace ws1, ws2;
  const Mat q1 = mlp_forward(q1_, b.critic_in, need_grads ? &ws1 : nullptr);
  const Mat q2 = mlp_forward(q2_, b.critic_in, need_grads ? &ws2 : nullptr);
  double loss = 0.0;
  for (Eigen::Index j = 0; j < B; ++j) {
    const double d1 = q1(0, j) - y[j];
    const double d2 = q2(0, j) - y[j];
    loss += d1 * d1 + d2 * d2;
  }
  loss /= static_cast<double>(B);
  if (need_grads) {
    Mat up1(1, B), up2(1, B);
    for (Eigen::Index j = 0; j < B; ++j) {
      up1(0, j) = 2.0 * (q1(0, j) - y[j]) / static_cast<double>(B);
      up2(0, j) = 2.0 * (q2(0, j) - y[j]) / static_cast<double>(B);
    }
    MlpGrads g1 = make_grads(q1_), g2 = make_grads(q2_);
    mlp_backward(q1_, ws1, up1, &g1);
    mlp_backward(q2_, ws2, up2, &g2);
    if (apply_grads) {
      auto p1 = tensor_views(q1_, "q1.");
      auto gv1 = tensor_views(g1, "q1.");
      adam_step(opt_q1_, p1, gv1);
      auto p2 = tensor_views(q2_, "q2.");
      auto gv2 = tensor_views(g2, "q2.");
      adam_step(opt_q2_, p2, gv2);
    }
    if (out_g1) *out_g1 = std::move(g1);
    if (out_g2) *out_g2 = std::move(g2);
  }
  return loss;
}

double SacCore::critic_loss_grads(const Batch& b, const Mat& xi_next,
                                  MlpGrads& gq1, MlpGrads& gq2) const {
  return const_cast<SacCore*>(this)->critic_pass(b, xi_next, false, &gq1,
                                                 &gq2);
}

double SacCore::critic_loss(const Batch& b, const Mat& xi_next) const {
  // apply_grads=false leaves all state untouched.
  return const_cast<SacCore*>(this)->critic_pass(b, xi_next, false);
}

double SacCore::critic_update(const Batch& b, Rng& rng) {
  Mat xi_next(action_dim_, b.psi_next.cols());
  rng.fill_normal(xi_next);
  return critic_pass(b, xi_next, true);
}

std::pair<double, Vec> SacCore::actor_pass(const Batch& b, const Mat& xi,
                                           bool apply_grads,
                                           MlpGrads* out_ga) {
  const bool need_grads = apply_grads || out_ga;
  ActorEval ev = eval_actor(b.psi, xi, need_grads);
  const Eigen::Index B = b.psi.cols();
  const int d = action_dim_;
  const Mat res = compose_scale_ * ev.a;
  const Mat ain = critic_input_batch(b.obs, b.base, res, variant_);
  MlpWorkspace wsa1, wsa2;
  const Mat q1a = mlp_forward(q1_, ain, need_grads ? &wsa1 : nullptr);
  const Mat q2a = mlp_forward(q2_, ain, need_grads ? &wsa2 : nullptr);
  const double T = temperature();
  double loss = 0.0;
  for (Eigen::Index j = 0; j < B; ++j)
    loss += T * ev.logp[j] - std::min(q1a(0, j), q2a(0, j));
  loss /= static_cast<double>(B);

  if (need_grads) {
    // d(loss)/d(critic input), routed through whichever critic is the min.
    Mat up1 = Mat::Zero(1, B), up2 = Mat::Zero(1, B);
    for (Eigen::Index j = 0; j < B; ++j) {
      if (q1a(0, j) <= q2a(0, j))
        up1(0, j) = -1.0 / static_cast<double>(B);
      else
        up2(0, j) = -1.0 / static_cast<double>(B);
    }
    // Parameter gradients of the critics are not accumulated here (nullptr):
    // the actor step only needs gradients w.r.t. the critic input.
    const Mat gin1 = mlp_backward(q1_, wsa1, up1, nullptr);
    const Mat gin2 = mlp_backward(q2_, wsa2, up2, nullptr);
    // The residual occupies the bottom action_dim rows of every variant's
    // critic input (for "sum" via base + residual, identity Jacobian).
    const Mat ga =
        compose_scale_ * (gin1.bottomRows(d) + gin2.bottomRows(d));

    const Mat one_minus_a2 =
        (1.0 - ev.a.array().square()).matrix();
    // Entropy path: d(logp)/du = 2 tanh(u); d(logp)/d(log_std) = -1 + du-term.
    const double Tb = T / static_cast<double>(B);
    Mat du = ga.cwiseProduct(one_minus_a2) + (2.0 * Tb) * ev.a;
    Mat dls = du.cwiseProduct(ev.std.cwiseProduct(xi));
    dls.array() -= Tb;
    const double half_range = 0.5 * (actor_.log_std_hi - actor_.log_std_lo);
    const Mat draw =
        dls.cwiseProduct((half_range * (1.0 - ev.tanh_raw.array().square())).matrix());

    Mat upstream(2 * d, B);
    upstream.topRows(d) = du;
    upstream.bottomRows(d) = draw;
    MlpGrads g = make_grads(actor_.net);
    mlp_backward(actor_.net, ev.ws, upstream, &g);
    if (apply_grads) {
      auto pa = tensor_views(actor_.net, "actor.");
      auto gva = tensor_views(g, "actor.");
      adam_step(opt_actor_, pa, gva);
    }
    if (out_ga) *out_ga = std::move(g);
  }
  return {loss, std::move(ev.logp)};
}

double SacCore::actor_loss_grads(const Batch& b, const Mat& xi,
                                 MlpGrads& ga) const {
  return const_cast<SacCore*>(this)->actor_pass(b, xi, false, &ga).first;
}

double SacCore::temperature_loss_grad(const Vec& logp,
                                      double& dlog_temp) const {
  dlog_temp = -(logp.array() + target_entropy_).mean();
  return temperature_loss(logp);
}

double SacCore::actor_loss(const Batch& b, const Mat& xi) const {
  return const_cast<SacCore*>(this)->actor_pass(b, xi, false).first;
}

std::pair<double, Vec> SacCore::actor_update(const Batch& b, Rng& rng) {
  Mat xi(action_dim_, b.psi.cols());
  rng.fill_normal(xi);
  return actor_pass(b, xi, true);
}

double SacCore::temperature_loss(const Vec& logp) const {
  const double m = (logp.array() + target_entropy_).mean();
  return -log_temp_[0] * m;
}

double SacCore::temperature_update(const Vec& logp) {
  const double loss = temperature_loss(logp);
  Vec grad(1);
  grad[0] = -(logp.array() + target_entropy_).mean();
  adam_step(opt_temp_, log_temp_, grad, "log_temperature");
  return loss;
}

void SacCore::polyak_update() {
  const double tau = cfg_.tau;
  auto mix = [tau](Mlp& target, const Mlp& online) {
    for (size_t l = 0; l < target.weights.size(); ++l) {
      target.weights[l] += tau * (online.weights[l] - target.weights[l]);
      target.biases[l] += tau * (online.biases[l] - target.biases[l]);
    }
  };
  mix(tq1_, q1_);
  mix(tq2_, q2_);
}

SacLosses SacCore::update(const Batch& b, Rng& rng) {
  SacLosses out;
  out.critic = critic_update(b, rng);
  auto [actor_loss_value, logp] = actor_update(b, rng);
  out.actor = actor_loss_value;
  out.mean_log_prob = logp.mean();
  out.temperature = temperature_update(logp);
  polyak_update();
  return out;
}

SacCore::Batch assemble_batch(
    const ReplayBuffer& buf, const std::vector<int>& idx,
    const std::function<Vec(const Vec& obs, const Vec& base)>& psi,
    int psi_dim, CriticActionInput variant) {
  const int B = static_cast<int>(idx.size());
  const int obs_dim = static_cast<int>(buf.obs().rows());
  const int act_dim = static_cast<int>(buf.base_action().rows());
  SacCore::Batch b;
  b.psi.resize(psi_dim, B);
  b.psi_next.resize(psi_dim, B);
  b.obs.resize(obs_dim, B);
  b.base.resize(act_dim, B);
  b.next_obs.resize(obs_dim, B);
  b.next_base.resize(act_dim, B);
  Mat residual(act_dim, B);
  b.reward.resize(B);
  b.done.resize(B);
  for (int j = 0; j < B; ++j) {
    const int i = idx[j];
    b.obs.col(j) = buf.obs().col(i);
    b.base.col(j) = buf.base_action().col(i);
    b.next_obs.col(j) = buf.next_obs().col(i);
    b.next_base.col(j) = buf.next_base_action().col(i);
    residual.col(j) = buf.residual_action().col(i);
    b.psi.col(j) = psi(b.obs.col(j), b.base.col(j));
    b.psi_next.col(j) = psi(b.next_obs.col(j), b.next_base.col(j));
    b.reward[j] = buf.reward()[i];
    b.done[j] = buf.done()[i];
  }
  b.critic_in = critic_input_batch(b.obs, b.base, residual, variant);
  return b;
}

}  // namespace pdlab

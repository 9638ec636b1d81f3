#include "pdlab/compose.hpp"

namespace pdlab {

const char* actor_input_string(ActorInput v) {
  return v == ActorInput::obs_only ? "obs_only" : "obs_and_base_action";
}

ActorInput actor_input_from_string(const std::string& s) {
  if (s == "obs_only") return ActorInput::obs_only;
  if (s == "obs_and_base_action") return ActorInput::obs_and_base_action;
  throw ConfigError("unknown actor_input: " + s +
                    " (expected obs_only or obs_and_base_action)");
}

const char* critic_action_input_string(CriticActionInput v) {
  switch (v) {
    case CriticActionInput::sum:
      return "sum";
    case CriticActionInput::concat:
      return "concat";
    case CriticActionInput::residual_only:
      return "residual_only";
  }
  throw Error("unreachable critic input variant");
}

CriticActionInput critic_action_input_from_string(const std::string& s) {
  if (s == "sum") return CriticActionInput::sum;
  if (s == "concat") return CriticActionInput::concat;
  if (s == "residual_only") return CriticActionInput::residual_only;
  throw ConfigError("unknown critic_action_input: " + s +
                    " (expected sum, concat, or residual_only)");
}

double epsilon_of(long long step, long long H) {
  require(H >= 1, "epsilon_of: H must be >= 1");
  require(step >= 0, "epsilon_of: step must be >= 0");
  if (step >= H) return 1.0;
  return static_cast<double>(step) / static_cast<double>(H);
}

Vec bound_residual(const Vec& raw_squashed, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, "bound_residual: alpha must be in [0, 1]");
  return alpha * raw_squashed;
}

Vec actor_input(const Vec& obs, const Vec& base_action, ActorInput v) {
  if (v == ActorInput::obs_only) return obs;
  Vec out(obs.size() + base_action.size());
  out << obs, base_action;
  return out;
}

int actor_input_dim(int obs_dim, int action_dim, ActorInput v) {
  return v == ActorInput::obs_only ? obs_dim : obs_dim + action_dim;
}

Vec critic_input(const Vec& obs, const Vec& base_action,
                 const Vec& residual_action, CriticActionInput v) {
  switch (v) {
    case CriticActionInput::sum: {
      Vec out(obs.size() + base_action.size());
      out << obs, (base_action + residual_action);
      return out;
    }
    case CriticActionInput::concat: {
      Vec out(obs.size() + 2 * base_action.size());
      out << obs, base_action, residual_action;
      return out;
    }
    case CriticActionInput::residual_only: {
      Vec out(obs.size() + residual_action.size());
      out << obs, residual_action;
      return out;
    }
  }
  throw Error("unreachable critic input variant");
}

Mat critic_input_batch(const Mat& obs, const Mat& base, const Mat& residual,
                       CriticActionInput v) {
  const Eigen::Index B = obs.cols();
  Mat out(critic_input_dim(static_cast<int>(obs.rows()),
                           static_cast<int>(base.rows()), v),
          B);
  switch (v) {
    case CriticActionInput::sum:
      out.topRows(obs.rows()) = obs;
      out.bottomRows(base.rows()) = base + residual;
      return out;
    case CriticActionInput::concat:
      out.topRows(obs.rows()) = obs;
      out.middleRows(obs.rows(), base.rows()) = base;
      out.bottomRows(residual.rows()) = residual;
      return out;
    case CriticActionInput::residual_only:
      out.topRows(obs.rows()) = obs;
      out.bottomRows(residual.rows()) = residual;
      return out;
  }
  throw Error("unreachable critic input variant");
}

int critic_input_dim(int obs_dim, int action_dim, CriticActionInput v) {
  switch (v) {
    case CriticActionInput::sum:
      return obs_dim + action_dim;
    case CriticActionInput::concat:
      return obs_dim + 2 * action_dim;
    case CriticActionInput::residual_only:
      return obs_dim + action_dim;
  }
  throw Error("unreachable critic input variant");
}

}  // namespace pdlab

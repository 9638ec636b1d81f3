#pragma once

#include <string>

#include "pdlab/common.hpp"

namespace pdlab {

// What the residual actor sees.
enum class ActorInput { obs_only, obs_and_base_action };
// How the critic's action slot is built from (base, residual).
enum class CriticActionInput { sum, concat, residual_only };

const char* actor_input_string(ActorInput v);
ActorInput actor_input_from_string(const std::string& s);
const char* critic_action_input_string(CriticActionInput v);
CriticActionInput critic_action_input_from_string(const std::string& s);

// Linear ramp of the exploration gate: min(step / H, 1).
double epsilon_of(long long step, long long H);

// Componentwise scale of a squashed sample into (-alpha, alpha).
Vec bound_residual(const Vec& raw_squashed, double alpha);

Vec actor_input(const Vec& obs, const Vec& base_action, ActorInput v);
int actor_input_dim(int obs_dim, int action_dim, ActorInput v);

Vec critic_input(const Vec& obs, const Vec& base_action,
                 const Vec& residual_action, CriticActionInput v);
Mat critic_input_batch(const Mat& obs, const Mat& base, const Mat& residual,
                       CriticActionInput v);
int critic_input_dim(int obs_dim, int action_dim, CriticActionInput v);

}  // namespace pdlab

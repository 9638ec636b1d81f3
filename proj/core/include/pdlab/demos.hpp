#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdlab/env.hpp"

namespace pdlab {

enum class ModePolicy { around_left, around_right, mixed };

const char* mode_policy_string(ModePolicy m);
ModePolicy mode_policy_from_string(const std::string& s);

struct DemoTrajectory {
  std::uint64_t env_seed = 0;  // reset seed, kept for open-loop replay
  int mode_label = 0;
  std::vector<Vec> observations;  // observations[t] is the state action[t] was taken in
  std::vector<Vec> actions;
};

struct DemoDataset {
  std::string env_name;
  int obs_dim = 0;
  int action_dim = 0;
  std::string generator_tag;
  std::vector<DemoTrajectory> trajectories;
};

bool operator==(const DemoTrajectory& a, const DemoTrajectory& b);
bool operator==(const DemoDataset& a, const DemoDataset& b);

// Rolls the scripted waypoint expert for one episode (mode 0 detours one way
// around the obstacle region, mode 1 the other way). Returns true on task
// success and fills *out when non-null. noise_rng drives the small Gaussian
// action noise that keeps demos imperfect.
bool run_expert_episode(const EnvSpec& spec, std::uint64_t env_seed, int mode,
                        double noise_std, Rng& noise_rng, DemoTrajectory* out);

// `count` successful trajectories; `mixed` picks the detour mode per
// trajectory with probability 1/2. If a mixed dataset of size >= 2 comes out
// single-mode (probability 2^-(count-1)), the whole dataset is regenerated
// with the next seed. Throws on expert failure, naming the episode seed.
DemoDataset generate_demos(const EnvSpec& spec, int count, std::uint64_t seed,
                           ModePolicy mode_policy, double noise_std = 0.01);

// JSON Lines: a header line (env name, dims, format version, generator tag),
// then one trajectory object per line. Round-trips bit-exactly.
void save_demos(const DemoDataset& ds, const std::string& path);
DemoDataset load_demos(const std::string& path);

// Mean episode length over the successful ones among `episodes` expert
// rollouts (used to seed curriculum baselines at "typical success length").
double expert_mean_success_length(const EnvSpec& spec, int episodes,
                                  std::uint64_t seed, double noise_std = 0.01);

}  // namespace pdlab

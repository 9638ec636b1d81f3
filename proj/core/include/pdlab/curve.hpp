#pragma once

#include <string>
#include <vector>

#include "pdlab/checkpoint.hpp"
#include "pdlab/loop.hpp"

namespace pdlab {

// Shortest round-trip decimal representation (std::to_chars), so rerunning
// a seed reproduces the file byte-for-byte.
std::string format_double(double v);

// CSV schema: step,eval_success_rate,eval_episodes,epsilon,wall_seconds
std::string curve_to_csv(const std::vector<CurvePoint>& curve);
std::vector<CurvePoint> curve_from_csv(const std::string& text);
void save_curve_csv(const std::vector<CurvePoint>& curve,
                    const std::string& path);
std::vector<CurvePoint> load_curve_csv(const std::string& path);

struct RunSummary {
  std::string method;
  std::string env;
  std::uint64_t seed = 0;
  double final_success = 0.0;
  double best_success = 0.0;
  long long steps = 0;
  std::string config_hash;
  Json extra;  // method-specific annotations, may be null
};

Json summary_to_json(const RunSummary& s);
RunSummary summary_from_json(const Json& j);

}  // namespace pdlab

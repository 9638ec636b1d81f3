#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "pdlab/mlp.hpp"

namespace pdlab {

using Json = nlohmann::ordered_json;

// Parameter container format: JSON with base64-encoded little-endian 64-bit
// floats. "format_version" gates future changes; loaders reject unknown
// versions rather than guessing.
inline constexpr int kCheckpointFormatVersion = 1;

std::string encode_f64le(const double* data, size_t count);
std::vector<double> decode_f64le(const std::string& b64);

Json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const Json& j);

void save_json_file(const Json& j, const std::string& path);
Json load_json_file(const std::string& path);

// FNV-1a over the serialized bytes; used for frozen-parameter assertions
// and config hashes.
std::uint64_t fnv1a_hash(const std::string& bytes);
std::uint64_t mlp_param_hash(const Mlp& net);

}  // namespace pdlab

#include "pdlab/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace pdlab {
namespace {

constexpr char kB64Chars[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const unsigned char* data, size_t n) {
  std::string out;
  out.reserve((n + 2) / 3 * 4);
  for (size_t i = 0; i < n; i += 3) {
    unsigned v = data[i] << 16;
    if (i + 1 < n) v |= data[i + 1] << 8;
    if (i + 2 < n) v |= data[i + 2];
    out.push_back(kB64Chars[(v >> 18) & 63]);
    out.push_back(kB64Chars[(v >> 12) & 63]);
    out.push_back(i + 1 < n ? kB64Chars[(v >> 6) & 63] : '=');
    out.push_back(i + 2 < n ? kB64Chars[v & 63] : '=');
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& s) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (s.size() % 4 != 0) throw FormatError("base64: length not a multiple of 4");
  std::vector<unsigned char> out;
  out.reserve(s.size() / 4 * 3);
  for (size_t i = 0; i < s.size(); i += 4) {
    int pad = 0;
    unsigned v = 0;
    for (int k = 0; k < 4; ++k) {
      char c = s[i + k];
      if (c == '=') {
        ++pad;
        v <<= 6;
      } else {
        int d = val(c);
        if (d < 0 || pad > 0)
          throw FormatError("base64: invalid character at offset " +
                            std::to_string(i + k));
        v = (v << 6) | static_cast<unsigned>(d);
      }
    }
    out.push_back((v >> 16) & 0xff);
    if (pad < 2) out.push_back((v >> 8) & 0xff);
    if (pad < 1) out.push_back(v & 0xff);
  }
  return out;
}

}  // namespace

std::string encode_f64le(const double* data, size_t count) {
  std::vector<unsigned char> bytes(count * 8);
  for (size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], 8);
    for (int k = 0; k < 8; ++k)
      bytes[i * 8 + k] = static_cast<unsigned char>(bits >> (8 * k));
  }
  return base64_encode(bytes.data(), bytes.size());
}

std::vector<double> decode_f64le(const std::string& b64) {
  std::vector<unsigned char> bytes = base64_decode(b64);
  if (bytes.size() % 8 != 0)
    throw FormatError("f64 payload: byte count not a multiple of 8");
  std::vector<double> out(bytes.size() / 8);
  for (size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k)
      bits |= static_cast<std::uint64_t>(bytes[i * 8 + k]) << (8 * k);
    std::memcpy(&out[i], &bits, 8);
  }
  return out;
}

Json mlp_to_json(const Mlp& net) {
  Json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["kind"] = "mlp";
  j["encoding"] = "f64le-base64";
  j["layer_sizes"] = net.layer_sizes;
  j["hidden_activation"] = activation_name(net.hidden_activation);
  j["output_activation"] = activation_name(net.output_activation);
  Json ws = Json::array();
  Json bs = Json::array();
  for (const auto& W : net.weights) ws.push_back(encode_f64le(W.data(), W.size()));
  for (const auto& b : net.biases) bs.push_back(encode_f64le(b.data(), b.size()));
  j["weights"] = std::move(ws);
  j["biases"] = std::move(bs);
  return j;
}

Mlp mlp_from_json(const Json& j) {
  if (!j.contains("format_version") ||
      j["format_version"].get<int>() != kCheckpointFormatVersion)
    throw FormatError("mlp_from_json: missing or unsupported format_version");
  if (j.value("kind", "") != "mlp")
    throw FormatError("mlp_from_json: kind is not 'mlp'");
  Mlp net;
  net.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  net.hidden_activation =
      activation_from_name(j.at("hidden_activation").get<std::string>());
  net.output_activation =
      activation_from_name(j.at("output_activation").get<std::string>());
  const auto& ws = j.at("weights");
  const auto& bs = j.at("biases");
  const size_t L = net.layer_sizes.size() - 1;
  if (ws.size() != L || bs.size() != L)
    throw FormatError("mlp_from_json: layer count mismatch");
  for (size_t l = 0; l < L; ++l) {
    const int rows = net.layer_sizes[l + 1];
    const int cols = net.layer_sizes[l];
    std::vector<double> wdata = decode_f64le(ws[l].get<std::string>());
    std::vector<double> bdata = decode_f64le(bs[l].get<std::string>());
    if (static_cast<int>(wdata.size()) != rows * cols ||
        static_cast<int>(bdata.size()) != rows)
      throw FormatError("mlp_from_json: parameter size mismatch at layer " +
                        std::to_string(l));
    net.weights.emplace_back(Eigen::Map<Mat>(wdata.data(), rows, cols));
    net.biases.emplace_back(Eigen::Map<Vec>(bdata.data(), rows));
  }
  return net;
}

void save_json_file(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw Error("write failed: " + path);
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open: " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("JSON parse error in " + path + ": " + e.what());
  }
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mlp_param_hash(const Mlp& net) {
  return fnv1a_hash(mlp_to_json(net).dump());
}

}  // namespace pdlab

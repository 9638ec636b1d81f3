#include "pdlab/curve.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace pdlab {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "step,eval_success_rate,eval_episodes,epsilon,wall_seconds\n";
  for (const CurvePoint& p : curve) {
    out += std::to_string(p.step);
    out += ',';
    out += format_double(p.eval_success_rate);
    out += ',';
    out += std::to_string(p.eval_episodes);
    out += ',';
    out += format_double(p.epsilon);
    out += ',';
    out += format_double(p.wall_seconds);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double_field(const std::string& s, int line_no) {
  const char* b = s.data();
  double v = 0.0;
  const auto res = std::from_chars(b, b + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != b + s.size())
    throw FormatError("curve csv line " + std::to_string(line_no) +
                      ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::vector<CurvePoint> curve_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw FormatError("curve csv: empty input");
  if (line == "step,eval_success_rate,eval_episodes,epsilon,wall_seconds\r")
    line.pop_back();
  if (line != "step,eval_success_rate,eval_episodes,epsilon,wall_seconds")
    throw FormatError("curve csv: unexpected header '" + line + "'");
  std::vector<CurvePoint> curve;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 5)
      throw FormatError("curve csv line " + std::to_string(line_no) +
                        ": expected 5 fields, got " +
                        std::to_string(f.size()));
    CurvePoint p;
    p.step = static_cast<long long>(parse_double_field(f[0], line_no));
    p.eval_success_rate = parse_double_field(f[1], line_no);
    p.eval_episodes = static_cast<int>(parse_double_field(f[2], line_no));
    p.epsilon = parse_double_field(f[3], line_no);
    p.wall_seconds = parse_double_field(f[4], line_no);
    curve.push_back(p);
  }
  return curve;
}

void save_curve_csv(const std::vector<CurvePoint>& curve,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_curve_csv: cannot open '" + path + "'");
  const std::string text = curve_to_csv(curve);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("save_curve_csv: write failed for '" + path + "'");
}

std::vector<CurvePoint> load_curve_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_curve_csv: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return curve_from_csv(buf.str());
}

Json summary_to_json(const RunSummary& s) {
  Json j;
  j["method"] = s.method;
  j["env"] = s.env;
  j["seed"] = s.seed;
  j["final_success"] = s.final_success;
  j["best_success"] = s.best_success;
  j["steps"] = s.steps;
  j["config_hash"] = s.config_hash;
  if (!s.extra.is_null()) j["extra"] = s.extra;
  return j;
}

RunSummary summary_from_json(const Json& j) {
  RunSummary s;
  try {
    s.method = j.at("method").get<std::string>();
    s.env = j.at("env").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.final_success = j.at("final_success").get<double>();
    s.best_success = j.at("best_success").get<double>();
    s.steps = j.at("steps").get<long long>();
    s.config_hash = j.at("config_hash").get<std::string>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("run summary: ") + e.what());
  }
  if (j.contains("extra")) s.extra = j.at("extra");
  return s;
}

}  // namespace pdlab

// pdlab: one binary, one subcommand per pipeline stage.
//   gen-demos              scripted-expert demonstration datasets
//   train-bc               behavior-cloned base policies
//   run                    one online-training run (decorator or baseline)
//   sweep                  grid of runs (alpha/H/... x seeds)
//   eval                   success rate of a saved checkpoint
//   bench-timing           forward/backward MLP timing
//   analyze-multimodality  action-distribution mode analysis at a probe state
//   plot                   SVG learning curves from run directories

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>

#include "pdlab/curve.hpp"
#include "pdlab/demos.hpp"
#include "pdlab/methods.hpp"
#include "pdlab/multimodality.hpp"
#include "pdlab/runcfg.hpp"
#include "pdlab/svg.hpp"
#include "pdlab/timing.hpp"

namespace fs = std::filesystem;
using namespace pdlab;

namespace {

KvConfig load_kv(const std::string& config_path) {
  if (config_path.empty()) return KvConfig{};
  return KvConfig::parse_file(config_path);
}

// Environment spec resolution shared by eval/analyze; the shift env gets its
// held-out goal set when asked.
EnvSpec resolve_spec(const std::string& env, bool eval_goals) {
  if (env == "point_gate_shift") return point_gate_shift_spec(eval_goals);
  require(!eval_goals, "--eval-goals only applies to point_gate_shift");
  return make_env_spec(env);
}

int cmd_gen_demos(const std::string& config, const KvConfig& overrides) {
  KvConfig kv = load_kv(config);
  for (const auto& [k, v] : overrides.values()) kv.set(k, v);
  kv.require_known(known_config_keys());
  const std::string env = kv.get_string("env", "point_gate");
  const EnvSpec spec = make_env_spec(env);
  const int count = static_cast<int>(kv.get_int("demos.count", 60));
  const double noise = kv.get_double("demos.noise_std", 0.01);
  const ModePolicy mode =
      mode_policy_from_string(kv.get_string("demos.mode", "mixed"));
  const std::uint64_t seed = kv.get_u64("demos.seed", 0);
  const std::string path = kv.get_string("demos.path", "demos.jsonl");

  const DemoDataset ds = generate_demos(spec, count, seed, mode, noise);
  if (!fs::path(path).parent_path().empty())
    fs::create_directories(fs::path(path).parent_path());
  save_demos(ds, path);
  long long steps = 0;
  for (const auto& t : ds.trajectories) steps += (long long)t.actions.size();
  std::cout << "wrote " << ds.trajectories.size() << " trajectories ("
            << steps << " steps) for " << env << " to " << path << "\n";
  return 0;
}

int cmd_train_bc(const std::string& config, const KvConfig& overrides) {
  KvConfig kv = load_kv(config);
  for (const auto& [k, v] : overrides.values()) kv.set(k, v);
  kv.require_known(known_config_keys());
  const std::string demos_path = kv.get_string("demos.path", "demos.jsonl");
  const DemoDataset ds = load_demos(demos_path);
  const EnvSpec spec = make_env_spec(ds.env_name);

  BcConfig bc;
  bc.arch = kv.get_string("bc.arch", bc.arch);
  bc.tanh_head = kv.get_bool("bc.tanh_head", bc.tanh_head);
  bc.k = static_cast<int>(kv.get_int("bc.k", bc.k));
  bc.hidden = kv.get_int_list("bc.hidden", bc.hidden);
  bc.epochs = static_cast<int>(kv.get_int("bc.epochs", bc.epochs));
  bc.batch = static_cast<int>(kv.get_int("bc.batch", bc.batch));
  bc.learning_rate = kv.get_double("bc.learning_rate", bc.learning_rate);
  bc.weight_decay = kv.get_double("bc.weight_decay", bc.weight_decay);
  bc.eval_episodes =
      static_cast<int>(kv.get_int("bc.eval_episodes", bc.eval_episodes));
  bc.seed = kv.get_u64("bc.seed", bc.seed);
  const std::string out = kv.get_string("bc.path", "base_policy.json");

  const BcResult r = train_bc(ds, spec, bc);
  if (!fs::path(out).parent_path().empty())
    fs::create_directories(fs::path(out).parent_path());
  save_policy(r.policy, out);
  std::cout << "base policy (" << r.policy.kind << ") -> " << out
            << "  chosen_epoch=" << r.chosen_epoch
            << " success=" << format_double(r.chosen_success)
            << " final_loss=" << format_double(r.final_loss) << "\n";
  return 0;
}

int cmd_run(const std::string& config, const KvConfig& overrides) {
  KvConfig kv = load_kv(config);
  for (const auto& [k, v] : overrides.values()) kv.set(k, v);
  const RunConfig cfg = run_config_from(kv);
  const RunResult r = execute_run(cfg);
  write_run_artifacts(cfg, r);
  std::cout << cfg.method << " on " << cfg.env << " seed " << cfg.seed
            << ": final=" << format_double(r.final_success)
            << " best=" << format_double(r.best_success) << " -> "
            << cfg.output_dir << "\n";
  return 0;
}

int cmd_sweep(const std::string& config, const KvConfig& overrides,
              const std::vector<std::string>& grids,
              const std::string& seeds_flag, const std::string& out_dir) {
  KvConfig base_kv = load_kv(config);
  for (const auto& [k, v] : overrides.values()) base_kv.set(k, v);
  if (!seeds_flag.empty()) base_kv.set("seeds", seeds_flag);

  // Each --grid is "key=v1,v2,..."; cells are the cartesian product.
  struct Axis {
    std::string key;
    std::vector<std::string> values;
  };
  std::vector<Axis> axes;
  for (const std::string& g : grids) {
    const size_t eq = g.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= g.size())
      throw ConfigError("--grid expects key=v1,v2,... got '" + g + "'");
    Axis ax;
    ax.key = g.substr(0, eq);
    std::string cur;
    for (char c : g.substr(eq + 1)) {
      if (c == ',') {
        ax.values.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    ax.values.push_back(cur);
    axes.push_back(std::move(ax));
  }
  std::vector<std::uint64_t> seeds =
      base_kv.get_u64_list("seeds", {base_kv.get_u64("seed", 0)});

  Json manifest;
  manifest["kind"] = "sweep";
  manifest["cells"] = Json::array();
  std::vector<size_t> idx(axes.size(), 0);
  while (true) {
    std::string cell_name;
    KvConfig cell_kv = base_kv;
    for (size_t a = 0; a < axes.size(); ++a) {
      cell_kv.set(axes[a].key, axes[a].values[idx[a]]);
      if (!cell_name.empty()) cell_name += "_";
      cell_name += axes[a].key + "-" + axes[a].values[idx[a]];
    }
    if (cell_name.empty()) cell_name = "all";
    for (std::uint64_t s : seeds) {
      KvConfig run_kv = cell_kv;
      run_kv.set("seed", std::to_string(s));
      const std::string dir =
          out_dir + "/" + cell_name + "/seed-" + std::to_string(s);
      run_kv.set("output_dir", dir);
      const RunConfig cfg = run_config_from(run_kv);
      const RunResult r = execute_run(cfg);
      write_run_artifacts(cfg, r);
      Json cell;
      cell["name"] = cell_name;
      cell["seed"] = s;
      cell["dir"] = dir;
      cell["final_success"] = r.final_success;
      cell["best_success"] = r.best_success;
      manifest["cells"].push_back(cell);
      std::cout << cell_name << " seed " << s
                << ": final=" << format_double(r.final_success) << "\n";
    }
    // Advance the odometer.
    size_t a = 0;
    for (; a < axes.size(); ++a) {
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
    }
    if (a == axes.size()) break;
  }
  fs::create_directories(out_dir);
  save_json_file(manifest, out_dir + "/sweep.json");
  std::cout << "sweep manifest -> " << out_dir << "/sweep.json\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& base_path,
             const std::string& env_override, bool eval_goals, int episodes,
             std::uint64_t seed, int prefix_override) {
  require(checkpoint.empty() != base_path.empty(),
          "eval takes exactly one of --checkpoint / --base-policy");
  Json out;
  std::string env = env_override;
  PolicyHandle policy;
  std::function<Vec(const Vec&)> prefix_policy;
  int prefix = std::max(prefix_override, 0);
  if (!checkpoint.empty()) {
    const LoadedCheckpoint c = load_run_checkpoint(checkpoint);
    if (env.empty()) env = c.env;
    prefix = prefix_override >= 0 ? prefix_override : c.prefix_steps;
    policy = c.refined();
    if (prefix > 0) prefix_policy = c.prefix_policy();
    out["checkpoint"] = checkpoint;
    out["method"] = c.method;
  } else {
    const BasePolicy base = load_policy(base_path);
    if (env.empty()) env = base.env_name;
    policy = base.handle();
    out["base_policy"] = base_path;
    out["method"] = "base:" + base.kind;
  }
  const EnvSpec spec = resolve_spec(env, eval_goals);
  const double success =
      evaluate_policy(spec, policy, prefix_policy, prefix, episodes, seed);
  out["env"] = env;
  out["eval_goals"] = eval_goals;
  out["episodes"] = episodes;
  out["prefix_steps"] = prefix;
  out["success"] = success;
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_bench_timing(int input_dim, const std::vector<int>& hidden,
                     int output_dim, int batch, int repeats,
                     std::uint64_t seed) {
  std::vector<int> sizes{input_dim};
  for (int h : hidden) sizes.push_back(h);
  sizes.push_back(output_dim);
  Rng rng(derive_seed(seed, "bench_timing"));
  const Mlp net = make_mlp(sizes, Activation::relu, Activation::identity, rng);
  std::vector<Vec> inputs(batch);
  for (int i = 0; i < batch; ++i) {
    inputs[i] = Vec(input_dim);
    rng.fill_normal(inputs[i]);
  }
  const TimingResult t = time_forward_backward(net, inputs, repeats);
  Json out;
  out["sizes"] = sizes;
  out["batch"] = batch;
  out["repeats"] = repeats;
  out["mean_forward_seconds"] = t.mean_forward_seconds;
  out["mean_backward_seconds"] = t.mean_backward_seconds;
  out["backward_over_forward"] =
      t.mean_backward_seconds / t.mean_forward_seconds;
  std::cout << out.dump() << "\n";
  return 0;
}

Json mode_split_json(const ModeSplit& m) {
  Json j;
  j["center_separation"] = m.center_separation;
  j["within_std"] = m.within_std;
  j["ratio"] = m.ratio;
  j["mode_count"] = m.mode_count;
  return j;
}

int cmd_analyze_multimodality(const std::string& checkpoint, int samples,
                              std::uint64_t seed,
                              const std::vector<double>& obs_flag,
                              const std::string& out_path) {
  const LoadedCheckpoint c = load_run_checkpoint(checkpoint);
  require(c.base.has_value() && c.base->cluster.has_value(),
          "analyze-multimodality needs a checkpoint whose base policy is "
          "cluster_offset (that is where the base's modes live)");
  const EnvSpec spec = resolve_spec(c.env, false);

  Vec probe;
  if (!obs_flag.empty()) {
    probe = Vec(static_cast<int>(obs_flag.size()));
    for (size_t i = 0; i < obs_flag.size(); ++i) probe[i] = obs_flag[i];
    require(probe.size() == spec.obs_dim,
            "--obs has " + std::to_string(probe.size()) +
                " values, env expects " + std::to_string(spec.obs_dim));
  } else {
    require(spec.name != EnvName::reacher_insert,
            "pass --obs for reacher_insert (no default probe state)");
    // Default probe: the start-region center, where the detour choice is
    // still open and the base policy's two modes disagree.
    const PointGateGeometry& g = spec.gate_geom;
    const Eigen::Vector2d goal =
        spec.goal_set.empty() ? g.fixed_goal : spec.goal_set[0];
    probe = Vec(4);
    probe << 0.5 * (g.start_x_lo + g.start_x_hi),
        0.5 * (g.start_y_lo + g.start_y_hi), goal.x(), goal.y();
  }

  const auto base_sampler = cluster_action_sampler(*c.base->cluster, probe);
  const auto refined_sampler = decorated_action_sampler(
      base_sampler, c.actor, c.compose_scale, c.psi(), probe);
  const MultimodalityReport rep =
      analyze_multimodality(base_sampler, refined_sampler, samples, seed);

  Json out;
  out["checkpoint"] = checkpoint;
  out["probe_obs"] = std::vector<double>(probe.data(),
                                         probe.data() + probe.size());
  out["samples"] = rep.samples;
  out["threshold"] = kBimodalityRatioThreshold;
  out["principal_direction"] = std::vector<double>(
      rep.principal_direction.data(),
      rep.principal_direction.data() + rep.principal_direction.size());
  out["base"] = mode_split_json(rep.base);
  out["refined"] = mode_split_json(rep.refined);
  std::cout << out.dump() << "\n";
  if (!out_path.empty()) save_json_file(out, out_path);
  return 0;
}

struct FoundRun {
  std::string dir;
  std::string label;
  std::string group;
  std::vector<CurvePoint> curve;
};

int cmd_plot(const std::vector<std::string>& inputs, const std::string& out,
             const std::string& group_by, const std::string& title) {
  require(group_by == "run" || group_by == "method",
          "--group-by must be 'run' or 'method'");
  std::vector<FoundRun> runs;
  for (const std::string& root : inputs) {
    require(fs::exists(root), "plot: no such path '" + root + "'");
    std::vector<fs::path> dirs;
    if (fs::is_directory(root)) {
      dirs.push_back(root);
      for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_directory()) dirs.push_back(e.path());
    }
    for (const fs::path& d : dirs) {
      if (!fs::exists(d / "curve.csv")) continue;
      FoundRun r;
      r.dir = d.string();
      r.curve = load_curve_csv((d / "curve.csv").string());
      if (fs::exists(d / "summary.json")) {
        const RunSummary s =
            summary_from_json(load_json_file((d / "summary.json").string()));
        r.group = s.method;
        r.label = s.method + " seed " + std::to_string(s.seed);
      } else {
        r.group = d.filename().string();
        r.label = d.filename().string();
      }
      runs.push_back(std::move(r));
    }
  }
  require(!runs.empty(), "plot: no curve.csv found under the given paths");
  std::sort(runs.begin(), runs.end(), [](const FoundRun& a, const FoundRun& b) {
    return a.dir < b.dir;
  });

  std::vector<CurveSeries> series;
  if (group_by == "run") {
    for (const FoundRun& r : runs) {
      CurveSeries s;
      s.label = r.label;
      for (const CurvePoint& p : r.curve) {
        s.x.push_back(static_cast<double>(p.step));
        s.mean.push_back(p.eval_success_rate);
      }
      series.push_back(std::move(s));
    }
  } else {
    // Mean +/- 1 std across the runs of each method; step grids must agree
    // (they do for runs produced with the same eval cadence).
    std::vector<std::string> order;
    for (const FoundRun& r : runs)
      if (std::find(order.begin(), order.end(), r.group) == order.end())
        order.push_back(r.group);
    for (const std::string& g : order) {
      std::vector<const FoundRun*> members;
      for (const FoundRun& r : runs)
        if (r.group == g) members.push_back(&r);
      const size_t n = members[0]->curve.size();
      for (const FoundRun* m : members)
        require(m->curve.size() == n &&
                    m->curve.back().step == members[0]->curve.back().step,
                "plot: runs in group '" + g + "' have different step grids");
      CurveSeries s;
      s.label = g + " (n=" + std::to_string(members.size()) + ")";
      for (size_t i = 0; i < n; ++i) {
        const double step = static_cast<double>(members[0]->curve[i].step);
        double mean = 0.0;
        for (const FoundRun* m : members)
          mean += m->curve[i].eval_success_rate;
        mean /= static_cast<double>(members.size());
        double var = 0.0;
        for (const FoundRun* m : members) {
          const double d = m->curve[i].eval_success_rate - mean;
          var += d * d;
        }
        var /= static_cast<double>(members.size());
        s.x.push_back(step);
        s.mean.push_back(mean);
        s.std_band.push_back(std::sqrt(var));
      }
      series.push_back(std::move(s));
    }
  }
  const std::string svg =
      render_curves_svg(series, title, "environment steps", "success rate");
  if (!fs::path(out).parent_path().empty())
    fs::create_directories(fs::path(out).parent_path());
  save_text_file(svg, out);
  std::cout << "wrote " << out << " (" << series.size() << " series)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy Decorator laboratory"};
  app.require_subcommand(1);

  std::string config, out_dir = "sweep_out", seeds_flag;
  std::vector<std::string> grids;
  // Generic key=value overrides applied on top of --config for the stages
  // that read config files.
  std::vector<std::string> set_kv;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "TOML-like config file");
    sub->add_option("--set", set_kv,
                    "override a config key, e.g. --set alpha=0.3");
  };

  CLI::App* gen = app.add_subcommand("gen-demos",
                                     "generate expert demonstrations");
  add_common(gen);
  std::string g_env, g_mode, g_out;
  int g_count = -1;
  double g_noise = -1.0;
  std::int64_t g_seed = -1;
  gen->add_option("--env", g_env, "environment name");
  gen->add_option("--count", g_count, "number of successful trajectories");
  gen->add_option("--noise-std", g_noise, "expert action noise");
  gen->add_option("--mode", g_mode, "around_left|around_right|mixed");
  gen->add_option("--seed", g_seed, "dataset seed");
  gen->add_option("--out", g_out, "output JSONL path");

  CLI::App* bc = app.add_subcommand("train-bc", "behavior-clone a base policy");
  add_common(bc);
  std::string b_demos, b_out, b_arch;
  std::int64_t b_seed = -1;
  bc->add_option("--demos", b_demos, "demo JSONL path");
  bc->add_option("--out", b_out, "output policy path");
  bc->add_option("--arch", b_arch, "cluster_offset|mlp");
  bc->add_option("--seed", b_seed, "training seed");

  CLI::App* run = app.add_subcommand("run", "one online-training run");
  add_common(run);
  std::string r_method, r_env, r_base, r_out;
  std::int64_t r_seed = -1, r_steps = -1, r_H = -1;
  double r_alpha = -1.0;
  run->add_option("--method", r_method, "decorator or a baseline name");
  run->add_option("--env", r_env, "environment name");
  run->add_option("--seed", r_seed, "run seed");
  run->add_option("--alpha", r_alpha, "residual bound");
  run->add_option("--H", r_H, "exploration-schedule horizon");
  run->add_option("--base-policy", r_base, "trained base policy path");
  run->add_option("--output-dir", r_out, "artifact directory");
  run->add_option("--total-steps", r_steps, "environment-step budget");

  CLI::App* sweep = app.add_subcommand("sweep", "grid of runs");
  add_common(sweep);
  sweep->add_option("--grid", grids, "axis as key=v1,v2,... (repeatable)");
  sweep->add_option("--seeds", seeds_flag, "comma list of seeds");
  sweep->add_option("--output-dir", out_dir, "sweep root directory");

  CLI::App* ev = app.add_subcommand("eval", "evaluate a saved checkpoint");
  std::string e_ckpt, e_base, e_env;
  bool e_goals = false;
  int e_episodes = 50, e_prefix = -1;
  std::uint64_t e_seed = 0;
  ev->add_option("--checkpoint", e_ckpt, "checkpoint.json path");
  ev->add_option("--base-policy", e_base,
                 "evaluate a trained base policy instead");
  ev->add_option("--env", e_env, "override environment");
  ev->add_flag("--eval-goals", e_goals, "held-out goals (point_gate_shift)");
  ev->add_option("--episodes", e_episodes, "evaluation episodes");
  ev->add_option("--seed", e_seed, "evaluation seed");
  ev->add_option("--prefix-steps", e_prefix,
                 "override the evaluation prefix length");

  CLI::App* bench = app.add_subcommand("bench-timing",
                                       "forward/backward MLP timing");
  int t_in = 64, t_out_dim = 1, t_batch = 1024, t_repeats = 30;
  std::vector<int> t_hidden{256, 256, 256};
  std::uint64_t t_seed = 0;
  bench->add_option("--input-dim", t_in, "input width");
  bench->add_option("--hidden", t_hidden, "hidden widths");
  bench->add_option("--output-dim", t_out_dim, "output width");
  bench->add_option("--batch", t_batch, "batch size");
  bench->add_option("--repeats", t_repeats, "timing repetitions");
  bench->add_option("--seed", t_seed, "init seed");

  CLI::App* mm = app.add_subcommand("analyze-multimodality",
                                    "mode analysis at a probe state");
  std::string m_ckpt, m_out;
  int m_samples = 4000;
  std::uint64_t m_seed = 0;
  std::vector<double> m_obs;
  mm->add_option("--checkpoint", m_ckpt, "checkpoint.json path")->required();
  mm->add_option("--samples", m_samples, "action samples per policy");
  mm->add_option("--seed", m_seed, "sampling seed");
  mm->add_option("--obs", m_obs, "probe observation (defaults to the "
                                 "start-region center)");
  mm->add_option("--out", m_out, "also write the report JSON here");

  CLI::App* plot = app.add_subcommand("plot", "render learning-curve SVG");
  std::vector<std::string> p_in;
  std::string p_out = "curves.svg", p_group = "run", p_title = "learning curves";
  plot->add_option("--in", p_in, "run directory (repeatable, recursive)")
      ->required();
  plot->add_option("--out", p_out, "output SVG path");
  plot->add_option("--group-by", p_group,
                   "run: one line per run; method: mean +/- std band");
  plot->add_option("--title", p_title, "plot title");

  CLI11_PARSE(app, argc, argv);

  try {
    KvConfig overrides;
    for (const std::string& kv : set_kv) {
      const size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("--set expects key=value, got '" + kv + "'");
      overrides.set(kv.substr(0, eq), kv.substr(eq + 1));
    }

    if (app.got_subcommand(gen)) {
      if (!g_env.empty()) overrides.set("env", g_env);
      if (g_count >= 0) overrides.set("demos.count", std::to_string(g_count));
      if (g_noise >= 0.0)
        overrides.set("demos.noise_std", format_double(g_noise));
      if (!g_mode.empty()) overrides.set("demos.mode", g_mode);
      if (g_seed >= 0) overrides.set("demos.seed", std::to_string(g_seed));
      if (!g_out.empty()) overrides.set("demos.path", g_out);
      return cmd_gen_demos(config, overrides);
    }
    if (app.got_subcommand(bc)) {
      if (!b_demos.empty()) overrides.set("demos.path", b_demos);
      if (!b_out.empty()) overrides.set("bc.path", b_out);
      if (!b_arch.empty()) overrides.set("bc.arch", b_arch);
      if (b_seed >= 0) overrides.set("bc.seed", std::to_string(b_seed));
      return cmd_train_bc(config, overrides);
    }
    if (app.got_subcommand(run)) {
      if (!r_method.empty()) overrides.set("method", r_method);
      if (!r_env.empty()) overrides.set("env", r_env);
      if (r_seed >= 0) overrides.set("seed", std::to_string(r_seed));
      if (r_alpha >= 0.0) overrides.set("alpha", format_double(r_alpha));
      if (r_H >= 0) overrides.set("H", std::to_string(r_H));
      if (!r_base.empty()) overrides.set("base_policy", r_base);
      if (!r_out.empty()) overrides.set("output_dir", r_out);
      if (r_steps >= 0)
        overrides.set("total_env_steps", std::to_string(r_steps));
      return cmd_run(config, overrides);
    }
    if (app.got_subcommand(sweep))
      return cmd_sweep(config, overrides, grids, seeds_flag, out_dir);
    if (app.got_subcommand(ev))
      return cmd_eval(e_ckpt, e_base, e_env, e_goals, e_episodes, e_seed,
                      e_prefix);
    if (app.got_subcommand(bench))
      return cmd_bench_timing(t_in, t_hidden, t_out_dim, t_batch, t_repeats,
                              t_seed);
    if (app.got_subcommand(mm))
      return cmd_analyze_multimodality(m_ckpt, m_samples, m_seed, m_obs,
                                       m_out);
    if (app.got_subcommand(plot))
      return cmd_plot(p_in, p_out, p_group, p_title);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

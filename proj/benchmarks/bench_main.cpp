// Microbenchmarks for the hot paths: MLP forward/backward at the widths the
// timing study cares about, environment stepping, and one full SAC update.

#include <benchmark/benchmark.h>

#include <memory>

#include "pdlab/compose.hpp"
#include "pdlab/env.hpp"
#include "pdlab/mlp.hpp"
#include "pdlab/rng.hpp"
#include "pdlab/sac.hpp"

using namespace pdlab;

namespace {

Mlp bench_net(int width, int depth, Rng& rng) {
  std::vector<int> sizes{64};
  for (int i = 0; i < depth; ++i) sizes.push_back(width);
  sizes.push_back(8);
  return make_mlp(sizes, Activation::relu, Activation::identity, rng);
}

void BM_MlpForward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const int depth = static_cast<int>(state.range(1));
  const int batch = 256;
  Rng rng(1);
  const Mlp net = bench_net(width, depth, rng);
  Mat X(64, batch);
  rng.fill_normal(X);
  for (auto _ : state) {
    const Mat Y = mlp_forward(net, X);
    benchmark::DoNotOptimize(Y.sum());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}

void BM_MlpForwardBackward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const int depth = static_cast<int>(state.range(1));
  const int batch = 256;
  Rng rng(1);
  const Mlp net = bench_net(width, depth, rng);
  Mat X(64, batch);
  rng.fill_normal(X);
  Mat upstream(8, batch);
  rng.fill_normal(upstream);
  MlpGrads g = make_grads(net);
  for (auto _ : state) {
    MlpWorkspace ws;
    const Mat Y = mlp_forward(net, X, &ws);
    benchmark::DoNotOptimize(Y.sum());
    g.zero();
    const Mat dX = mlp_backward(net, ws, upstream, &g);
    benchmark::DoNotOptimize(dX.sum());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}

void BM_EnvStep(benchmark::State& state) {
  Env env(point_gate_spec());
  env.reset(7);
  Vec a(2);
  a << 0.3, 0.2;
  long long steps = 0;
  for (auto _ : state) {
    const StepResult r = env.step(a);
    benchmark::DoNotOptimize(r.reward);
    if (r.done) env.reset(7 + ++steps);
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_SacUpdate(benchmark::State& state) {
  const int batch = 128;
  SacConfig cfg;
  cfg.hidden = {64, 64};
  cfg.batch = batch;
  Rng init(3);
  SacCore core(cfg, 4, 4, 2, CriticActionInput::sum, 0.1, init);

  Rng rng(11);
  SacCore::Batch b;
  b.obs.resize(4, batch);
  b.next_obs.resize(4, batch);
  b.base.resize(2, batch);
  b.next_base.resize(2, batch);
  rng.fill_normal(b.obs);
  rng.fill_normal(b.next_obs);
  rng.fill_normal(b.base);
  rng.fill_normal(b.next_base);
  b.base *= 0.4;
  b.next_base *= 0.4;
  b.psi = b.obs;
  b.psi_next = b.next_obs;
  Mat residual(2, batch);
  rng.fill_normal(residual);
  residual *= 0.05;
  b.critic_in =
      critic_input_batch(b.obs, b.base, residual, CriticActionInput::sum);
  b.reward.resize(batch);
  b.done.resize(batch);
  for (int j = 0; j < batch; ++j) {
    b.reward[j] = rng.uniform();
    b.done[j] = j % 7 == 0 ? 1.0 : 0.0;
  }

  for (auto _ : state) {
    const SacLosses l = core.update(b, rng);
    benchmark::DoNotOptimize(l.critic);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}

}  // namespace

BENCHMARK(BM_MlpForward)
    ->Args({64, 2})
    ->Args({256, 3})
    ->Args({512, 3})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MlpForwardBackward)
    ->Args({64, 2})
    ->Args({256, 3})
    ->Args({512, 3})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EnvStep);
BENCHMARK(BM_SacUpdate)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

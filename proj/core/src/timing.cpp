#include "pdlab/timing.hpp"

#include <chrono>

namespace pdlab {

TimingResult time_forward_backward(const Mlp& net,
                                   const std::vector<Vec>& batch, int repeats) {
  if (batch.empty()) throw Error("time_forward_backward: empty batch");
  require(repeats >= 1, "time_forward_backward: repeats must be >= 1");

  Mat X(net.input_dim(), static_cast<Eigen::Index>(batch.size()));
  for (size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].size() != net.input_dim())
      throw ShapeError("time_forward_backward: batch element dimension mismatch");
    X.col(static_cast<Eigen::Index>(i)) = batch[i];
  }
  const Mat upstream = Mat::Ones(net.output_dim(), X.cols());
  MlpGrads grads = make_grads(net);
  MlpWorkspace ws;

  // Warm-up pass so first-touch allocation does not pollute the timings.
  mlp_forward(net, X, &ws);
  mlp_backward(net, ws, upstream, &grads);

  using Clock = std::chrono::steady_clock;
  double fwd = 0.0, bwd = 0.0;
  // volatile sink prevents the optimizer from discarding untimed results.
  volatile double sink = 0.0;
  for (int r = 0; r < repeats; ++r) {
    auto t0 = Clock::now();
    Mat out = mlp_forward(net, X);
    auto t1 = Clock::now();
    fwd += std::chrono::duration<double>(t1 - t0).count();
    sink = sink + out(0, 0);

    mlp_forward(net, X, &ws);  // produce caches, untimed
    grads.zero();
    auto t2 = Clock::now();
    Mat input_grad = mlp_backward(net, ws, upstream, &grads);
    auto t3 = Clock::now();
    bwd += std::chrono::duration<double>(t3 - t2).count();
    sink = sink + input_grad(0, 0);
  }
  (void)sink;
  return {fwd / repeats, bwd / repeats};
}

}  // namespace pdlab

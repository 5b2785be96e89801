#include <benchmark/benchmark.h>

#include "phasecast/nn/network.hpp"
#include "phasecast/util/rng.hpp"

using namespace phasecast;

namespace {

std::vector<Eigen::MatrixXd> random_window(int T, int batch, int input, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::MatrixXd> x(static_cast<std::size_t>(T), Eigen::MatrixXd(batch, input));
  for (auto& xt : x) {
    for (Eigen::Index r = 0; r < xt.rows(); ++r) {
      for (Eigen::Index c = 0; c < xt.cols(); ++c) xt(r, c) = rng.uniform(0.0, 1.0);
    }
  }
  return x;
}

void bm_forward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const int F = 122, N = 12, T = 120;
  auto params = nn::LstmParams::init(F, N, 1);
  auto x = random_window(T, batch, F, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::forward(params, x));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(bm_forward)->Arg(1)->Arg(64)->Arg(256);

void bm_forward_backward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const int F = 122, N = 12, T = 120;
  auto params = nn::LstmParams::init(F, N, 1);
  auto x = random_window(T, batch, F, 2);
  Eigen::MatrixXd dpred = Eigen::MatrixXd::Ones(batch, nn::kOutputSize);
  auto grads = nn::LstmParams::zeros(F, N);
  for (auto _ : state) {
    nn::ForwardCache cache;
    benchmark::DoNotOptimize(nn::forward(params, x, &cache));
    grads.set_zero();
    nn::backward(params, cache, dpred, grads);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(bm_forward_backward)->Arg(64)->Arg(128);

void bm_lstm_step(benchmark::State& state) {
  const int F = 122, N = 47;
  auto params = nn::LstmParams::init(F, N, 1);
  Rng rng(3);
  Eigen::VectorXd x(F), h = Eigen::VectorXd::Zero(N), c = Eigen::VectorXd::Zero(N);
  for (int i = 0; i < F; ++i) x[i] = rng.uniform(0.0, 1.0);
  for (auto _ : state) {
    auto r = nn::lstm_step(x, h, c, params);
    benchmark::DoNotOptimize(r.h);
  }
}
BENCHMARK(bm_lstm_step);

}  // namespace

BENCHMARK_MAIN();

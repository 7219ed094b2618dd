#include <benchmark/benchmark.h>

#include <neuroprior/baselines.hpp>
#include <neuroprior/gaussian_draw.hpp>
#include <neuroprior/map.hpp>
#include <neuroprior/matchfit.hpp>
#include <neuroprior/metrics.hpp>
#include <neuroprior/sampler.hpp>

#include <string>
#include <vector>

using namespace neuroprior;

namespace {

RegressionData problem(Eigen::Index n, Eigen::Index p, SignalKind signal = SignalKind::low_dim) {
  Scenario s;
  s.n = n;
  s.p = p;
  s.signal = signal;
  s.magnitude = signal == SignalKind::low_dim ? 0.3 : 1.0;
  const auto sim = simulate(s);
  return RegressionData(sim.x, sim.y).standardize();
}

NeuronizedPrior spsl_prior(Eigen::Index p) {
  NeuronizedPrior prior;
  prior.alpha0 = alpha0_from_sparsity(1.0 / static_cast<double>(p));
  return prior;
}

// Sweeps per second are iterations/s; burn-in is zero so every sweep counts.
SamplerConfig sweeps(std::size_t count) {
  SamplerConfig c;
  c.iterations = count;
  c.burn_in = 0;
  c.store_theta = false;
  c.trace = TraceStatistic::none;
  return c;
}

void BM_NeuronizedSweep(benchmark::State& state) {
  const auto data = problem(state.range(0), state.range(1));
  const auto prior = spsl_prior(state.range(1));
  auto config = sweeps(1);
  config.alpha_update = state.range(2) == 0 ? AlphaUpdate::random_walk : AlphaUpdate::exact_relu;
  ChainState warm;
  {
    auto c = sweeps(200);
    c.alpha_update = config.alpha_update;
    warm = *run_chain(data, prior, c).final_state;
  }
  config.initial_state = warm;
  for (auto _ : state) {
    ++config.seed;
    benchmark::DoNotOptimize(run_chain(data, prior, config).sigma_sq_mean);
  }
  state.SetLabel(state.range(2) == 0 ? "random_walk" : "exact_relu");
}
BENCHMARK(BM_NeuronizedSweep)->Args({200, 50, 0})->Args({200, 50, 1})->Args({100, 300, 1})->Unit(benchmark::kMicrosecond);

void BM_SpslGammaSweep(benchmark::State& state) {
  const auto data = problem(state.range(0), state.range(1));
  SpslGammaConfig spsl;
  spsl.eta = 1.0 / static_cast<double>(state.range(1));
  const auto config = sweeps(static_cast<std::size_t>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(spsl_gamma_mcmc(data, spsl, config).sigma_sq_mean);
  state.SetItemsProcessed(state.iterations() * state.range(2));
}
BENCHMARK(BM_SpslGammaSweep)->Args({200, 50, 1000})->Args({100, 300, 1000})->Unit(benchmark::kMillisecond);

void BM_WDraw(benchmark::State& state) {
  const auto data = problem(state.range(0), state.range(1));
  const auto strategy = static_cast<WUpdate>(state.range(2));
  const Eigen::MatrixXd gram = data.x().transpose() * data.x();
  const Eigen::VectorXd xty = data.x().transpose() * data.y();
  Rng rng(3);
  Eigen::VectorXd t(data.p());
  for (Eigen::Index j = 0; j < data.p(); ++j) t(j) = rng.uniform() < 0.1 ? rng.uniform() : 0.0;
  const WDrawInputs in{data.x(), data.y(), &gram, &xty, t, 1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(w_draw(strategy, in, rng).sum());
  state.SetLabel(std::string(to_string(strategy)));
}
BENCHMARK(BM_WDraw)
    ->Args({200, 50, static_cast<int>(WUpdate::full)})
    ->Args({200, 50, static_cast<int>(WUpdate::block_relu)})
    ->Args({100, 1000, static_cast<int>(WUpdate::block_relu)})
    ->Args({100, 1000, static_cast<int>(WUpdate::fast_np)})
    ->Unit(benchmark::kMicrosecond);

void BM_MapWarmStartPath(benchmark::State& state) {
  const auto data = problem(state.range(0), state.range(1), SignalKind::high_dim);
  NeuronizedPrior prior;
  prior.activation = ActivationSpec::identity();
  const auto schedule = build_schedule(ScheduleKind::tau_path, default_tau_sq(data.p()), data.p());
  for (auto _ : state) benchmark::DoNotOptimize(run_map(data, prior, schedule).objective);
}
BENCHMARK(BM_MapWarmStartPath)->Args({100, 300})->Unit(benchmark::kMillisecond);

void BM_LassoCv(benchmark::State& state) {
  const auto data = problem(200, 50);
  for (auto _ : state) benchmark::DoNotOptimize(lasso_cv(data, 10, 100).lambda);
}
BENCHMARK(BM_LassoCv)->Unit(benchmark::kMillisecond);

void BM_MatchDistance(benchmark::State& state) {
  MatchConfig config;
  config.sample_size = static_cast<std::size_t>(state.range(0));
  const FrozenDraws draws(laplace_target(0.5), config);
  const auto phi = CubicBSpline::greville_abscissae(draws.breakpoints());
  for (auto _ : state) benchmark::DoNotOptimize(match_distance(phi, draws, config.distance));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MatchDistance)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Ess(benchmark::State& state) {
  Rng rng(5);
  std::vector<double> chain(static_cast<std::size_t>(state.range(0)));
  double x = 0.0;
  for (auto& v : chain) v = x = 0.9 * x + rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(ess(chain).value);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ess)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);

}  // namespace

// Own main: the distro benchmark_main archive carries LTO bytecode from another compiler.
BENCHMARK_MAIN();

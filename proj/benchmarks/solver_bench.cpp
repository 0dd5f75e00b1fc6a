#include <benchmark/benchmark.h>

#include "frbs/problems.hpp"
#include "frbs/solvers.hpp"

namespace {

void run_steps(benchmark::State& state, const frbs::Problem& problem, frbs::SolverConfig cfg) {
  if (cfg.anchor.size() == 0 && problem.default_anchor) cfg.anchor = *problem.default_anchor;
  for (auto _ : state) {
    auto s = frbs::initial_state(cfg, problem.T, problem.w0, problem.w1);
    for (int i = 0; i < 50; ++i) s = frbs::step(s, cfg, problem.T, problem.J);
    benchmark::DoNotOptimize(s.w_curr.data());
  }
  state.SetItemsProcessed(state.iterations() * 50);
}

frbs::SolverConfig with_algorithm(frbs::Algorithm a) {
  frbs::SolverConfig cfg;
  cfg.algorithm = a;
  cfg.theta_bar = 0.04;
  cfg.r_bar = 0.15;
  cfg.delta0 = 1.0 / 101.0;
  cfg.delta1 = 2.0 / 201.0;
  cfg.gamma = 2.0 / 201.0;
  return cfg;
}

void BM_L2Steps(benchmark::State& state) {
  const auto problem = frbs::make_l2_problem(state.range(0), frbs::L2Case::kIIa);
  run_steps(state, problem, with_algorithm(static_cast<frbs::Algorithm>(state.range(1))));
}
BENCHMARK(BM_L2Steps)
    ->ArgsProduct({{64, 1024},
                   {static_cast<int>(frbs::Algorithm::kFrabAdaptive), static_cast<int>(frbs::Algorithm::kFrabInertial),
                    static_cast<int>(frbs::Algorithm::kFrbsmBaseline),
                    static_cast<int>(frbs::Algorithm::kRfbsmBaseline)}});

void BM_DeblurSteps(benchmark::State& state) {
  const auto n = state.range(0);
  const auto model = frbs::gaussian_blur(n, n, 9, 4.0, frbs::Boundary::kZeroPad);
  const auto truth = frbs::synthetic_image(n, n);
  auto problem = frbs::make_deblur_problem(model, frbs::apply_blur(model, truth), 1.0);
  frbs::SolverConfig cfg;
  cfg.delta0 = 0.01;
  cfg.delta1 = 0.3;
  run_steps(state, problem, cfg);
}
BENCHMARK(BM_DeblurSteps)->Arg(32)->Arg(64);

void BM_BlurApply(benchmark::State& state) {
  const auto n = state.range(0);
  const auto model = frbs::gaussian_blur(n, n, 9, 4.0, frbs::Boundary::kZeroPad);
  const auto img = frbs::synthetic_image(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(frbs::apply_blur(model, img).data());
}
BENCHMARK(BM_BlurApply)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "qhmc/diagnostics.hpp"
#include "qhmc/integrate.hpp"
#include "qhmc/targets.hpp"

namespace {

void bm_leapfrog(benchmark::State& state) {
  qhmc::Target target = qhmc::double_well_target();
  qhmc::MassMatrix m = qhmc::MassMatrix::scalar(1.0);
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 1.0);
  Eigen::VectorXd q0 = Eigen::VectorXd::Constant(1, 0.5);
  for (auto _ : state) {
    auto res = qhmc::leapfrog_path(target, x0, q0, m, 0.03, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(res.x);
  }
}
BENCHMARK(bm_leapfrog)->Arg(5)->Arg(50);

void bm_mass_sampling(benchmark::State& state) {
  qhmc::MassSpec spec = qhmc::MassSpec::scalar_log_normal(0.0, 1.0);
  qhmc::Rng rng(7);
  for (auto _ : state) {
    auto m = spec.sample(1, rng);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(bm_mass_sampling);

void bm_wasserstein1(benchmark::State& state) {
  qhmc::Rng rng(11);
  std::vector<double> a, b;
  for (int i = 0; i < state.range(0); ++i) {
    a.push_back(rng.normal());
    b.push_back(rng.normal());
  }
  for (auto _ : state) {
    double w = qhmc::wasserstein1(a, b);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(bm_wasserstein1)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();

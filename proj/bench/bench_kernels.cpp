// Serial vs OpenMP throughput of the hot loops.

#include "qminimax/kernels.hpp"
#include "qminimax/risk.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace qmm;

struct RiskFixture {
  std::shared_ptr<const OutcomeEnumeration> outcomes;
  std::vector<double> estimates;
  std::vector<double> states;
  double prefactor;

  explicit RiskFixture(int n) {
    const SymmetricPOM pom = build_pom(PomKind::tetrahedron());
    outcomes = shared_enumeration(n, 4);
    estimates = kernels::tabulate_estimates_serial(
        make_estimator(EstimatorSpec::quantum_minimax(0.0)), *outcomes);
    for (const Vec3& e : fibonacci_sphere(64)) {
      const ProbVector p = qubit_probs(0.7 * e, pom);
      states.insert(states.end(), p.vec().begin(), p.vec().end());
    }
    prefactor = pom.error_prefactor();
  }
};

void BM_RiskBatchSerial(benchmark::State& st) {
  const RiskFixture f(int(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        kernels::risk_batch_serial(*f.outcomes, f.estimates, f.states, f.prefactor));
  }
}

void BM_RiskBatchOmp(benchmark::State& st) {
  const RiskFixture f(int(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        kernels::risk_batch_omp(*f.outcomes, f.estimates, f.states, f.prefactor));
  }
}

const std::vector<double> kTrueP{0.4, 0.3, 0.2, 0.1};

void BM_TrialErrorsSerial(benchmark::State& st) {
  const Estimator est = make_estimator(EstimatorSpec::quantum_minimax(0.0));
  for (auto _ : st) {
    benchmark::DoNotOptimize(kernels::trial_errors_serial(est, kTrueP, 20, st.range(0), 42, 6.0));
  }
}

void BM_TrialErrorsOmp(benchmark::State& st) {
  const Estimator est = make_estimator(EstimatorSpec::quantum_minimax(0.0));
  for (auto _ : st) {
    benchmark::DoNotOptimize(kernels::trial_errors_omp(est, kTrueP, 20, st.range(0), 42, 6.0));
  }
}

const std::vector<double> kAlpha{3.5, 1.5, 0.5, 2.5};

void BM_MeanMcSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(kernels::mean_mc_serial(kAlpha, st.range(0), 1, true));
}

void BM_MeanMcOmp(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(kernels::mean_mc_omp(kAlpha, st.range(0), 1, true));
}

}  // namespace

BENCHMARK(BM_RiskBatchSerial)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RiskBatchOmp)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialErrorsSerial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialErrorsOmp)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeanMcSerial)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeanMcOmp)->Arg(1 << 18)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

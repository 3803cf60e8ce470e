#include "qminimax/simulator.hpp"

#include "qminimax/errors.hpp"
#include "qminimax/kernels.hpp"

#include <cmath>

namespace qmm {

void SimConfig::validate() const {
  if (trials < 1) throw InvalidArgument("simulation needs at least one trial");
  if (total < 1) throw InvalidArgument("simulation needs N >= 1");
}

CountVector sample_counts(const ProbVector& true_p, int n, std::uint64_t seed) {
  if (n < 1) throw EmptyDataError();
  CounterRng rng(seed, 0);
  return CountVector(kernels::draw_counts(rng, true_p.values(), n));
}

namespace {

EmpiricalRisk summarize(const std::vector<double>& errors) {
  EmpiricalRisk r;
  r.trials = static_cast<std::int64_t>(errors.size());
  const double m = double(errors.size());
  const double mean = kernels::pairwise_sum(errors) / m;
  std::vector<double> dev(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) {
    dev[i] = (errors[i] - mean) * (errors[i] - mean);
  }
  const double var = m > 1 ? kernels::pairwise_sum(dev) / (m - 1) : 0.0;
  r.mean = mean;
  r.std_err = std::sqrt(var / m);
  return r;
}

void check(const ProbVector& true_p, const SymmetricPOM& pom, const SimConfig& config) {
  config.validate();
  if (true_p.size() != pom.num_outcomes) {
    throw InvalidArgument("true state has the wrong number of outcomes");
  }
}

}  // namespace

EmpiricalRisk empirical_risk(const Estimator& estimator, const ProbVector& true_p,
                             const SymmetricPOM& pom, const SimConfig& config) {
  check(true_p, pom, config);
  return summarize(kernels::trial_errors_omp(estimator, true_p.values(), config.total,
                                             config.trials, config.seed, pom.error_prefactor()));
}

EmpiricalRisk empirical_risk(const EstimatorSpec& spec, const ProbVector& true_p,
                             const SymmetricPOM& pom, const SimConfig& config) {
  return empirical_risk(make_estimator(spec), true_p, pom, config);
}

EmpiricalRisk empirical_risk_serial(const Estimator& estimator, const ProbVector& true_p,
                                    const SymmetricPOM& pom, const SimConfig& config) {
  check(true_p, pom, config);
  return summarize(kernels::trial_errors_serial(estimator, true_p.values(), config.total,
                                                config.trials, config.seed,
                                                pom.error_prefactor()));
}

}  // namespace qmm

#pragma once

// Monte Carlo tomography experiments, used to cross-check the exact engine.

#include "qminimax/estimators.hpp"

#include <cstdint>

namespace qmm {

struct SimConfig {
  std::uint64_t seed = 42;
  std::int64_t trials = 100000;
  int total = 10;

  void validate() const;
};

/// N independent draws from `true_p`, from the random stream (seed, 0).
CountVector sample_counts(const ProbVector& true_p, int n, std::uint64_t seed);

struct EmpiricalRisk {
  double mean = 0.0;
  double std_err = 0.0;
  std::int64_t trials = 0;
};

EmpiricalRisk empirical_risk(const Estimator& estimator, const ProbVector& true_p,
                             const SymmetricPOM& pom, const SimConfig& config);
EmpiricalRisk empirical_risk(const EstimatorSpec& spec, const ProbVector& true_p,
                             const SymmetricPOM& pom, const SimConfig& config);
/// Single-threaded reference; identical output.
EmpiricalRisk empirical_risk_serial(const Estimator& estimator, const ProbVector& true_p,
                                    const SymmetricPOM& pom, const SimConfig& config);

}  // namespace qmm

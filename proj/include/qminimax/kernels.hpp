#pragma once

// Data-parallel hot loops. Every OpenMP kernel has a serial twin that performs
// the same arithmetic in the same order; tests hold them to bitwise agreement
// and bench/ compares their throughput.

#include "qminimax/enumeration.hpp"
#include "qminimax/estimators.hpp"
#include "qminimax/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qmm::kernels {

/// Terms of the risk sum are accumulated in fixed blocks of this many
/// outcomes; block partials are then combined pairwise.
inline constexpr std::size_t kRiskBlock = 4096;

/// Likelihood terms below exp(kLogLikelihoodCutoff) are dropped. Each
/// likelihood is at most one, so the dropped mass is below 10^7 * e^-50.
inline constexpr double kLogLikelihoodCutoff = -50.0;

/// Pairwise (cascade) summation in a fixed order.
double pairwise_sum(std::span<const double> values);

/// sum_D L(D|p) * prefactor * |estimate(D) - p|^2, serially.
double risk_at(const OutcomeEnumeration& outcomes, std::span<const double> estimates,
               std::span<const double> p, double prefactor);
/// Same sum with blocks evaluated in parallel. Bitwise equal to risk_at.
double risk_at_omp(const OutcomeEnumeration& outcomes, std::span<const double> estimates,
                   std::span<const double> p, double prefactor);

/// Estimates for every count vector of the enumeration, row-major.
std::vector<double> tabulate_estimates_serial(const Estimator& estimator,
                                              const OutcomeEnumeration& outcomes);
std::vector<double> tabulate_estimates_omp(const Estimator& estimator,
                                           const OutcomeEnumeration& outcomes);

/// Same table for an estimator that commutes with relabelling the outcomes:
/// only count vectors sorted in nonincreasing order are evaluated and the
/// rest are filled in by permutation.
std::vector<double> tabulate_estimates_symmetric(const Estimator& estimator,
                                                 const OutcomeEnumeration& outcomes);

/// Risk at many states (row-major, K per state).
std::vector<double> risk_batch_serial(const OutcomeEnumeration& outcomes,
                                      std::span<const double> estimates,
                                      std::span<const double> states, double prefactor);
std::vector<double> risk_batch_omp(const OutcomeEnumeration& outcomes,
                                   std::span<const double> estimates,
                                   std::span<const double> states, double prefactor);

/// N categorical draws from `p`, tallied per outcome. Outcomes with zero
/// probability are never drawn.
std::vector<int> draw_counts(CounterRng& rng, std::span<const double> p, int n);

/// Per-trial squared errors of a simulated experiment; trial t uses the
/// random stream (seed, t).
std::vector<double> trial_errors_serial(const Estimator& estimator, std::span<const double> p,
                                        int n, std::int64_t trials, std::uint64_t seed,
                                        double prefactor);
std::vector<double> trial_errors_omp(const Estimator& estimator, std::span<const double> p,
                                     int n, std::int64_t trials, std::uint64_t seed,
                                     double prefactor);

struct MeanMcSums {
  std::int64_t drawn = 0;
  std::int64_t accepted = 0;
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

/// Dirichlet(alpha) draws in chunks of kMeanMcChunk; chunk c uses the stream
/// (seed, c). With `indicator`, draws with sum p^2 > 1/3 are rejected.
MeanMcSums mean_mc_serial(std::span<const double> alpha, std::int64_t samples,
                          std::uint64_t seed, bool indicator);
MeanMcSums mean_mc_omp(std::span<const double> alpha, std::int64_t samples,
                       std::uint64_t seed, bool indicator);

}  // namespace qmm::kernels

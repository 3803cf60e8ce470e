#pragma once

// Point estimators: pure maps from detector counts to outcome probabilities.
// The quantum estimators assume counts from the qubit tetrahedron measurement;
// their output does not depend on the tetrahedron's orientation.

#include "qminimax/state.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qmm {

class CountVector {
 public:
  /// Throws InvalidArgument for negative entries or K < 2, EmptyDataError if
  /// all counts are zero.
  explicit CountVector(std::vector<int> counts);

  int size() const { return static_cast<int>(n_.size()); }
  int total() const { return total_; }
  int operator[](int k) const { return n_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& counts() const { return n_; }
  double freq(int k) const { return double((*this)[k]) / total_; }
  std::vector<double> freqs() const;
  double freq_sum_of_squares() const;

 private:
  std::vector<int> n_;
  int total_ = 0;
};

/// a_N = 1/(1+sqrt N), b_N = 1/(1+1/sqrt N).
struct MinimaxCoefficients {
  double a = 0.0;
  double b = 0.0;

  static MinimaxCoefficients for_total(int n);
  /// b_N = sqrt(1 - 4 eps), a_N = 1 - b_N.
  static MinimaxCoefficients purity_matched(double epsilon);
};

enum class EstimatorKind {
  MLClassical,
  AddBeta,
  ClassicalMinimax,
  QuantumAdmix,
  MLQuantumExact,
  MLQuantumEpsilon,
  MeanMC,
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::ClassicalMinimax;
  double beta = 1.0;
  double epsilon = 0.0;
  bool variant_bn = false;
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  bool indicator = false;

  static EstimatorSpec ml_classical() { return {EstimatorKind::MLClassical}; }
  static EstimatorSpec add_beta(double beta);
  static EstimatorSpec classical_minimax() { return {EstimatorKind::ClassicalMinimax}; }
  static EstimatorSpec quantum_minimax(double epsilon, bool variant_bn = false);
  static EstimatorSpec ml_quantum_exact() { return {EstimatorKind::MLQuantumExact}; }
  static EstimatorSpec ml_quantum_epsilon(double epsilon);
  static EstimatorSpec mean_mc(double beta, std::int64_t samples, std::uint64_t seed,
                               bool indicator);

  bool quantum() const;
  /// Throws InvalidArgument when parameters are out of range.
  void validate() const;
  std::string kind_name() const;
  static EstimatorKind parse_kind(const std::string& name);
};

using Estimator = std::function<ProbVector(const CountVector&)>;

Estimator make_estimator(const EstimatorSpec& spec);
ProbVector estimate(const EstimatorSpec& spec, const CountVector& counts);

ProbVector estimate_ml_classical(const CountVector& counts);
ProbVector estimate_add_beta(const CountVector& counts, double beta);
ProbVector estimate_classical_minimax(const CountVector& counts);

struct AdmixResult {
  double lambda = 0.0;
  ProbVector p_hat;
};

/// Purity-targeted admixing for the tetrahedron: lambda is the smallest value
/// bringing sum p^2 down to (1 - eps)/3.
AdmixResult admix_lambda_qubit(const CountVector& counts, double epsilon);
AdmixResult admix_lambda_qubit(const CountVector& counts, double epsilon,
                               const MinimaxCoefficients& coeffs);

/// Spectral admixing for any IC POM: smallest lambda making
/// (1 - lambda) rho0 + lambda/d positive.
AdmixResult admix_physical_general(const ProbVector& p0, const SymmetricPOM& pom);

AdmixResult quantum_minimax_admix(const CountVector& counts, double epsilon, bool variant_bn);
ProbVector estimate_quantum_minimax(const CountVector& counts, double epsilon,
                                    bool variant_bn = false);

struct MlQuantumResult {
  ProbVector p_hat;
  Vec3 bloch = Vec3::Zero();
  bool constrained = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

inline constexpr double kMlGradientTol = 1e-10;
inline constexpr int kMlMaxIterations = 10000;

/// Maximizes sum_k n_k log p_k over Bloch vectors with |s| <= sqrt(1 - 4 eps).
MlQuantumResult ml_quantum_solve(const CountVector& counts, double epsilon);
ProbVector estimate_ml_quantum(const CountVector& counts, double epsilon);

/// Tetrahedron log-likelihood sum_k n_k log((1 + a_k.s)/4); -inf outside the
/// support.
double qubit_log_likelihood(const CountVector& counts, const Vec3& s);

struct MeanMcResult {
  ProbVector p_hat;
  std::vector<double> std_err;
  double acceptance_rate = 1.0;
  std::int64_t accepted = 0;
};

inline constexpr std::int64_t kMeanMcChunk = 65536;

/// Monte Carlo posterior mean under the (prod p_k)^(beta-1) weight, optionally
/// restricted to the qubit physicality region sum p^2 <= 1/3.
MeanMcResult estimate_mean_mc(const CountVector& counts, double beta, std::int64_t samples,
                              std::uint64_t seed, bool indicator);

}  // namespace qmm

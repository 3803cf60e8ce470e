#pragma once

// Exact mean-squared-error risk by enumerating every data set of size N.

#include "qminimax/enumeration.hpp"
#include "qminimax/estimators.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace qmm {

/// Process-wide cache of enumerations keyed by (N, K). Thread-safe.
std::shared_ptr<const OutcomeEnumeration> shared_enumeration(int n, int k);

/// Estimates tabulated once over an enumeration; evaluates the risk at any
/// number of true states.
class RiskEvaluator {
 public:
  RiskEvaluator(const Estimator& estimator, const SymmetricPOM& pom, int n);
  RiskEvaluator(const EstimatorSpec& spec, const SymmetricPOM& pom, int n);

  int total() const { return outcomes_->total; }
  int outcomes() const { return outcomes_->outcomes; }
  double prefactor() const { return prefactor_; }
  const OutcomeEnumeration& enumeration() const { return *outcomes_; }
  const std::vector<double>& estimates() const { return estimates_; }

  double risk(const ProbVector& p) const;
  double risk(std::span<const double> p) const;
  /// Row-major states, K values each.
  std::vector<double> risk_batch(std::span<const double> states) const;

 private:
  std::shared_ptr<const OutcomeEnumeration> outcomes_;
  std::vector<double> estimates_;
  double prefactor_ = 1.0;
};

double risk_exact(const EstimatorSpec& spec, const ProbVector& true_p, const SymmetricPOM& pom,
                  int n);
double risk_exact(const Estimator& estimator, const ProbVector& true_p,
                  const SymmetricPOM& pom, int n);

struct DiscretePrior {
  std::vector<ProbVector> states;
  std::vector<double> weights;

  /// Throws InvalidArgument on size mismatch, negative weights or a weight
  /// sum away from one by more than 1e-12.
  void validate() const;
  static DiscretePrior point(const ProbVector& state);
  static DiscretePrior uniform(std::vector<ProbVector> states);
};

double average_risk(const EstimatorSpec& spec, const DiscretePrior& prior,
                    const SymmetricPOM& pom, int n);
double average_risk(const Estimator& estimator, const DiscretePrior& prior,
                    const SymmetricPOM& pom, int n);

struct GridSpec {
  int radii = 25;
  int directions = 162;
  /// Lattice resolution M for non-qubit POMs (p = m/M); 0 picks the largest M
  /// with at most 4096 lattice points.
  int simplex_resolution = 0;
  bool refine = true;
  bool refine_min = true;
  int refine_iterations = 200;
  double simplex_tolerance = 1e-8;
};

struct RiskPoint {
  ProbVector p;
  std::optional<Vec3> bloch;
  double risk = 0.0;
};

struct RiskSurface {
  std::vector<RiskPoint> grid;
  RiskPoint max;
  RiskPoint min;
};

/// Unit vectors on a Fibonacci spiral.
std::vector<Vec3> fibonacci_sphere(int count);

/// Risk over a state grid with Nelder-Mead refinement of the extreme points.
/// Qubit POMs use a Bloch-ball grid (center plus `radii` shells of
/// `directions` points); other POMs a lattice on the probability simplex.
RiskSurface risk_extrema(const RiskEvaluator& evaluator, const SymmetricPOM& pom,
                         const GridSpec& grid = {});
RiskSurface risk_extrema(const EstimatorSpec& spec, const SymmetricPOM& pom, int n,
                         const GridSpec& grid = {});

/// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);

}  // namespace qmm

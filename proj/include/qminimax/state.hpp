#pragma once

// Probability vectors, density operators and Bloch vectors, and the maps
// between them induced by a POM.

#include "qminimax/pom.hpp"

#include <span>
#include <vector>

namespace qmm {

inline constexpr double kProbTol = 1e-12;
inline constexpr double kEigenTol = 1e-10;

/// K outcome probabilities. Entries down to -kProbTol are accepted and clamped
/// to zero; the sum must be one within kProbTol.
class ProbVector {
 public:
  ProbVector() = default;
  explicit ProbVector(std::vector<double> probs);

  static ProbVector uniform(int k);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int k) const { return p_[static_cast<std::size_t>(k)]; }
  std::span<const double> values() const { return p_; }
  const std::vector<double>& vec() const { return p_; }
  double sum_of_squares() const;

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  std::vector<double> p_;
};

class BlochVector {
 public:
  BlochVector() : s_(Vec3::Zero()) {}
  explicit BlochVector(const Vec3& s) : s_(s) {}
  BlochVector(double x, double y, double z) : s_(x, y, z) {}

  const Vec3& vec() const { return s_; }
  double norm() const { return s_.norm(); }
  bool physical() const { return s_.norm() <= 1.0 + kProbTol; }

 private:
  Vec3 s_;
};

/// Unit-trace Hermitian operator; not necessarily positive.
class DensityOperator {
 public:
  /// Throws InvalidArgument when the trace differs from one by more than 1e-12.
  explicit DensityOperator(HermitianOperator op);

  static DensityOperator maximally_mixed(int dim);
  static DensityOperator from_bloch(const BlochVector& s);

  int dim() const { return op_.dim(); }
  const HermitianOperator& op() const { return op_; }
  double min_eigenvalue() const { return op_.min_eigenvalue(); }
  bool physical() const { return min_eigenvalue() >= -kEigenTol; }
  double purity() const { return trace_product(op_, op_); }
  /// Only for dim 2.
  BlochVector bloch() const;

 private:
  HermitianOperator op_;
};

ProbVector born_probs(const DensityOperator& state, const SymmetricPOM& pom);

/// sum_k p_k Lambda_k. Throws NotInformationallyCompleteError for non-IC POMs.
DensityOperator reconstruct_state(const ProbVector& p, const SymmetricPOM& pom);

struct PhysicalityResult {
  bool physical = false;
  double sum_sq = 0.0;
  double min_eig = 0.0;
};

PhysicalityResult check_physical(const ProbVector& p, const SymmetricPOM& pom);

/// (K-1)K/((d-1)d) * sum_k (p_hat_k - p_k)^2.
double squared_error(const ProbVector& p_hat, const ProbVector& p, const SymmetricPOM& pom);
double squared_error(std::span<const double> p_hat, std::span<const double> p, double prefactor);

/// Outcome probabilities of a qubit state for a POM with Bloch directions:
/// p_k = (1 + e_k . s) / K.
ProbVector qubit_probs(const Vec3& s, const SymmetricPOM& pom);

}  // namespace qmm

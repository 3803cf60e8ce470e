#pragma once

// Symmetric probability-operator measurements (S-POMs) and their dual frames.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace qmm {

inline constexpr double kGeometryTol = 1e-12;
inline constexpr int kMaxDim = 8;

using CMatrix = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Dense d x d complex matrix that is Hermitian to within kGeometryTol.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  /// Throws InvalidArgument if `m` is not square, too large, or not Hermitian.
  explicit HermitianOperator(CMatrix m);

  static HermitianOperator identity(int dim);
  /// (1 + s.sigma) * scale for a qubit.
  static HermitianOperator qubit(double scale, const Vec3& s);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

  double trace() const { return m_.trace().real(); }
  /// Eigenvalues in ascending order.
  Eigen::VectorXd eigenvalues() const;
  double min_eigenvalue() const;

  friend double trace_product(const HermitianOperator& a, const HermitianOperator& b);

 private:
  CMatrix m_;
};

/// tr{A B} for Hermitian A, B (always real).
double trace_product(const HermitianOperator& a, const HermitianOperator& b);

enum class PomFamily { VonNeumann, Trine, Tetrahedron, ClassicalDie };

struct PomKind {
  PomFamily family = PomFamily::Tetrahedron;
  int die_sides = 0;  // only for ClassicalDie

  static PomKind von_neumann() { return {PomFamily::VonNeumann, 0}; }
  static PomKind trine() { return {PomFamily::Trine, 0}; }
  static PomKind tetrahedron() { return {PomFamily::Tetrahedron, 0}; }
  /// Throws InvalidArgument for sides < 2.
  static PomKind classical_die(int sides);

  int num_outcomes() const;
  bool is_qubit() const { return family != PomFamily::ClassicalDie; }
  std::string name() const;
  static PomKind parse(const std::string& name, int die_sides = 0);
};

struct SymmetricPOM {
  PomKind kind;
  int dim = 0;
  int num_outcomes = 0;
  double symmetry = 0.0;  // w
  std::vector<HermitianOperator> outcomes;
  std::vector<HermitianOperator> duals;
  std::optional<std::vector<Vec3>> directions;

  bool informationally_complete() const {
    return num_outcomes == dim * dim || kind.family == PomFamily::ClassicalDie;
  }
  /// (K-1)K / ((d-1)d): converts sum of squared probability differences
  /// into the Hilbert-Schmidt squared error of the reconstructed operators.
  double error_prefactor() const;
};

/// The reference leg directions for the qubit kinds, as columns of a 3 x K
/// matrix.
std::vector<Vec3> reference_directions(PomFamily family);

/// Builds a POM. For qubit kinds the reference directions are rotated by
/// `orientation`, which must be a proper rotation to 1e-10.
SymmetricPOM build_pom(const PomKind& kind, const Mat3& orientation = Mat3::Identity());

/// Standard-form dual frame. Throws DegenerateFrameError when wK - 1 vanishes.
std::vector<HermitianOperator> dual_frame(const SymmetricPOM& pom);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double max_residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  int pyramid_rank = 0;

  bool all_passed() const;
  double max_residual() const;
  const ValidationCheck* find(const std::string& name) const;
};

/// Runs every geometric identity on `pom`. Failures are recorded, never thrown.
ValidationReport validate_spom(const SymmetricPOM& pom);

}  // namespace qmm

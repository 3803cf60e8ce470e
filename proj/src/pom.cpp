#include "qminimax/pom.hpp"

#include "qminimax/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace qmm {

namespace {

using cd = std::complex<double>;

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

HermitianOperator::HermitianOperator(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw InvalidArgument("Hermitian operator must be a non-empty square matrix");
  }
  if (m_.rows() > kMaxDim) {
    throw InvalidArgument("operator dimension exceeds " + std::to_string(kMaxDim));
  }
  const double asym = max_abs(m_ - m_.adjoint());
  if (asym > kGeometryTol) {
    std::ostringstream os;
    os << "operator is not Hermitian (residual " << asym << ")";
    throw InvalidArgument(os.str());
  }
  // Symmetrize so the eigensolver sees an exactly Hermitian matrix.
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(CMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::qubit(double scale, const Vec3& s) {
  CMatrix m(2, 2);
  m(0, 0) = cd(scale * (1.0 + s.z()), 0.0);
  m(1, 1) = cd(scale * (1.0 - s.z()), 0.0);
  m(0, 1) = cd(scale * s.x(), -scale * s.y());
  m(1, 0) = cd(scale * s.x(), scale * s.y());
  return HermitianOperator(std::move(m));
}

Eigen::VectorXd HermitianOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double HermitianOperator::min_eigenvalue() const { return eigenvalues()(0); }

double trace_product(const HermitianOperator& a, const HermitianOperator& b) {
  // tr{AB} = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
  return (a.m_.array() * b.m_.array().conjugate()).sum().real();
}

PomKind PomKind::classical_die(int sides) {
  if (sides < 2) throw InvalidArgument("classical die needs at least 2 sides");
  return {PomFamily::ClassicalDie, sides};
}

int PomKind::num_outcomes() const {
  switch (family) {
    case PomFamily::VonNeumann: return 2;
    case PomFamily::Trine: return 3;
    case PomFamily::Tetrahedron: return 4;
    case PomFamily::ClassicalDie: return die_sides;
  }
  return 0;
}

std::string PomKind::name() const {
  switch (family) {
    case PomFamily::VonNeumann: return "von_neumann";
    case PomFamily::Trine: return "trine";
    case PomFamily::Tetrahedron: return "tetrahedron";
    case PomFamily::ClassicalDie: return "die";
  }
  return "unknown";
}

PomKind PomKind::parse(const std::string& name, int die_sides) {
  if (name == "von_neumann" || name == "vonneumann") return von_neumann();
  if (name == "trine") return trine();
  if (name == "tetrahedron" || name == "tetra") return tetrahedron();
  if (name == "die" || name == "classical_die") return classical_die(die_sides);
  if (name == "coin") return classical_die(2);
  throw InvalidArgument("unknown POM kind '" + name + "'");
}

double SymmetricPOM::error_prefactor() const {
  const double k = num_outcomes;
  const double d = dim;
  return (k - 1.0) * k / ((d - 1.0) * d);
}

std::vector<Vec3> reference_directions(PomFamily family) {
  switch (family) {
    case PomFamily::VonNeumann:
      return {Vec3(0, 0, 1), Vec3(0, 0, -1)};
    case PomFamily::Trine: {
      const double c = 1.0 / std::sqrt(6.0);
      return {c * Vec3(2, -1, -1), c * Vec3(-1, 2, -1), c * Vec3(-1, -1, 2)};
    }
    case PomFamily::Tetrahedron: {
      const double c = 1.0 / std::sqrt(3.0);
      return {c * Vec3(1, -1, -1), c * Vec3(-1, 1, -1), c * Vec3(-1, -1, 1),
              c * Vec3(1, 1, 1)};
    }
    case PomFamily::ClassicalDie:
      break;
  }
  throw InvalidArgument("classical die has no Bloch directions");
}

SymmetricPOM build_pom(const PomKind& kind, const Mat3& orientation) {
  SymmetricPOM pom;
  pom.kind = kind;
  pom.num_outcomes = kind.num_outcomes();
  if (pom.num_outcomes < 2) throw InvalidArgument("a POM needs at least 2 outcomes");

  if (kind.family == PomFamily::ClassicalDie) {
    const int k = pom.num_outcomes;
    if (k > kMaxDim) throw InvalidArgument("classical die supports at most 8 sides");
    pom.dim = k;
    pom.symmetry = 1.0;
    for (int i = 0; i < k; ++i) {
      CMatrix m = CMatrix::Zero(k, k);
      m(i, i) = 1.0;
      pom.outcomes.emplace_back(std::move(m));
    }
  } else {
    const double orth = (orientation.transpose() * orientation - Mat3::Identity())
                            .cwiseAbs()
                            .maxCoeff();
    if (orth > 1e-10 || std::abs(orientation.determinant() - 1.0) > 1e-10) {
      throw InvalidArgument("orientation must be a proper rotation matrix");
    }
    const int k = pom.num_outcomes;
    pom.dim = 2;
    pom.symmetry = 2.0 / k;  // rank-1 outcomes: w = d / K
    std::vector<Vec3> dirs;
    for (const Vec3& e : reference_directions(kind.family)) {
      dirs.push_back(orientation * e);
    }
    for (const Vec3& e : dirs) {
      pom.outcomes.push_back(HermitianOperator::qubit(1.0 / k, e));
    }
    pom.directions = std::move(dirs);
  }
  pom.duals = dual_frame(pom);
  return pom;
}

std::vector<HermitianOperator> dual_frame(const SymmetricPOM& pom) {
  const double k = pom.num_outcomes;
  const double d = pom.dim;
  const double wk1 = pom.symmetry * k - 1.0;
  if (wk1 <= 1e-12) {
    throw DegenerateFrameError("POM outcomes are multiples of the identity (wK - 1 = 0)");
  }
  const double scale = (k - 1.0) * k / (wk1 * d);
  const CMatrix id = CMatrix::Identity(pom.dim, pom.dim);
  std::vector<HermitianOperator> duals;
  duals.reserve(pom.outcomes.size());
  for (const auto& pi : pom.outcomes) {
    duals.emplace_back(id / d + scale * (pi.matrix() - id / k));
  }
  return duals;
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

double ValidationReport::max_residual() const {
  double r = 0.0;
  for (const auto& c : checks) r = std::max(r, c.max_residual);
  return r;
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ValidationReport validate_spom(const SymmetricPOM& pom) {
  ValidationReport report;
  const int kk = static_cast<int>(pom.outcomes.size());
  const double k = kk;
  const double d = pom.dim;
  const double w = pom.symmetry;
  const CMatrix id = CMatrix::Identity(pom.dim, pom.dim);
  auto add = [&](std::string name, double residual, double tol, std::string detail = {}) {
    report.checks.push_back({std::move(name), residual <= tol, residual, std::move(detail)});
  };

  if (kk != pom.num_outcomes || kk < 2) {
    add("outcome_count", 1.0, 0.0, "outcome list does not match K");
    return report;
  }

  double neg = 0.0;
  for (const auto& pi : pom.outcomes) neg = std::max(neg, -pi.min_eigenvalue());
  add("positivity", std::max(neg, 0.0), kGeometryTol);

  CMatrix sum = CMatrix::Zero(pom.dim, pom.dim);
  for (const auto& pi : pom.outcomes) sum += pi.matrix();
  add("completeness", max_abs(sum - id), kGeometryTol);

  {
    std::ostringstream detail;
    detail << "w = " << w;
    const bool in_range = w >= 1.0 / k - kGeometryTol && w <= 1.0 + kGeometryTol;
    const double residual = in_range ? 0.0 : std::max(1.0 / k - w, w - 1.0);
    add("symmetry_bounds", residual, kGeometryTol, detail.str());
  }

  double gram = 0.0;
  for (int i = 0; i < kk; ++i) {
    gram = std::max(gram, std::abs(pom.outcomes[i].trace() - d / k));
    for (int j = 0; j < kk; ++j) {
      const double expected =
          (d / k) * (i == j ? w : (1.0 - w) / (k - 1.0));
      gram = std::max(gram, std::abs(trace_product(pom.outcomes[i], pom.outcomes[j]) - expected));
    }
  }
  add("gram", gram, kGeometryTol);

  if (static_cast<int>(pom.duals.size()) == kk) {
    double dual = 0.0;
    for (int i = 0; i < kk; ++i) {
      for (int j = 0; j < kk; ++j) {
        const double expected = i == j ? 1.0 : 0.0;
        dual = std::max(dual, std::abs(trace_product(pom.outcomes[i], pom.duals[j]) - expected));
      }
    }
    add("duality", dual, kGeometryTol);
  } else {
    add("duality", 1.0, kGeometryTol, "dual frame missing");
  }

  // Pyramid: the K traceless vectors Pi_k - 1/K span a (K-1)-dimensional space.
  {
    Eigen::MatrixXd g(kk, kk);
    for (int i = 0; i < kk; ++i) {
      for (int j = 0; j < kk; ++j) {
        g(i, j) = (pom.outcomes[i].matrix() - id / k)
                      .cwiseProduct((pom.outcomes[j].matrix() - id / k).conjugate())
                      .sum()
                      .real();
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double top = std::max(ev.maxCoeff(), 1e-300);
    int rank = 0;
    for (int i = 0; i < kk; ++i) {
      if (ev(i) > 1e-9 * top) ++rank;
    }

    // Reference representation of the same pyramid with the stored w.
    const double c = std::sqrt(std::max(w * k - 1.0, 0.0) * d / ((k - 1.0) * k * k * k));
    Eigen::MatrixXd ref = Eigen::MatrixXd::Constant(kk, kk, -c);
    ref.diagonal().setConstant(c * (k - 1.0));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ref);
    const Eigen::VectorXd sv = svd.singularValues();
    int ref_rank = 0;
    for (int i = 0; i < kk; ++i) {
      if (sv(i) > 1e-9 * std::max(sv(0), 1e-300)) ++ref_rank;
    }
    const double gram_mismatch = (ref.transpose() * ref - g).cwiseAbs().maxCoeff();
    report.pyramid_rank = rank;
    std::ostringstream detail;
    detail << "rank " << rank << " (reference " << ref_rank << "), expected " << kk - 1;
    const double residual = std::max(std::abs(ev(0)), gram_mismatch);
    report.checks.push_back({"pyramid_rank",
                             rank == kk - 1 && ref_rank == kk - 1 && residual <= kGeometryTol,
                             residual, detail.str()});
  }

  if (pom.directions) {
    const auto& e = *pom.directions;
    double res = 0.0;
    if (static_cast<int>(e.size()) != kk) {
      res = 1.0;
    } else {
      Vec3 total = Vec3::Zero();
      for (const auto& v : e) total += v;
      res = total.cwiseAbs().maxCoeff();
      for (int i = 0; i < kk; ++i) {
        for (int j = 0; j < kk; ++j) {
          const double expected = i == j ? 1.0 : -1.0 / (k - 1.0);
          res = std::max(res, std::abs(e[i].dot(e[j]) - expected));
        }
      }
    }
    add("directions", res, kGeometryTol);
  }
  return report;
}

}  // namespace qmm

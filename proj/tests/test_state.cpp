#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qminimax/errors.hpp"
#include "qminimax/state.hpp"

#include <cmath>
#include <random>

using namespace qmm;

namespace {

Vec3 random_ball(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  Vec3 v(g(rng), g(rng), g(rng));
  return v.normalized() * std::cbrt(u(rng));
}

// rho = (1 + s.sigma)/2 written out by hand.
CMatrix bloch_matrix(const Vec3& s) {
  CMatrix m(2, 2);
  m(0, 0) = 0.5 * (1.0 + s.z());
  m(1, 1) = 0.5 * (1.0 - s.z());
  m(0, 1) = std::complex<double>(0.5 * s.x(), -0.5 * s.y());
  m(1, 0) = std::complex<double>(0.5 * s.x(), 0.5 * s.y());
  return m;
}

const SymmetricPOM& tetra() {
  static const SymmetricPOM pom = build_pom(PomKind::tetrahedron());
  return pom;
}

}  // namespace

TEST_CASE("ProbVector validation and clamping") {
  CHECK_THROWS_AS(ProbVector({0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(ProbVector({1.1, -0.1}), InvalidArgument);
  const ProbVector p({1.0 + 5e-13, -5e-13});
  CHECK(p[1] == 0.0);
  CHECK(ProbVector::uniform(4).sum_of_squares() == doctest::Approx(0.25));
}

TEST_CASE("Born rule examples") {
  const ProbVector mixed = born_probs(DensityOperator::maximally_mixed(2), tetra());
  for (int k = 0; k < 4; ++k) CHECK(std::abs(mixed[k] - 0.25) < 1e-15);

  const Vec3 a1 = (*tetra().directions)[0];
  const ProbVector pure = born_probs(DensityOperator::from_bloch(BlochVector(a1)), tetra());
  CHECK(std::abs(pure[0] - 0.5) < 1e-15);
  for (int k = 1; k < 4; ++k) CHECK(std::abs(pure[k] - 1.0 / 6.0) < 1e-15);

  const SymmetricPOM die = build_pom(PomKind::classical_die(3));
  CMatrix diag = CMatrix::Zero(3, 3);
  diag(0, 0) = 0.2;
  diag(1, 1) = 0.5;
  diag(2, 2) = 0.3;
  const ProbVector p = born_probs(DensityOperator(HermitianOperator(diag)), die);
  CHECK(p[0] == doctest::Approx(0.2));
  CHECK(p[1] == doctest::Approx(0.5));
  CHECK(p[2] == doctest::Approx(0.3));

  CHECK_THROWS_AS(born_probs(DensityOperator::maximally_mixed(3), tetra()), InvalidArgument);
}

TEST_CASE("reconstruction examples") {
  const DensityOperator half = reconstruct_state(ProbVector::uniform(4), tetra());
  CHECK((half.op().matrix() - CMatrix::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff() < 1e-15);

  const DensityOperator pure =
      reconstruct_state(ProbVector({0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6}), tetra());
  CHECK((pure.bloch().vec() - (*tetra().directions)[0]).norm() < 1e-14);
  CHECK(pure.purity() == doctest::Approx(1.0));

  const DensityOperator vertex = reconstruct_state(ProbVector({1, 0, 0, 0}), tetra());
  const Eigen::VectorXd ev = vertex.op().eigenvalues();
  CHECK(std::abs(ev[0] + 1.0) < 1e-14);
  CHECK(std::abs(ev[1] - 2.0) < 1e-14);

  CHECK_THROWS_AS(reconstruct_state(ProbVector({0.5, 0.5, 0.0}), build_pom(PomKind::trine())),
                  NotInformationallyCompleteError);
}

TEST_CASE("physicality checks") {
  const auto vertex = check_physical(ProbVector({1, 0, 0, 0}), tetra());
  CHECK_FALSE(vertex.physical);
  CHECK(vertex.sum_sq == doctest::Approx(1.0));
  CHECK(check_physical(ProbVector({1, 0, 0, 0}), build_pom(PomKind::classical_die(4))).physical);
  const auto mixed = check_physical(ProbVector::uniform(4), tetra());
  CHECK(mixed.physical);
  CHECK(mixed.sum_sq == doctest::Approx(0.25));
  CHECK_THROWS_AS(DensityOperator(HermitianOperator(CMatrix::Identity(2, 2))), InvalidArgument);
}

TEST_CASE("squared error examples") {
  const ProbVector a({0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6});
  CHECK(squared_error(a, a, tetra()) == 0.0);
  CHECK(squared_error(a, ProbVector::uniform(4), tetra()) == doctest::Approx(0.5).epsilon(1e-14));
  const SymmetricPOM coin = build_pom(PomKind::classical_die(2));
  CHECK(squared_error(ProbVector({1, 0}), ProbVector({0.5, 0.5}), coin) ==
        doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("random-state identities") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 s = random_ball(rng);
    const DensityOperator rho(HermitianOperator(bloch_matrix(s)));
    const ProbVector p = born_probs(rho, tetra());
    // Round trip.
    const DensityOperator back = reconstruct_state(p, tetra());
    CHECK((back.op().matrix() - rho.op().matrix()).cwiseAbs().maxCoeff() < 1e-12);
    // Purity identity and its bounds.
    CHECK(std::abs(p.sum_of_squares() - (0.25 + s.squaredNorm() / 12.0)) < 1e-12);
    CHECK(p.sum_of_squares() >= 0.25 - 1e-15);
    CHECK(p.sum_of_squares() <= 1.0 / 3.0 + 1e-12);
    CHECK(check_physical(p, tetra()).physical);
    // qubit_probs agrees with the Born rule.
    const ProbVector q = qubit_probs(s, tetra());
    for (int k = 0; k < 4; ++k) CHECK(std::abs(q[k] - p[k]) < 1e-15);
  }
}

TEST_CASE("squared error equals tr (rho_hat - rho)^2") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 s = random_ball(rng);
    const Vec3 t = 3.0 * random_ball(rng);  // estimates may be unphysical
    const ProbVector p = qubit_probs(s, tetra());
    std::vector<double> q(4);
    for (int k = 0; k < 4; ++k) q[k] = 0.25 * (1 + (*tetra().directions)[k].dot(t));
    const CMatrix diff = bloch_matrix(t) - bloch_matrix(s);
    const double direct = (diff * diff).trace().real();
    CHECK(std::abs(squared_error(q, p.values(), tetra().error_prefactor()) - direct) < 1e-12);
    if (t.norm() <= 1.0) CHECK(std::abs(squared_error(ProbVector(q), p, tetra()) - direct) < 1e-12);
  }
}

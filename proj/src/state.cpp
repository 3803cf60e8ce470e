#include "qminimax/state.hpp"

#include "qminimax/errors.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace qmm {

namespace {

HermitianOperator combine_duals(std::span<const double> p, const SymmetricPOM& pom) {
  CMatrix m = CMatrix::Zero(pom.dim, pom.dim);
  for (int k = 0; k < pom.num_outcomes; ++k) {
    m += p[static_cast<std::size_t>(k)] * pom.duals[static_cast<std::size_t>(k)].matrix();
  }
  return HermitianOperator(std::move(m));
}

void require_size(const ProbVector& p, const SymmetricPOM& pom) {
  if (p.size() != pom.num_outcomes) {
    throw InvalidArgument("probability vector length " + std::to_string(p.size()) +
                          " does not match K = " + std::to_string(pom.num_outcomes));
  }
}

}  // namespace

ProbVector::ProbVector(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.size() < 2) throw InvalidArgument("probability vector needs at least 2 entries");
  double sum = 0.0;
  for (double& v : p_) {
    if (!std::isfinite(v) || v < -kProbTol) {
      std::ostringstream os;
      os << "invalid probability entry " << v;
      throw InvalidArgument(os.str());
    }
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbTol) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << sum << ", not 1";
    throw InvalidArgument(os.str());
  }
}

ProbVector ProbVector::uniform(int k) {
  return ProbVector(std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
}

double ProbVector::sum_of_squares() const {
  return std::inner_product(p_.begin(), p_.end(), p_.begin(), 0.0);
}

DensityOperator::DensityOperator(HermitianOperator op) : op_(std::move(op)) {
  if (std::abs(op_.trace() - 1.0) > kProbTol) {
    throw InvalidArgument("density operator must have unit trace");
  }
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  return DensityOperator(HermitianOperator(CMatrix::Identity(dim, dim) / double(dim)));
}

DensityOperator DensityOperator::from_bloch(const BlochVector& s) {
  return DensityOperator(HermitianOperator::qubit(0.5, s.vec()));
}

BlochVector DensityOperator::bloch() const {
  if (dim() != 2) throw InvalidArgument("Bloch vectors exist only for qubits");
  const CMatrix& m = op_.matrix();
  return BlochVector(2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(),
                     (m(0, 0) - m(1, 1)).real());
}

ProbVector born_probs(const DensityOperator& state, const SymmetricPOM& pom) {
  if (state.dim() != pom.dim) {
    throw InvalidArgument("state dimension does not match POM dimension");
  }
  std::vector<double> p;
  p.reserve(pom.outcomes.size());
  for (const auto& pi : pom.outcomes) p.push_back(trace_product(pi, state.op()));
  return ProbVector(std::move(p));
}

DensityOperator reconstruct_state(const ProbVector& p, const SymmetricPOM& pom) {
  require_size(p, pom);
  if (!pom.informationally_complete()) {
    throw NotInformationallyCompleteError(pom.kind.name() +
                                          " POM is not informationally complete");
  }
  return DensityOperator(combine_duals(p.values(), pom));
}

PhysicalityResult check_physical(const ProbVector& p, const SymmetricPOM& pom) {
  require_size(p, pom);
  PhysicalityResult r;
  r.sum_sq = p.sum_of_squares();
  r.min_eig = combine_duals(p.values(), pom).min_eigenvalue();
  if (pom.kind.family == PomFamily::ClassicalDie) {
    r.physical = true;
  } else if (pom.dim == 2 && pom.num_outcomes == 4) {
    r.physical = r.sum_sq <= 1.0 / 3.0 + kProbTol;
  } else {
    r.physical = r.min_eig >= -kEigenTol;
  }
  return r;
}

double squared_error(std::span<const double> p_hat, std::span<const double> p,
                     double prefactor) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = p_hat[k] - p[k];
    s += d * d;
  }
  return prefactor * s;
}

double squared_error(const ProbVector& p_hat, const ProbVector& p, const SymmetricPOM& pom) {
  require_size(p_hat, pom);
  require_size(p, pom);
  return squared_error(p_hat.values(), p.values(), pom.error_prefactor());
}

ProbVector qubit_probs(const Vec3& s, const SymmetricPOM& pom) {
  if (!pom.directions) throw InvalidArgument("POM has no Bloch directions");
  std::vector<double> p;
  const double k = pom.num_outcomes;
  for (const auto& e : *pom.directions) p.push_back((1.0 + e.dot(s)) / k);
  return ProbVector(std::move(p));
}

}  // namespace qmm

#include "qminimax/estimators.hpp"

#include "qminimax/errors.hpp"
#include "qminimax/kernels.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

namespace qmm {

namespace {

constexpr int kTetraOutcomes = 4;

void require_tetrahedron(const CountVector& counts) {
  if (counts.size() != kTetraOutcomes) {
    throw InvalidArgument("quantum estimators expect 4 tetrahedron counts, got " +
                          std::to_string(counts.size()));
  }
}

void require_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.25)) {
    throw InvalidArgument("epsilon must lie in [0, 1/4]");
  }
}

const std::array<Vec3, 4>& tetra_legs() {
  static const std::array<Vec3, 4> legs = [] {
    const auto dirs = reference_directions(PomFamily::Tetrahedron);
    return std::array<Vec3, 4>{dirs[0], dirs[1], dirs[2], dirs[3]};
  }();
  return legs;
}

ProbVector tetra_probs(const Vec3& s) {
  std::vector<double> p(4);
  for (int k = 0; k < 4; ++k) p[k] = 0.25 * (1.0 + tetra_legs()[k].dot(s));
  // Renormalize away rounding so the sum is exactly representable as one.
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v = std::max(v, 0.0) / sum;
  return ProbVector(std::move(p));
}

Vec3 project_to_ball(const Vec3& s, double radius) {
  const double n = s.norm();
  return n > radius ? Vec3(s * (radius / n)) : s;
}

Vec3 qubit_gradient(const CountVector& counts, const Vec3& s);

Mat3 qubit_hessian(const CountVector& counts, const Vec3& s) {
  Mat3 h = Mat3::Zero();
  for (int k = 0; k < 4; ++k) {
    if (counts[k] == 0) continue;
    const Vec3& a = tetra_legs()[k];
    const double q = 1.0 + a.dot(s);
    h -= counts[k] * a * a.transpose() / (q * q);
  }
  return h;
}

double kkt_residual(const Vec3& g, const Vec3& s, double mu) { return (g - mu * s).norm(); }

// Newton steps on the stationarity conditions g(s) = mu s, |s| = r of the
// boundary maximum. Steps are kept only while they shrink the residual.
Vec3 polish_on_sphere(const CountVector& counts, Vec3 s, double radius, int& steps) {
  double mu = qubit_gradient(counts, s).dot(s) / (radius * radius);
  double res = kkt_residual(qubit_gradient(counts, s), s, mu);
  for (int it = 0; it < 30 && res > 1e-13 * counts.total(); ++it) {
    const Vec3 g = qubit_gradient(counts, s);
    Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
    j.topLeftCorner<3, 3>() = qubit_hessian(counts, s) - mu * Mat3::Identity();
    j.block<3, 1>(0, 3) = -s;
    j.block<1, 3>(3, 0) = s.transpose();
    Eigen::Vector4d rhs;
    rhs.head<3>() = -(g - mu * s);
    rhs(3) = -0.5 * (s.squaredNorm() - radius * radius);
    const Eigen::Vector4d step = j.fullPivLu().solve(rhs);
    if (!step.allFinite()) break;
    Vec3 trial = s + step.head<3>();
    trial *= radius / trial.norm();
    if (!std::isfinite(qubit_log_likelihood(counts, trial))) break;
    const double trial_mu = mu + step(3);
    const double trial_res = kkt_residual(qubit_gradient(counts, trial), trial, trial_mu);
    if (!(trial_res < res)) break;
    s = trial;
    mu = trial_mu;
    res = trial_res;
    ++steps;
  }
  return s;
}

Vec3 qubit_gradient(const CountVector& counts, const Vec3& s) {
  Vec3 g = Vec3::Zero();
  for (int k = 0; k < 4; ++k) {
    if (counts[k] == 0) continue;
    g += counts[k] * tetra_legs()[k] / (1.0 + tetra_legs()[k].dot(s));
  }
  return g;
}

}  // namespace

CountVector::CountVector(std::vector<int> counts) : n_(std::move(counts)) {
  if (n_.size() < 2) throw InvalidArgument("count vector needs at least 2 outcomes");
  for (int v : n_) {
    if (v < 0) throw InvalidArgument("counts must be nonnegative");
    total_ += v;
  }
  if (total_ == 0) throw EmptyDataError();
}

std::vector<double> CountVector::freqs() const {
  std::vector<double> f(n_.size());
  for (std::size_t k = 0; k < n_.size(); ++k) f[k] = double(n_[k]) / total_;
  return f;
}

double CountVector::freq_sum_of_squares() const {
  double s = 0.0;
  for (int v : n_) s += double(v) * double(v);
  return s / (double(total_) * double(total_));
}

MinimaxCoefficients MinimaxCoefficients::for_total(int n) {
  if (n < 1) throw EmptyDataError();
  const double root = std::sqrt(double(n));
  return {1.0 / (1.0 + root), 1.0 / (1.0 + 1.0 / root)};
}

MinimaxCoefficients MinimaxCoefficients::purity_matched(double epsilon) {
  require_epsilon(epsilon);
  const double b = std::sqrt(1.0 - 4.0 * epsilon);
  return {1.0 - b, b};
}

// --- EstimatorSpec -------------------------------------------------------

EstimatorSpec EstimatorSpec::add_beta(double beta) {
  EstimatorSpec s{EstimatorKind::AddBeta};
  s.beta = beta;
  return s;
}

EstimatorSpec EstimatorSpec::quantum_minimax(double epsilon, bool variant_bn) {
  EstimatorSpec s{EstimatorKind::QuantumAdmix};
  s.epsilon = epsilon;
  s.variant_bn = variant_bn;
  return s;
}

EstimatorSpec EstimatorSpec::ml_quantum_epsilon(double epsilon) {
  EstimatorSpec s{EstimatorKind::MLQuantumEpsilon};
  s.epsilon = epsilon;
  return s;
}

EstimatorSpec EstimatorSpec::mean_mc(double beta, std::int64_t samples, std::uint64_t seed,
                                     bool indicator) {
  EstimatorSpec s{EstimatorKind::MeanMC};
  s.beta = beta;
  s.samples = samples;
  s.seed = seed;
  s.indicator = indicator;
  return s;
}

bool EstimatorSpec::quantum() const {
  return kind == EstimatorKind::QuantumAdmix || kind == EstimatorKind::MLQuantumExact ||
         kind == EstimatorKind::MLQuantumEpsilon;
}

void EstimatorSpec::validate() const {
  switch (kind) {
    case EstimatorKind::AddBeta:
    case EstimatorKind::MeanMC:
      if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be > 0");
      if (kind == EstimatorKind::MeanMC && samples < 1000) {
        throw InvalidArgument("mean_mc needs at least 1000 samples");
      }
      break;
    case EstimatorKind::QuantumAdmix:
    case EstimatorKind::MLQuantumEpsilon:
      require_epsilon(epsilon);
      break;
    default:
      break;
  }
}

std::string EstimatorSpec::kind_name() const {
  switch (kind) {
    case EstimatorKind::MLClassical: return "ml_classical";
    case EstimatorKind::AddBeta: return "add_beta";
    case EstimatorKind::ClassicalMinimax: return "classical_minimax";
    case EstimatorKind::QuantumAdmix: return "quantum_minimax";
    case EstimatorKind::MLQuantumExact: return "ml_quantum_exact";
    case EstimatorKind::MLQuantumEpsilon: return "ml_quantum_epsilon";
    case EstimatorKind::MeanMC: return "mean_mc";
  }
  return "unknown";
}

EstimatorKind EstimatorSpec::parse_kind(const std::string& name) {
  if (name == "ml_classical" || name == "ml") return EstimatorKind::MLClassical;
  if (name == "add_beta") return EstimatorKind::AddBeta;
  if (name == "classical_minimax") return EstimatorKind::ClassicalMinimax;
  if (name == "quantum_minimax" || name == "quantum_admix") return EstimatorKind::QuantumAdmix;
  if (name == "ml_quantum_exact" || name == "ml_quantum") return EstimatorKind::MLQuantumExact;
  if (name == "ml_quantum_epsilon") return EstimatorKind::MLQuantumEpsilon;
  if (name == "mean_mc") return EstimatorKind::MeanMC;
  throw InvalidArgument("unknown estimator '" + name + "'");
}

Estimator make_estimator(const EstimatorSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case EstimatorKind::MLClassical:
      return [](const CountVector& c) { return estimate_ml_classical(c); };
    case EstimatorKind::AddBeta:
      return [beta = spec.beta](const CountVector& c) { return estimate_add_beta(c, beta); };
    case EstimatorKind::ClassicalMinimax:
      return [](const CountVector& c) { return estimate_classical_minimax(c); };
    case EstimatorKind::QuantumAdmix:
      return [eps = spec.epsilon, v = spec.variant_bn](const CountVector& c) {
        return estimate_quantum_minimax(c, eps, v);
      };
    case EstimatorKind::MLQuantumExact:
      return [](const CountVector& c) { return estimate_ml_quantum(c, 0.0); };
    case EstimatorKind::MLQuantumEpsilon:
      return [eps = spec.epsilon](const CountVector& c) { return estimate_ml_quantum(c, eps); };
    case EstimatorKind::MeanMC:
      return [spec](const CountVector& c) {
        return estimate_mean_mc(c, spec.beta, spec.samples, spec.seed, spec.indicator).p_hat;
      };
  }
  throw InvalidArgument("unhandled estimator kind");
}

ProbVector estimate(const EstimatorSpec& spec, const CountVector& counts) {
  return make_estimator(spec)(counts);
}

// --- classical -----------------------------------------------------------

ProbVector estimate_ml_classical(const CountVector& counts) {
  return ProbVector(counts.freqs());
}

ProbVector estimate_add_beta(const CountVector& counts, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
  const double denom = counts.total() + counts.size() * beta;
  std::vector<double> p(static_cast<std::size_t>(counts.size()));
  for (int k = 0; k < counts.size(); ++k) p[k] = (counts[k] + beta) / denom;
  return ProbVector(std::move(p));
}

ProbVector estimate_classical_minimax(const CountVector& counts) {
  const auto c = MinimaxCoefficients::for_total(counts.total());
  const double k = counts.size();
  std::vector<double> p(static_cast<std::size_t>(counts.size()));
  for (int i = 0; i < counts.size(); ++i) p[i] = c.a / k + counts.freq(i) * c.b;
  return ProbVector(std::move(p));
}

// --- admixing ------------------------------------------------------------

AdmixResult admix_lambda_qubit(const CountVector& counts, double epsilon) {
  return admix_lambda_qubit(counts, epsilon, MinimaxCoefficients::for_total(counts.total()));
}

AdmixResult admix_lambda_qubit(const CountVector& counts, double epsilon,
                               const MinimaxCoefficients& coeffs) {
  require_tetrahedron(counts);
  require_epsilon(epsilon);
  std::vector<double> p0(4);
  for (int k = 0; k < 4; ++k) p0[k] = coeffs.a / 4.0 + counts.freq(k) * coeffs.b;
  const double nu_sq = counts.freq_sum_of_squares();
  // sum p0^2 = 1/4 + b^2 (sum nu^2 - 1/4), so the trigger and the root both
  // only need the excess of sum nu^2 over its minimum.
  const double excess = coeffs.b * coeffs.b * (nu_sq - 0.25);
  const double target_excess = (1.0 - 4.0 * epsilon) / 12.0;

  double lambda = 0.0;
  if (0.25 + excess > (1.0 - epsilon) / 3.0) {
    assert(excess > 0.0);
    lambda = std::clamp(1.0 - std::sqrt(target_excess / excess), 0.0, 1.0);
  }
  for (double& v : p0) v = (1.0 - lambda) * v + lambda / 4.0;
  return {lambda, ProbVector(std::move(p0))};
}

AdmixResult admix_physical_general(const ProbVector& p0, const SymmetricPOM& pom) {
  const DensityOperator rho0 = reconstruct_state(p0, pom);
  const double mu = rho0.min_eigenvalue();
  if (mu >= 0.0) return {0.0, p0};
  const double lambda = -mu / (1.0 / pom.dim - mu);
  std::vector<double> p(p0.vec());
  // tr{Pi_k (1/d)} = 1/K for an S-POM.
  for (double& v : p) v = (1.0 - lambda) * v + lambda / pom.num_outcomes;
  return {lambda, ProbVector(std::move(p))};
}

AdmixResult quantum_minimax_admix(const CountVector& counts, double epsilon, bool variant_bn) {
  const auto coeffs = variant_bn ? MinimaxCoefficients::purity_matched(epsilon)
                                 : MinimaxCoefficients::for_total(counts.total());
  return admix_lambda_qubit(counts, epsilon, coeffs);
}

ProbVector estimate_quantum_minimax(const CountVector& counts, double epsilon, bool variant_bn) {
  return quantum_minimax_admix(counts, epsilon, variant_bn).p_hat;
}

// --- constrained ML --------------------------------------------------------

double qubit_log_likelihood(const CountVector& counts, const Vec3& s) {
  require_tetrahedron(counts);
  double ll = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (counts[k] == 0) continue;
    const double p = 0.25 * (1.0 + tetra_legs()[k].dot(s));
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += counts[k] * std::log(p);
  }
  return ll;
}

// Projected gradient hands over to the Newton polish below this norm.
constexpr double kMlPolishStart = 1e-6;

MlQuantumResult ml_quantum_solve(const CountVector& counts, double epsilon) {
  require_tetrahedron(counts);
  require_epsilon(epsilon);
  MlQuantumResult result;
  const double radius = std::sqrt(1.0 - 4.0 * epsilon);

  if (counts.freq_sum_of_squares() <= (1.0 - epsilon) / 3.0) {
    // The frequencies are themselves feasible: s = 3 sum_k nu_k a_k.
    Vec3 s = Vec3::Zero();
    for (int k = 0; k < 4; ++k) s += 3.0 * counts.freq(k) * tetra_legs()[k];
    result.p_hat = ProbVector(counts.freqs());
    result.bloch = s;
    return result;
  }
  result.constrained = true;
  if (radius == 0.0) {
    result.p_hat = ProbVector::uniform(4);
    return result;
  }

  // Projected gradient ascent on the ball with a halving/doubling step.
  Vec3 s = Vec3::Zero();
  double ll = qubit_log_likelihood(counts, s);
  double step = 1.0 / counts.total();
  int it = 0;
  double pg_norm = std::numeric_limits<double>::infinity();
  for (; it < kMlMaxIterations; ++it) {
    const Vec3 g = qubit_gradient(counts, s);
    pg_norm = (project_to_ball(s + g, radius) - s).norm();
    if (pg_norm < kMlPolishStart) break;
    bool moved = false;
    for (int halving = 0; halving < 60; ++halving) {
      const Vec3 trial = project_to_ball(s + step * g, radius);
      const double trial_ll = qubit_log_likelihood(counts, trial);
      if (trial_ll >= ll + 1e-4 * g.dot(trial - s)) {
        moved = trial != s;
        s = trial;
        ll = trial_ll;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    step *= 2.0;
  }
  // Frequencies outside the ball put the maximum on its surface.
  if (pg_norm >= kMlGradientTol && s.norm() > radius * (1.0 - 1e-9)) {
    const Vec3 polished = polish_on_sphere(counts, s, radius, it);
    if (qubit_log_likelihood(counts, polished) >= ll - 1e-12 * std::abs(ll)) s = polished;
  }
  pg_norm = (project_to_ball(s + qubit_gradient(counts, s), radius) - s).norm();
  result.iterations = it;
  result.gradient_norm = pg_norm;
  result.bloch = s;
  result.p_hat = tetra_probs(s);
  return result;
}

ProbVector estimate_ml_quantum(const CountVector& counts, double epsilon) {
  return ml_quantum_solve(counts, epsilon).p_hat;
}

// --- Monte Carlo mean ------------------------------------------------------

MeanMcResult estimate_mean_mc(const CountVector& counts, double beta, std::int64_t samples,
                              std::uint64_t seed, bool indicator) {
  EstimatorSpec::mean_mc(beta, samples, seed, indicator).validate();
  if (indicator && counts.size() != 4) {
    throw InvalidArgument("the physicality indicator is defined for the qubit tetrahedron only");
  }
  std::vector<double> alpha(static_cast<std::size_t>(counts.size()));
  for (int k = 0; k < counts.size(); ++k) alpha[k] = counts[k] + beta;

  const kernels::MeanMcSums sums = kernels::mean_mc_omp(alpha, samples, seed, indicator);
  MeanMcResult r;
  r.accepted = sums.accepted;
  r.acceptance_rate = double(sums.accepted) / double(sums.drawn);
  if (sums.accepted == 0) {
    throw DegeneratePosteriorError("every Monte Carlo sample was rejected by the physicality "
                                   "indicator (acceptance rate 0)",
                                   0.0);
  }
  const double m = double(sums.accepted);
  std::vector<double> mean(alpha.size());
  r.std_err.resize(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    mean[k] = sums.sum[k] / m;
    const double var = m > 1 ? std::max(sums.sum_sq[k] / m - mean[k] * mean[k], 0.0) * m / (m - 1)
                             : 0.0;
    r.std_err[k] = std::sqrt(var / m);
  }
  const double total = std::accumulate(mean.begin(), mean.end(), 0.0);
  for (double& v : mean) v /= total;
  r.p_hat = ProbVector(std::move(mean));
  return r;
}

}  // namespace qmm

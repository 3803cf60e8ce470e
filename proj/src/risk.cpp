#include "qminimax/risk.hpp"

#include "qminimax/errors.hpp"
#include "qminimax/kernels.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

namespace qmm {

std::shared_ptr<const OutcomeEnumeration> shared_enumeration(int n, int k) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const OutcomeEnumeration>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{n, k}];
  if (!slot) slot = std::make_shared<const OutcomeEnumeration>(enumerate_outcomes(n, k));
  return slot;
}

RiskEvaluator::RiskEvaluator(const Estimator& estimator, const SymmetricPOM& pom, int n)
    : outcomes_(shared_enumeration(n, pom.num_outcomes)),
      estimates_(kernels::tabulate_estimates_omp(estimator, *outcomes_)),
      prefactor_(pom.error_prefactor()) {}

RiskEvaluator::RiskEvaluator(const EstimatorSpec& spec, const SymmetricPOM& pom, int n)
    : outcomes_(shared_enumeration(n, pom.num_outcomes)), prefactor_(pom.error_prefactor()) {
  const Estimator estimator = make_estimator(spec);
  // Monte Carlo estimates depend on how the draws are labelled, so only the
  // deterministic estimators take the permutation shortcut.
  estimates_ = spec.kind == EstimatorKind::MeanMC
                   ? kernels::tabulate_estimates_omp(estimator, *outcomes_)
                   : kernels::tabulate_estimates_symmetric(estimator, *outcomes_);
}

double RiskEvaluator::risk(const ProbVector& p) const { return risk(p.values()); }

double RiskEvaluator::risk(std::span<const double> p) const {
  return kernels::risk_at_omp(*outcomes_, estimates_, p, prefactor_);
}

std::vector<double> RiskEvaluator::risk_batch(std::span<const double> states) const {
  return kernels::risk_batch_omp(*outcomes_, estimates_, states, prefactor_);
}

double risk_exact(const EstimatorSpec& spec, const ProbVector& true_p, const SymmetricPOM& pom,
                  int n) {
  if (true_p.size() != pom.num_outcomes) {
    throw InvalidArgument("true state has the wrong number of outcomes");
  }
  return RiskEvaluator(spec, pom, n).risk(true_p);
}

double risk_exact(const Estimator& estimator, const ProbVector& true_p,
                  const SymmetricPOM& pom, int n) {
  if (true_p.size() != pom.num_outcomes) {
    throw InvalidArgument("true state has the wrong number of outcomes");
  }
  return RiskEvaluator(estimator, pom, n).risk(true_p);
}

// --- priors ---------------------------------------------------------------

void DiscretePrior::validate() const {
  if (states.empty() || states.size() != weights.size()) {
    throw InvalidArgument("prior needs one weight per state");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("prior weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("prior weights must sum to 1");
}

DiscretePrior DiscretePrior::point(const ProbVector& state) { return {{state}, {1.0}}; }

DiscretePrior DiscretePrior::uniform(std::vector<ProbVector> states) {
  const std::size_t m = states.size();
  return {std::move(states), std::vector<double>(m, 1.0 / double(m))};
}

namespace {

double prior_average(const RiskEvaluator& evaluator, const DiscretePrior& prior) {
  double total = 0.0;
  for (std::size_t i = 0; i < prior.states.size(); ++i) {
    if (prior.states[i].size() != evaluator.outcomes()) {
      throw InvalidArgument("prior state has the wrong number of outcomes");
    }
    total += prior.weights[i] * evaluator.risk(prior.states[i]);
  }
  return total;
}

}  // namespace

double average_risk(const EstimatorSpec& spec, const DiscretePrior& prior,
                    const SymmetricPOM& pom, int n) {
  prior.validate();
  return prior_average(RiskEvaluator(spec, pom, n), prior);
}

double average_risk(const Estimator& estimator, const DiscretePrior& prior,
                    const SymmetricPOM& pom, int n) {
  prior.validate();
  return prior_average(RiskEvaluator(estimator, pom, n), prior);
}

// --- extrema -----------------------------------------------------------------

std::vector<Vec3> fibonacci_sphere(int count) {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(count));
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / double(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  double total = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = std::max(v[k] - theta, 0.0);
    total += out[k];
  }
  for (double& x : out) x /= total;
  return out;
}

namespace {

bool uses_bloch_grid(const SymmetricPOM& pom) {
  return pom.directions.has_value();
}

Vec3 clamp_to_unit_ball(const Vec3& s) {
  const double n = s.norm();
  return n > 1.0 ? Vec3(s / n) : s;
}

int default_resolution(int k) {
  int m = 1;
  while (composition_count(m + 1, k) <= 4096) ++m;
  return m;
}

void simplex_lattice(int m, int k, std::vector<int>& current, int pos, int remaining,
                     std::vector<std::vector<double>>& out) {
  if (pos == k - 1) {
    current[pos] = remaining;
    std::vector<double> p(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) p[i] = double(current[i]) / m;
    out.push_back(std::move(p));
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    current[pos] = v;
    simplex_lattice(m, k, current, pos + 1, remaining - v, out);
  }
}

struct RefineContext {
  const RiskEvaluator* evaluator;
  const SymmetricPOM* pom;
  double sign;
};

RiskPoint point_from_params(const RefineContext& ctx, const gsl_vector* x) {
  RiskPoint pt;
  if (uses_bloch_grid(*ctx.pom)) {
    const Vec3 s = clamp_to_unit_ball(
        Vec3(gsl_vector_get(x, 0), gsl_vector_get(x, 1), gsl_vector_get(x, 2)));
    pt.p = qubit_probs(s, *ctx.pom);
    pt.bloch = s;
  } else {
    const int k = ctx.pom->num_outcomes;
    std::vector<double> v(static_cast<std::size_t>(k));
    double rest = 1.0;
    for (int i = 0; i < k - 1; ++i) {
      v[i] = gsl_vector_get(x, static_cast<std::size_t>(i));
      rest -= v[i];
    }
    v[k - 1] = rest;
    pt.p = ProbVector(project_to_simplex(v));
  }
  return pt;
}

double refine_objective(const gsl_vector* x, void* params) {
  const auto& ctx = *static_cast<const RefineContext*>(params);
  return ctx.sign * ctx.evaluator->risk(point_from_params(ctx, x).p);
}

RiskPoint refine(const RiskEvaluator& evaluator, const SymmetricPOM& pom, const RiskPoint& start,
                 double sign, double step, const GridSpec& grid) {
  RefineContext ctx{&evaluator, &pom, sign};
  const bool bloch = uses_bloch_grid(pom);
  const std::size_t dim = bloch ? 3 : static_cast<std::size_t>(pom.num_outcomes - 1);

  gsl_vector* x = gsl_vector_alloc(dim);
  gsl_vector* steps = gsl_vector_alloc(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    gsl_vector_set(x, i, bloch ? (*start.bloch)(static_cast<int>(i)) : start.p[static_cast<int>(i)]);
  }
  gsl_vector_set_all(steps, step);

  gsl_multimin_function fn{&refine_objective, dim, &ctx};
  gsl_multimin_fminimizer* nm = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
  gsl_multimin_fminimizer_set(nm, &fn, x, steps);
  for (int it = 0; it < grid.refine_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(nm) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm), grid.simplex_tolerance) ==
        GSL_SUCCESS) {
      break;
    }
  }
  RiskPoint best = point_from_params(ctx, gsl_multimin_fminimizer_x(nm));
  best.risk = evaluator.risk(best.p);
  gsl_multimin_fminimizer_free(nm);
  gsl_vector_free(steps);
  gsl_vector_free(x);

  // Keep the grid point if the simplex wandered somewhere worse.
  return sign * best.risk < sign * start.risk ? best : start;
}

}  // namespace

RiskSurface risk_extrema(const RiskEvaluator& evaluator, const SymmetricPOM& pom,
                         const GridSpec& grid) {
  if (evaluator.outcomes() != pom.num_outcomes) {
    throw InvalidArgument("evaluator and POM disagree on the number of outcomes");
  }
  gsl_set_error_handler_off();
  RiskSurface surface;
  std::vector<double> flat;
  const std::size_t kk = static_cast<std::size_t>(pom.num_outcomes);
  double step = 0.0;

  if (uses_bloch_grid(pom)) {
    if (grid.radii < 1 || grid.directions < 1) throw InvalidArgument("empty Bloch grid");
    std::vector<Vec3> points{Vec3::Zero()};
    const auto dirs = fibonacci_sphere(grid.directions);
    for (int r = 1; r <= grid.radii; ++r) {
      for (const auto& d : dirs) points.push_back(d * (double(r) / grid.radii));
    }
    for (const auto& s : points) {
      RiskPoint pt{qubit_probs(s, pom), s, 0.0};
      flat.insert(flat.end(), pt.p.vec().begin(), pt.p.vec().end());
      surface.grid.push_back(std::move(pt));
    }
    step = 1.0 / grid.radii;
  } else {
    const int m = grid.simplex_resolution > 0 ? grid.simplex_resolution
                                              : default_resolution(pom.num_outcomes);
    std::vector<std::vector<double>> lattice;
    std::vector<int> current(kk);
    simplex_lattice(m, pom.num_outcomes, current, 0, m, lattice);
    for (auto& p : lattice) {
      flat.insert(flat.end(), p.begin(), p.end());
      surface.grid.push_back({ProbVector(std::move(p)), std::nullopt, 0.0});
    }
    step = 1.0 / m;
  }

  const std::vector<double> risks = evaluator.risk_batch(flat);
  std::size_t imax = 0;
  std::size_t imin = 0;
  for (std::size_t i = 0; i < risks.size(); ++i) {
    surface.grid[i].risk = risks[i];
    if (risks[i] > risks[imax]) imax = i;
    if (risks[i] < risks[imin]) imin = i;
  }
  surface.max = surface.grid[imax];
  surface.min = surface.grid[imin];
  if (grid.refine) {
    surface.max = refine(evaluator, pom, surface.max, -1.0, step, grid);
    if (grid.refine_min) surface.min = refine(evaluator, pom, surface.min, 1.0, step, grid);
  }
  return surface;
}

RiskSurface risk_extrema(const EstimatorSpec& spec, const SymmetricPOM& pom, int n,
                         const GridSpec& grid) {
  return risk_extrema(RiskEvaluator(spec, pom, n), pom, grid);
}

}  // namespace qmm

#include "qminimax/minimax.hpp"

#include "qminimax/errors.hpp"
#include "qminimax/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qmm {

EpsilonFamily parse_epsilon_family(const std::string& name) {
  if (name == "quantum_minimax" || name == "quantum_admix") return EpsilonFamily::QuantumAdmix;
  if (name == "ml_quantum_epsilon" || name == "ml_epsilon") return EpsilonFamily::MLQuantumEpsilon;
  throw InvalidArgument("unknown epsilon family '" + name + "'");
}

std::string family_name(EpsilonFamily family) {
  return family == EpsilonFamily::QuantumAdmix ? "quantum_minimax" : "ml_quantum_epsilon";
}

EstimatorSpec family_estimator(EpsilonFamily family, double epsilon, bool variant_bn) {
  return family == EpsilonFamily::QuantumAdmix
             ? EstimatorSpec::quantum_minimax(epsilon, variant_bn)
             : EstimatorSpec::ml_quantum_epsilon(epsilon);
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol, std::vector<EpsilonProbe>* trace) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double best_x = lo;
  double best_f = std::numeric_limits<double>::infinity();
  auto eval = [&](double x) {
    const double v = f(x);
    if (trace) trace->push_back({x, v});
    if (v < best_f || (v == best_f && x < best_x)) {
      best_f = v;
      best_x = x;
    }
    return v;
  };
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  return best_x;
}

double max_risk(EpsilonFamily family, double epsilon, int n, const SymmetricPOM& pom,
                const EpsilonSearchSpec& spec) {
  const RiskEvaluator evaluator(family_estimator(family, epsilon, spec.variant_bn), pom, n);
  return risk_extrema(evaluator, pom, spec.grid).max.risk;
}

EpsilonResult optimize_epsilon(EpsilonFamily family, int n, const EpsilonSearchSpec& spec) {
  if (n < 1) throw InvalidArgument("optimize_epsilon needs N >= 1");
  if (spec.coarse_points < 2) throw InvalidArgument("coarse scan needs at least 2 points");
  if (!(spec.upper > 0.0 && spec.upper <= 0.25)) {
    throw InvalidArgument("epsilon search upper bound must lie in (0, 1/4]");
  }
  const SymmetricPOM pom = build_pom(PomKind::tetrahedron());
  // Warm the shared enumeration once for every probe.
  shared_enumeration(n, pom.num_outcomes);

  auto objective = [&](double eps) { return max_risk(family, eps, n, pom, spec); };

  EpsilonResult result;
  result.total = n;
  const int m = spec.coarse_points;
  for (int i = 0; i < m; ++i) {
    const double eps = spec.upper * i / (m - 1);
    result.trace.push_back({eps, objective(eps)});
  }
  result.max_risk_at_zero = result.trace.front().max_risk;

  const auto best_scan = std::min_element(
      result.trace.begin(), result.trace.end(),
      [](const EpsilonProbe& a, const EpsilonProbe& b) { return a.max_risk < b.max_risk; });
  const int i = static_cast<int>(best_scan - result.trace.begin());
  const double lo = result.trace[static_cast<std::size_t>(std::max(i - 1, 0))].epsilon;
  const double hi = result.trace[static_cast<std::size_t>(std::min(i + 1, m - 1))].epsilon;
  golden_section_minimize(objective, lo, hi, spec.tolerance, &result.trace);

  const EpsilonProbe* best = &result.trace.front();
  for (const auto& probe : result.trace) {
    if (probe.max_risk < best->max_risk ||
        (probe.max_risk == best->max_risk && probe.epsilon < best->epsilon)) {
      best = &probe;
    }
  }
  result.epsilon_star = best->epsilon;
  result.max_risk_at_star = best->max_risk;
  return result;
}

BetaSearchResult worst_case_beta_classical(int k, int n, const std::vector<double>& beta_grid,
                                           int random_probes, std::uint64_t seed) {
  if (beta_grid.empty()) throw InvalidArgument("beta grid must not be empty");
  for (double b : beta_grid) {
    if (!(b > 0.0)) throw InvalidArgument("beta grid values must be > 0");
  }
  const SymmetricPOM die = build_pom(PomKind::classical_die(k));

  std::vector<double> probes;
  for (int v = 0; v < k; ++v) {
    for (int j = 0; j < k; ++j) probes.push_back(j == v ? 1.0 : 0.0);
  }
  for (int j = 0; j < k; ++j) probes.push_back(1.0 / k);
  CounterRng rng(seed, 0);
  for (int i = 0; i < random_probes; ++i) {
    // Normalized exponentials are uniform on the simplex.
    std::vector<double> e(static_cast<std::size_t>(k));
    double total = 0.0;
    for (double& x : e) {
      x = -std::log1p(-rng.uniform());
      total += x;
    }
    for (double x : e) probes.push_back(x / total);
  }

  BetaSearchResult result;
  for (double beta : beta_grid) {
    const RiskEvaluator evaluator(EstimatorSpec::add_beta(beta), die, n);
    const auto risks = evaluator.risk_batch(probes);
    result.worst_risks.push_back(*std::max_element(risks.begin(), risks.end()));
  }
  const auto best = std::min_element(result.worst_risks.begin(), result.worst_risks.end());
  result.beta_star = beta_grid[static_cast<std::size_t>(best - result.worst_risks.begin())];
  return result;
}

}  // namespace qmm

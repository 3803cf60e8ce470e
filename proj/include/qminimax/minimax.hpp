#pragma once

// Outer minimax searches: the admixing slack epsilon for the qubit
// estimators, and the worst-case-optimal add-beta for the classical die.

#include "qminimax/risk.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace qmm {

enum class EpsilonFamily { QuantumAdmix, MLQuantumEpsilon };

EpsilonFamily parse_epsilon_family(const std::string& name);
std::string family_name(EpsilonFamily family);
EstimatorSpec family_estimator(EpsilonFamily family, double epsilon, bool variant_bn = false);

struct EpsilonSearchSpec {
  int coarse_points = 16;
  double tolerance = 1e-4;
  double upper = 0.25;
  bool variant_bn = false;
  GridSpec grid{.refine_min = false};
};

struct EpsilonProbe {
  double epsilon = 0.0;
  double max_risk = 0.0;
};

struct EpsilonResult {
  int total = 0;
  double epsilon_star = 0.0;
  double max_risk_at_star = 0.0;
  double max_risk_at_zero = 0.0;
  std::vector<EpsilonProbe> trace;
};

/// Golden-section minimization of f on [lo, hi] down to an interval of width
/// `tol`. Every evaluation is appended to `trace` when given.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol, std::vector<EpsilonProbe>* trace = nullptr);

/// Worst-case risk over qubit states of one member of the family.
double max_risk(EpsilonFamily family, double epsilon, int n, const SymmetricPOM& pom,
                const EpsilonSearchSpec& spec = {});

/// min over eps in [0, 1/4] of max over states of the risk: a coarse scan
/// (endpoints included) followed by golden section around the best scan point.
EpsilonResult optimize_epsilon(EpsilonFamily family, int n, const EpsilonSearchSpec& spec = {});

struct BetaSearchResult {
  double beta_star = 0.0;
  std::vector<double> worst_risks;
};

/// For each beta, the worst risk of add-beta on the K-sided die over the
/// vertices, the uniform state and `random_probes` uniformly drawn states.
BetaSearchResult worst_case_beta_classical(int k, int n, const std::vector<double>& beta_grid,
                                           int random_probes = 2000, std::uint64_t seed = 7);

}  // namespace qmm

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "qminimax/errors.hpp"
#include "qminimax/estimators.hpp"
#include "qminimax/minimax.hpp"
#include "qminimax/pom.hpp"
#include "qminimax/risk.hpp"
#include "qminimax/simulator.hpp"
#include "qminimax/state.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace qmm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> random_simplex(std::mt19937_64& rng, int k) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(static_cast<std::size_t>(k));
  double s = 0.0;
  for (double& v : p) s += v = e(rng);
  for (double& v : p) v /= s;
  return p;
}

Vec3 random_ball(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Vec3 s(u(rng), u(rng), u(rng));
    if (s.norm() <= 1.0) return s;
  }
}

CountVector random_counts(std::mt19937_64& rng, int n, int k) {
  const auto p = random_simplex(rng, k);
  std::discrete_distribution<int> draw(p.begin(), p.end());
  std::vector<int> c(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < n; ++i) ++c[static_cast<std::size_t>(draw(rng))];
  return CountVector(c);
}

// 1. Geometry suite.
Outcome geometry() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  bool all = true;
  for (const PomKind& kind : {PomKind::tetrahedron(), PomKind::trine(), PomKind::von_neumann(),
                              PomKind::classical_die(2), PomKind::classical_die(6)}) {
    const ValidationReport r = validate_spom(build_pom(kind));
    all &= r.all_passed();
    worst = std::max(worst, r.max_residual());
  }
  const double dt = seconds_since(t0);
  return {all && worst < 1e-12 && dt < 1.0,
          fmt("max residual %.2e", worst) + fmt(", %.3f s", dt)};
}

// 2. Constant risk of the classical minimax estimator on K-sided dice.
Outcome constant_risk() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  double worst = 0.0;
  double worst_oracle = 0.0;
  for (int k : {2, 3, 4}) {
    const SymmetricPOM die = build_pom(PomKind::classical_die(k));
    for (int n : {1, 4, 16, 100}) {
      const double expect = (k - 1.0) / (k * std::pow(1.0 + std::sqrt(double(n)), 2));
      const RiskEvaluator ev(EstimatorSpec::classical_minimax(), die, n);
      const double beta = std::sqrt(double(n)) / k;
      for (int i = 0; i < 100; ++i) {
        const auto p = random_simplex(rng, k);
        const double r = ev.risk(ProbVector(p));
        worst = std::max(worst, std::abs(r - expect) / expect);
        // Bias-variance form of the add-beta error, independent of enumeration.
        double oracle = 0.0;
        for (double q : p) {
          oracle += (n * q * (1 - q) + std::pow(beta - k * beta * q, 2)) /
                    std::pow(n + k * beta, 2);
        }
        worst_oracle = std::max(worst_oracle, std::abs(r - oracle) / expect);
      }
    }
  }
  const double dt = seconds_since(t0);
  return {worst < 1e-10 && worst_oracle < 1e-10 && dt < 30.0,
          fmt("max rel err %.2e", worst) + fmt(" (oracle %.2e)", worst_oracle) +
              fmt(", %.2f s", dt)};
}

// 3. Worked admix example and the two lambda formulas.
Outcome admix_example() {
  const AdmixResult r = admix_lambda_qubit(CountVector({4, 0, 0, 0}), 0.0);
  double err = std::abs(r.lambda - 0.5);
  const std::array<double, 4> want{0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6};
  for (int k = 0; k < 4; ++k) err = std::max(err, std::abs(r.p_hat[k] - want[k]));

  const SymmetricPOM tetra = build_pom(PomKind::tetrahedron());
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> total(1, 60);
  double gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const CountVector c = random_counts(rng, total(rng), 4);
    const double purity = admix_lambda_qubit(c, 0.0).lambda;
    const double spectral =
        admix_physical_general(estimate_classical_minimax(c), tetra).lambda;
    gap = std::max(gap, std::abs(purity - spectral));
  }
  return {err < 1e-12 && gap < 1e-10,
          fmt("example err %.2e", err) + fmt(", spectral vs purity %.2e", gap)};
}

// 4. Exhaustive physicality and full rank for N <= 20.
Outcome physicality() {
  const auto t0 = Clock::now();
  const SymmetricPOM tetra = build_pom(PomKind::tetrahedron());
  const double floor_eig = (1.0 - std::sqrt(0.8)) / 2.0;
  double lo = 1.0, hi = 0.0, min_eig = 1.0;
  std::size_t vectors = 0;
  for (int n = 1; n <= 20; ++n) {
    const OutcomeEnumeration e = enumerate_outcomes(n, 4);
    for (std::size_t i = 0; i < e.size(); ++i) {
      const auto row = e.row(i);
      const CountVector c(std::vector<int>(row.begin(), row.end()));
      const ProbVector p0 = estimate_quantum_minimax(c, 0.0);
      double sq = 0.0;
      for (double v : p0.values()) sq += v * v;
      lo = std::min(lo, sq);
      hi = std::max(hi, sq);
      const ProbVector p5 = estimate_quantum_minimax(c, 0.05);
      min_eig = std::min(min_eig, check_physical(p5, tetra).min_eig);
      ++vectors;
    }
  }
  const double dt = seconds_since(t0);
  const bool ok = lo >= 0.25 - 1e-12 && hi <= 1.0 / 3 + 1e-12 && min_eig >= floor_eig - 1e-10 &&
                  dt < 10.0;
  std::ostringstream d;
  d << vectors << " vectors, sum p^2 in [" << lo << ", " << hi << "], min eig at eps=0.05 "
    << min_eig << " (floor " << floor_eig << ")" << fmt(", %.2f s", dt);
  return {ok, d.str()};
}

struct FigureRun {
  std::vector<int> n;
  std::vector<EpsilonResult> admix;
  std::vector<EpsilonResult> ml;
  std::vector<double> ml_exact;
  double seconds = 0.0;
};

// 5. Max-risk ordering across the estimator families.
Outcome figure2(const FigureRun& f) {
  bool ok = f.seconds < 600.0;
  std::ostringstream d;
  for (std::size_t i = 0; i < f.n.size(); ++i) {
    const double star = f.admix[i].max_risk_at_star;
    const double zero = f.admix[i].max_risk_at_zero;
    const double ml_eps = f.ml[i].max_risk_at_star;
    const double ml = f.ml_exact[i];
    const bool order = star <= zero && zero < ml_eps && ml_eps < ml;
    ok &= order;
    d << "N=" << f.n[i] << ": " << star << " <= " << zero << " < " << ml_eps << " < " << ml
      << (order ? "" : " [violated]") << "; ";
    if (i > 0) {
      const bool down = star < f.admix[i - 1].max_risk_at_star &&
                        zero < f.admix[i - 1].max_risk_at_zero &&
                        ml_eps < f.ml[i - 1].max_risk_at_star && ml < f.ml_exact[i - 1];
      if (!down) d << "[not decreasing] ";
      ok &= down;
    }
  }
  d << fmt("%.1f s", f.seconds);
  return {ok, d.str()};
}

// 6. Optimized epsilon across N.
Outcome figure3(const std::vector<int>& ns, const std::vector<EpsilonResult>& admix) {
  const double tol = 1e-4;
  bool ok = admix.front().epsilon_star > 0.0;
  std::ostringstream d;
  d << "eps* =";
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double e = admix[i].epsilon_star;
    d << " " << ns[i] << ":" << e;
    ok &= e < 0.25;
    if (i > 0 && e > admix[i - 1].epsilon_star + tol) {
      d << " [rises]";
      ok = false;
    }
  }
  return {ok, d.str()};
}

// 7. The discrete posterior mean is Bayes for its own prior.
Outcome bayes_mean() {
  const SymmetricPOM coin = build_pom(PomKind::classical_die(2));
  std::vector<ProbVector> states;
  for (int i = 1; i <= 9; ++i) states.push_back(ProbVector({0.1 * i, 1 - 0.1 * i}));
  const DiscretePrior prior = DiscretePrior::uniform(states);
  auto mean = [&](const CountVector& c) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const double p = states[i][0];
      const double l = prior.weights[i] * std::pow(p, c[0]) * std::pow(1 - p, c[1]);
      num += l * p;
      den += l;
    }
    return ProbVector({num / den, 1 - num / den});
  };
  const double best = average_risk(Estimator(mean), prior, coin, 2);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mag(0.01, 0.05);
  std::bernoulli_distribution flip(0.5);
  double smallest_gain = 1e300;
  for (int t = 0; t < 20; ++t) {
    std::array<double, 3> shift{};
    for (double& s : shift) s = (flip(rng) ? 1 : -1) * mag(rng);
    Estimator perturbed = [&, shift](const CountVector& c) {
      const double v = std::clamp(mean(c)[0] + shift[static_cast<std::size_t>(c[0])], 0.0, 1.0);
      return ProbVector({v, 1 - v});
    };
    smallest_gain = std::min(smallest_gain, average_risk(perturbed, prior, coin, 2) - best);
  }
  return {smallest_gain > 0.0,
          fmt("Bayes risk %.6g", best) + fmt(", smallest excess %.3e", smallest_gain)};
}

// 8. Worst-case add-beta is minimized next to sqrt(N)/K.
Outcome beta_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 60; ++i) grid.push_back(0.05 * i);
  bool ok = true;
  std::ostringstream d;
  for (auto [k, n] : {std::pair{2, 4}, std::pair{4, 16}}) {
    const double target = std::sqrt(double(n)) / k;
    const auto nearest = *std::min_element(grid.begin(), grid.end(), [&](double a, double b) {
      return std::abs(a - target) < std::abs(b - target);
    });
    const BetaSearchResult r = worst_case_beta_classical(k, n, grid);
    ok &= r.beta_star == nearest;
    d << "(K=" << k << ",N=" << n << ") beta*=" << r.beta_star << " nearest=" << nearest << "; ";
  }
  return {ok, d.str()};
}

// 9. Monte Carlo agrees with exact enumeration.
Outcome monte_carlo() {
  const SymmetricPOM tetra = build_pom(PomKind::tetrahedron());
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> total(1, 20);
  std::uniform_real_distribution<double> eps(0.0, 0.2);
  std::uniform_real_distribution<double> beta(0.2, 2.0);
  const std::vector<std::function<EstimatorSpec()>> makers{
      [] { return EstimatorSpec::classical_minimax(); },
      [] { return EstimatorSpec::ml_classical(); },
      [&] { return EstimatorSpec::add_beta(beta(rng)); },
      [&] { return EstimatorSpec::quantum_minimax(eps(rng)); },
      [&] { return EstimatorSpec::ml_quantum_epsilon(eps(rng)); }};
  double worst_z = 0.0;
  bool deterministic = true;
  for (int i = 0; i < 10; ++i) {
    const EstimatorSpec spec = makers[static_cast<std::size_t>(i) % makers.size()]();
    const ProbVector p = qubit_probs(random_ball(rng), tetra);
    SimConfig cfg;
    cfg.total = total(rng);
    cfg.trials = 100000;
    cfg.seed = 1000 + static_cast<std::uint64_t>(i);
    const Estimator est = make_estimator(spec);
    const EmpiricalRisk mc = empirical_risk(est, p, tetra, cfg);
    const double exact = risk_exact(est, p, tetra, cfg.total);
    worst_z = std::max(worst_z, std::abs(mc.mean - exact) / mc.std_err);
    if (i < 2) {
      const EmpiricalRisk again = empirical_risk(est, p, tetra, cfg);
      deterministic &= again.mean == mc.mean && again.std_err == mc.std_err;
    }
  }
  return {worst_z < 4.0 && deterministic,
          fmt("worst |z| %.2f", worst_z) + (deterministic ? ", repeat runs identical"
                                                          : ", repeat runs differ")};
}

// 10. Monte Carlo posterior mean against the add-beta closed form.
Outcome mean_mc() {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> total(1, 40);
  std::uniform_real_distribution<double> beta(0.5, 2.0);
  double worst_z = 0.0;
  for (int i = 0; i < 20; ++i) {
    const CountVector c = random_counts(rng, total(rng), 4);
    const double b = beta(rng);
    const MeanMcResult r =
        estimate_mean_mc(c, b, 1000000, 500 + static_cast<std::uint64_t>(i), false);
    const ProbVector exact = estimate_add_beta(c, b);
    for (int k = 0; k < 4; ++k) {
      worst_z = std::max(worst_z, std::abs(r.p_hat[k] - exact[k]) /
                                      r.std_err[static_cast<std::size_t>(k)]);
    }
  }
  return {worst_z < 3.0, fmt("worst |z| %.2f over 80 components", worst_z)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d %s: %s (%s)\n", id, name, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };

  report(1, "geometry", geometry);
  report(2, "constant risk", constant_risk);
  report(3, "admix example", admix_example);
  report(4, "physicality", physicality);

  // Criteria 5 and 6 share one epsilon search per N.
  const std::vector<int> ns{4, 10, 20, 50, 100};
  FigureRun fig;
  std::vector<EpsilonResult> admix_all;
  std::string search_error;
  try {
    const auto t0 = Clock::now();
    const SymmetricPOM tetra = build_pom(PomKind::tetrahedron());
    for (int n : ns) {
      admix_all.push_back(optimize_epsilon(EpsilonFamily::QuantumAdmix, n));
      if (n == 100) continue;
      fig.n.push_back(n);
      fig.admix.push_back(admix_all.back());
      fig.ml.push_back(optimize_epsilon(EpsilonFamily::MLQuantumEpsilon, n));
      fig.ml_exact.push_back(risk_extrema(EstimatorSpec::ml_quantum_exact(), tetra, n).max.risk);
    }
    fig.seconds = seconds_since(t0);
  } catch (const std::exception& e) {
    search_error = e.what();
  }
  auto searched = [&](auto check) {
    return [&, check]() -> Outcome {
      if (!search_error.empty()) throw Error(search_error);
      return check();
    };
  };
  report(5, "max-risk ordering", searched([&] { return figure2(fig); }));
  report(6, "optimized epsilon", searched([&] { return figure3(ns, admix_all); }));

  report(7, "posterior mean", bayes_mean);
  report(8, "worst-case beta", beta_grid);
  report(9, "monte carlo", monte_carlo);
  report(10, "mean mc", mean_mc);

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}

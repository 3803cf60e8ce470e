#include "qminimax/figures.hpp"

#include "qminimax/errors.hpp"

#include <cmath>

namespace qmm {

void FigureTable::validate() const {
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw InvalidArgument("figure row has the wrong length");
    for (double v : row) {
      if (!std::isfinite(v)) throw InvalidArgument("figure data must be finite");
    }
  }
}

CsvTable FigureTable::to_csv_table() const { return CsvTable{columns, rows}; }

std::vector<double> FigureTable::column(const std::string& name) const {
  return to_csv_table().column(name);
}

std::vector<int> default_figure_n(const std::string& figure_id) {
  if (figure_id == "fig1") return {1, 2, 5, 10, 100};
  return {1, 2, 4, 7, 10, 15, 20, 30, 50, 100};
}

namespace {

FigureTable likelihood_figure(const std::vector<int>& ns, int points) {
  if (points < 2) throw InvalidArgument("fig1 needs at least 2 grid points");
  FigureTable t;
  t.figure_id = "fig1";
  t.columns = {"p"};
  for (int n : ns) {
    if (n < 1) throw InvalidArgument("fig1 needs N >= 1");
    t.columns.push_back("L_" + std::to_string(n));
  }
  for (int i = 0; i < points; ++i) {
    const double p = double(i) / (points - 1);
    std::vector<double> row{p};
    // Data {N, 0}: the likelihood p^N already peaks at 1 at p = 1.
    for (int n : ns) row.push_back(std::pow(p, n));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void check_guard(int n) {
  if (n < 1) throw InvalidArgument("figure N values must be >= 1");
  // The tetrahedron enumeration throws TooLargeError past its guard.
  shared_enumeration(n, 4);
}

}  // namespace

FigureTable emit_figure_data(const std::string& figure_id, const FigureParams& params) {
  const std::vector<int> ns = params.n_values.empty() ? default_figure_n(figure_id)
                                                      : params.n_values;
  FigureTable t;
  if (figure_id == "fig1") {
    t = likelihood_figure(ns, params.p_points);
  } else if (figure_id == "fig2" || figure_id == "fig3") {
    for (int n : ns) check_guard(n);
    const SymmetricPOM pom = build_pom(PomKind::tetrahedron());
    t.figure_id = figure_id;
    if (figure_id == "fig2") {
      t.columns = {"N",           "ml_exact_min",  "ml_exact_max",  "admix0_min",
                   "admix0_max",  "admix_opt_min", "admix_opt_max", "ml_eps_min",
                   "ml_eps_max"};
    } else {
      t.columns = {"N", "eps_admix", "eps_ml"};
    }
    GridSpec grid = params.search.grid;
    grid.refine_min = true;
    for (int n : ns) {
      const EpsilonResult admix = optimize_epsilon(EpsilonFamily::QuantumAdmix, n, params.search);
      const EpsilonResult ml = optimize_epsilon(EpsilonFamily::MLQuantumEpsilon, n, params.search);
      if (figure_id == "fig3") {
        t.rows.push_back({double(n), admix.epsilon_star, ml.epsilon_star});
        continue;
      }
      std::vector<double> row{double(n)};
      const EstimatorSpec specs[] = {
          EstimatorSpec::ml_quantum_exact(),
          EstimatorSpec::quantum_minimax(0.0, params.search.variant_bn),
          EstimatorSpec::quantum_minimax(admix.epsilon_star, params.search.variant_bn),
          EstimatorSpec::ml_quantum_epsilon(ml.epsilon_star)};
      for (const auto& spec : specs) {
        const RiskSurface s = risk_extrema(spec, pom, n, grid);
        row.push_back(s.min.risk);
        row.push_back(s.max.risk);
      }
      t.rows.push_back(std::move(row));
    }
  } else {
    throw InvalidArgument("unknown figure '" + figure_id + "' (expected fig1, fig2 or fig3)");
  }
  t.validate();
  return t;
}

}  // namespace qmm

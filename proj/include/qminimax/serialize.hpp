#pragma once

// JSON and CSV encodings shared by the CLI and its tests.

#include "qminimax/minimax.hpp"
#include "qminimax/pom.hpp"
#include "qminimax/risk.hpp"
#include "qminimax/simulator.hpp"
#include "qminimax/state.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace qmm {

using Json = nlohmann::json;

/// Row-major list of [re, im] pairs.
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j, int dim);

Json pom_to_json(const SymmetricPOM& pom);
SymmetricPOM pom_from_json(const Json& j);
Json report_to_json(const ValidationReport& report);

Json to_json(const ProbVector& p);
ProbVector prob_vector_from_json(const Json& j);
Json to_json(const BlochVector& s);
Json to_json(const DensityOperator& rho);

Json estimator_to_json(const EstimatorSpec& spec);
EstimatorSpec estimator_from_json(const Json& j);

Json risk_point_to_json(const RiskPoint& pt);
Json extrema_to_json(const RiskSurface& surface);
Json epsilon_result_to_json(const EpsilonResult& r);
Json empirical_risk_to_json(const EmpiricalRisk& r);

/// Numeric table with named columns. CSV form: header row, ',' separator,
/// '.' decimal point, LF line endings, values printed with 17 significant
/// digits.
struct CsvTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
  /// Throws InvalidArgument on ragged or non-numeric input.
  static CsvTable parse(const std::string& text);
  std::vector<double> column(const std::string& name) const;
};

CsvTable surface_to_csv(const RiskSurface& surface, const SymmetricPOM& pom);
CsvTable epsilon_results_to_csv(const std::vector<EpsilonResult>& results);

std::string format_double(double v);

}  // namespace qmm

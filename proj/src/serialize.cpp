#include "qminimax/serialize.hpp"

#include "qminimax/errors.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace qmm {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json matrix_to_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out.push_back({m(r, c).real(), m(r, c).imag()});
    }
  }
  return out;
}

CMatrix matrix_from_json(const Json& j, int dim) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(dim * dim)) {
    throw InvalidArgument("matrix JSON must hold dim*dim [re, im] pairs");
  }
  CMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      const Json& e = j.at(static_cast<std::size_t>(r * dim + c));
      m(r, c) = {e.at(0).get<double>(), e.at(1).get<double>()};
    }
  }
  return m;
}

Json pom_to_json(const SymmetricPOM& pom) {
  Json j;
  j["kind"] = pom.kind.name();
  j["dim"] = pom.dim;
  j["K"] = pom.num_outcomes;
  j["w"] = pom.symmetry;
  if (pom.directions) {
    Json dirs = Json::array();
    for (const auto& e : *pom.directions) dirs.push_back({e.x(), e.y(), e.z()});
    j["directions"] = dirs;
  }
  Json outs = Json::array();
  for (const auto& pi : pom.outcomes) outs.push_back(matrix_to_json(pi.matrix()));
  j["outcomes"] = outs;
  Json duals = Json::array();
  for (const auto& l : pom.duals) duals.push_back(matrix_to_json(l.matrix()));
  j["duals"] = duals;
  return j;
}

SymmetricPOM pom_from_json(const Json& j) {
  SymmetricPOM pom;
  const int k = j.at("K").get<int>();
  pom.kind = PomKind::parse(j.at("kind").get<std::string>(), k);
  pom.dim = j.at("dim").get<int>();
  pom.num_outcomes = k;
  pom.symmetry = j.at("w").get<double>();
  if (j.contains("directions")) {
    std::vector<Vec3> dirs;
    for (const auto& e : j["directions"]) {
      dirs.emplace_back(e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>());
    }
    pom.directions = std::move(dirs);
  }
  if (j.contains("outcomes")) {
    for (const auto& m : j["outcomes"]) pom.outcomes.emplace_back(matrix_from_json(m, pom.dim));
  } else {
    // Compact form: rebuild the operators from the kind and directions.
    SymmetricPOM built = build_pom(pom.kind);
    if (pom.directions) {
      built.outcomes.clear();
      for (const auto& e : *pom.directions) built.outcomes.push_back(HermitianOperator::qubit(1.0 / k, e));
      built.directions = pom.directions;
      built.duals = dual_frame(built);
    }
    return built;
  }
  if (j.contains("duals")) {
    for (const auto& m : j["duals"]) pom.duals.emplace_back(matrix_from_json(m, pom.dim));
  } else {
    pom.duals = dual_frame(pom);
  }
  return pom;
}

Json report_to_json(const ValidationReport& report) {
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"max_residual", c.max_residual},
                      {"detail", c.detail}});
  }
  return {{"all_passed", report.all_passed()},
          {"max_residual", report.max_residual()},
          {"pyramid_rank", report.pyramid_rank},
          {"checks", checks}};
}

Json to_json(const ProbVector& p) { return Json(p.vec()); }

ProbVector prob_vector_from_json(const Json& j) {
  return ProbVector(j.get<std::vector<double>>());
}

Json to_json(const BlochVector& s) { return Json{s.vec().x(), s.vec().y(), s.vec().z()}; }

Json to_json(const DensityOperator& rho) { return matrix_to_json(rho.op().matrix()); }

Json estimator_to_json(const EstimatorSpec& spec) {
  Json j{{"kind", spec.kind_name()}};
  switch (spec.kind) {
    case EstimatorKind::AddBeta:
      j["beta"] = spec.beta;
      break;
    case EstimatorKind::QuantumAdmix:
      j["epsilon"] = spec.epsilon;
      j["variant_bn"] = spec.variant_bn;
      break;
    case EstimatorKind::MLQuantumEpsilon:
      j["epsilon"] = spec.epsilon;
      break;
    case EstimatorKind::MeanMC:
      j["beta"] = spec.beta;
      j["samples"] = spec.samples;
      j["seed"] = spec.seed;
      j["indicator"] = spec.indicator;
      break;
    default:
      break;
  }
  return j;
}

EstimatorSpec estimator_from_json(const Json& j) {
  EstimatorSpec spec;
  spec.kind = EstimatorSpec::parse_kind(j.at("kind").get<std::string>());
  spec.beta = j.value("beta", spec.beta);
  spec.epsilon = j.value("epsilon", spec.epsilon);
  spec.variant_bn = j.value("variant_bn", spec.variant_bn);
  spec.samples = j.value("samples", spec.samples);
  spec.seed = j.value("seed", spec.seed);
  spec.indicator = j.value("indicator", spec.indicator);
  spec.validate();
  return spec;
}

Json risk_point_to_json(const RiskPoint& pt) {
  Json j{{"p", to_json(pt.p)}, {"risk", pt.risk}};
  if (pt.bloch) j["bloch"] = {pt.bloch->x(), pt.bloch->y(), pt.bloch->z()};
  return j;
}

Json extrema_to_json(const RiskSurface& surface) {
  return {{"max", risk_point_to_json(surface.max)},
          {"min", risk_point_to_json(surface.min)},
          {"grid_points", surface.grid.size()}};
}

Json epsilon_result_to_json(const EpsilonResult& r) {
  Json trace = Json::array();
  for (const auto& p : r.trace) trace.push_back({p.epsilon, p.max_risk});
  return {{"N", r.total},
          {"epsilon_star", r.epsilon_star},
          {"max_risk_star", r.max_risk_at_star},
          {"max_risk_zero", r.max_risk_at_zero},
          {"trace", trace}};
}

Json empirical_risk_to_json(const EmpiricalRisk& r) {
  return {{"mean", r.mean}, {"std_err", r.std_err}, {"trials", r.trials}};
}

std::string CsvTable::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_number(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidArgument("not a number in CSV: '" + s + "'");
  return v;
}

}  // namespace

CsvTable CsvTable::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  CsvTable t;
  if (!std::getline(in, line)) throw InvalidArgument("empty CSV");
  t.names = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line);
    if (parts.size() != t.names.size()) throw InvalidArgument("ragged CSV row");
    std::vector<double> row;
    for (const auto& p : parts) row.push_back(parse_number(p));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<double> CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) {
      std::vector<double> col;
      for (const auto& r : rows) col.push_back(r[i]);
      return col;
    }
  }
  throw InvalidArgument("no CSV column '" + name + "'");
}

CsvTable surface_to_csv(const RiskSurface& surface, const SymmetricPOM& pom) {
  CsvTable t;
  if (pom.directions) {
    t.names = {"sx", "sy", "sz", "risk"};
    for (const auto& pt : surface.grid) {
      t.rows.push_back({pt.bloch->x(), pt.bloch->y(), pt.bloch->z(), pt.risk});
    }
  } else {
    for (int k = 0; k < pom.num_outcomes; ++k) t.names.push_back("p" + std::to_string(k + 1));
    t.names.push_back("risk");
    for (const auto& pt : surface.grid) {
      std::vector<double> row(pt.p.vec());
      row.push_back(pt.risk);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

CsvTable epsilon_results_to_csv(const std::vector<EpsilonResult>& results) {
  CsvTable t;
  t.names = {"N", "epsilon_star", "max_risk_star", "max_risk_zero"};
  for (const auto& r : results) {
    t.rows.push_back({double(r.total), r.epsilon_star, r.max_risk_at_star, r.max_risk_at_zero});
  }
  return t;
}

}  // namespace qmm

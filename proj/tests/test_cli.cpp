#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qminimax/cli.hpp"
#include "qminimax/errors.hpp"
#include "qminimax/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qmm;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_command(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("validate-pom reports all checks passing") {
  for (std::string kind : {"tetrahedron", "trine", "von_neumann"}) {
    const Run r = run({"validate-pom", "--kind", kind});
    CHECK(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j["all_passed"] == true);
    CHECK(j["max_residual"].get<double>() < 1e-12);
  }
  const Run die = run({"validate-pom", "--kind", "die", "--sides", "6"});
  CHECK(die.code == 0);
}

TEST_CASE("estimate reproduces the admix example") {
  const Run r = run({"estimate", "--counts", "4,0,0,0", "--estimator", "quantum_minimax",
                     "--epsilon", "0"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(std::abs(j["lambda"].get<double>() - 0.5) < 1e-12);
  const auto p = j["p_hat"].get<std::vector<double>>();
  REQUIRE(p.size() == 4);
  CHECK(std::abs(p[0] - 0.5) < 1e-12);
  for (int k = 1; k < 4; ++k) CHECK(std::abs(p[k] - 1.0 / 6.0) < 1e-12);
  CHECK(j["physical"] == true);
  // The estimator block decodes back to the same spec.
  const EstimatorSpec spec = estimator_from_json(j["estimator"]);
  CHECK(spec.kind == EstimatorKind::QuantumAdmix);
  CHECK(spec.epsilon == 0.0);
}

TEST_CASE("empty counts exit with a numeric error") {
  const Run r = run({"estimate", "--counts", "0,0,0,0", "--estimator", "quantum_minimax"});
  CHECK(r.code == 2);
  CHECK(r.err.find("empty data") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"estimate"}).code == 1);
  CHECK(run({"risk", "--N", "x"}).code == 1);
  CHECK(run({"validate-pom", "--format", "xml"}).code == 1);
  const Run bad_kind = run({"validate-pom", "--kind", "cube"});
  CHECK(bad_kind.code == 2);
}

TEST_CASE("pom JSON round-trips") {
  const Run r = run({"validate-pom", "--kind", "tetrahedron"});
  const SymmetricPOM pom = pom_from_json(Json::parse(r.out)["pom"]);
  const SymmetricPOM ref = build_pom(PomKind::tetrahedron());
  REQUIRE(pom.num_outcomes == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK((pom.outcomes[k].matrix() - ref.outcomes[k].matrix()).norm() < 1e-15);
    CHECK((pom.duals[k].matrix() - ref.duals[k].matrix()).norm() < 1e-15);
  }
  CHECK(validate_spom(pom).all_passed());
}

TEST_CASE("risk matches the constant minimax risk") {
  const Run r = run({"risk", "--estimator", "classical_minimax", "--bloch", "0.2,0.1,-0.4",
                     "--N", "9"});
  REQUIRE(r.code == 0);
  // Prefactor 6 times 3 / (4 (1 + 3)^2).
  CHECK(std::abs(Json::parse(r.out)["risk"].get<double>() - 6.0 * 3.0 / 64.0) < 1e-12);
}

TEST_CASE("risk-scan CSV round-trips") {
  const Run r = run({"risk-scan", "--estimator", "quantum_minimax", "--epsilon", "0.05", "--N",
                     "3", "--radii", "3", "--directions", "6", "--no-refine", "--format", "csv"});
  REQUIRE(r.code == 0);
  const CsvTable t = CsvTable::parse(r.out);
  CHECK(t.names == std::vector<std::string>{"sx", "sy", "sz", "risk"});
  CHECK(t.rows.size() == 19);
  CHECK(t.to_csv() == r.out);
  CHECK(r.out.find('\r') == std::string::npos);

  const Run j = run({"risk-scan", "--estimator", "quantum_minimax", "--N", "3", "--radii", "2",
                     "--directions", "4"});
  REQUIRE(j.code == 0);
  const Json parsed = Json::parse(j.out);
  CHECK(parsed["max"]["risk"].get<double>() >= parsed["min"]["risk"].get<double>());
  CHECK(Json::parse(parsed.dump()) == parsed);
}

TEST_CASE("optimize-epsilon writes CSV to --out") {
  const auto path = std::filesystem::temp_directory_path() / "qmm_test_eps.csv";
  std::filesystem::remove(path);
  const Run r = run({"optimize-epsilon", "--N", "2..3", "--radii", "3", "--directions", "6",
                     "--coarse", "4", "--out", path.string()});
  REQUIRE(r.code == 0);
  const CsvTable t = CsvTable::parse(slurp(path));
  CHECK(t.names ==
        std::vector<std::string>{"N", "epsilon_star", "max_risk_star", "max_risk_zero"});
  CHECK(t.column("N") == std::vector<double>{2.0, 3.0});
  for (const auto& row : t.rows) {
    CHECK(row[1] >= 0.0);
    CHECK(row[1] <= 0.25);
    CHECK(row[2] <= row[3] + 1e-12);
  }
  std::filesystem::remove(path);
}

TEST_CASE("simulate is reproducible under --seed") {
  const std::vector<std::string> args{"simulate", "--estimator", "classical_minimax",
                                      "--true-probs", "0.1,0.2,0.3,0.4", "--N", "10",
                                      "--trials", "2000", "--seed", "42"};
  const Run a = run(args);
  const Run b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const Json j = Json::parse(a.out);
  CHECK(j["trials"] == 2000);
  CHECK(std::abs(j["mean"].get<double>() - 6.0 * 3.0 / (4.0 * std::pow(1 + std::sqrt(10.0), 2))) <
        4 * j["std_err"].get<double>());
}

TEST_CASE("fig1 at N = 1 is the identity line") {
  const Run r = run({"figures", "--figure", "fig1", "--N", "1,5", "--points", "11"});
  REQUIRE(r.code == 0);
  const CsvTable t = CsvTable::parse(r.out);
  const auto p = t.column("p");
  const auto l1 = t.column("L_1");
  const auto l5 = t.column("L_5");
  REQUIRE(p.size() == 11);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(l1[i] == p[i]);
    CHECK(std::abs(l5[i] - std::pow(p[i], 5)) < 1e-15);
  }
  CHECK(l5.back() == 1.0);
}

TEST_CASE("fig2 is bitwise reproducible") {
  const std::vector<std::string> args{"figures", "--figure", "fig2", "--N", "1,2",
                                      "--radii", "4", "--directions", "12", "--coarse", "4"};
  const Run a = run(args);
  const Run b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const CsvTable t = CsvTable::parse(a.out);
  CHECK(t.column("N") == std::vector<double>{1.0, 2.0});
  // The maximally mixed state alone has ML risk 1/2 at N = 1.
  CHECK(t.column("ml_exact_max")[0] >= 0.5);
  for (const auto& row : t.rows) {
    for (double v : row) CHECK(std::isfinite(v));
  }
}

TEST_CASE("fig3 columns") {
  const Run r = run({"figures", "--figure", "fig3", "--N", "2", "--radii", "3", "--directions",
                     "6", "--coarse", "4", "--format", "json"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j.dump().find("eps_admix") != std::string::npos);
  CHECK(j.dump().find("eps_ml") != std::string::npos);
}

TEST_CASE("figures refuse N past the enumeration guard") {
  const Run r = run({"figures", "--figure", "fig2", "--N", "100000"});
  CHECK(r.code == 2);
}

TEST_CASE("N list parsing") {
  CHECK(parse_n_list("4") == std::vector<int>{4});
  CHECK(parse_n_list("1,2,5") == std::vector<int>{1, 2, 5});
  CHECK(parse_n_list("3..6") == std::vector<int>{3, 4, 5, 6});
  CHECK_THROWS_AS(parse_n_list("6..3"), InvalidArgument);
  CHECK_THROWS_AS(parse_n_list("a,b"), InvalidArgument);
  CHECK_THROWS_AS(parse_n_list(""), InvalidArgument);
}

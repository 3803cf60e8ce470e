#include "qminimax/cli.hpp"

#include "qminimax/errors.hpp"
#include "qminimax/figures.hpp"
#include "qminimax/minimax.hpp"
#include "qminimax/risk.hpp"
#include "qminimax/serialize.hpp"
#include "qminimax/simulator.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace qmm {

std::vector<int> parse_n_list(const std::string& text) {
  auto to_int = [](const std::string& s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw InvalidArgument("bad integer '" + s + "' in N list");
    }
    return v;
  };
  std::vector<int> ns;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots));
    const int hi = to_int(text.substr(dots + 2));
    if (lo > hi) throw InvalidArgument("empty N range '" + text + "'");
    for (int n = lo; n <= hi; ++n) ns.push_back(n);
    return ns;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) ns.push_back(to_int(item));
  if (ns.empty()) throw InvalidArgument("empty N list");
  return ns;
}

namespace {

struct Globals {
  std::string out_path;
  std::string format;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

struct PomOpts {
  std::string kind = "tetrahedron";
  int sides = 6;

  SymmetricPOM build() const {
    const bool die = kind == "die" || kind == "coin";
    return build_pom(PomKind::parse(kind, die ? sides : 0));
  }
};

struct EstimatorOpts {
  std::string kind = "classical_minimax";
  double beta = 1.0;
  double epsilon = 0.0;
  bool variant_bn = false;
  std::int64_t samples = 100000;
  bool indicator = false;

  EstimatorSpec spec(const Globals& g) const {
    EstimatorSpec s;
    s.kind = EstimatorSpec::parse_kind(kind);
    s.beta = beta;
    s.epsilon = epsilon;
    s.variant_bn = variant_bn;
    s.samples = samples;
    s.indicator = indicator;
    if (g.seed) s.seed = *g.seed;
    s.validate();
    return s;
  }
};

struct StateOpts {
  std::vector<double> bloch;
  std::vector<double> probs;
  bool mixed = false;

  ProbVector build(const SymmetricPOM& pom) const {
    const int given = int(!bloch.empty()) + int(!probs.empty()) + int(mixed);
    if (given != 1) {
      throw InvalidArgument("give exactly one of --bloch, --probs/--true-probs, --mixed");
    }
    if (mixed) return ProbVector::uniform(pom.num_outcomes);
    if (!probs.empty()) {
      if (int(probs.size()) != pom.num_outcomes) {
        throw InvalidArgument("--probs needs " + std::to_string(pom.num_outcomes) + " values");
      }
      return ProbVector(probs);
    }
    if (bloch.size() != 3) throw InvalidArgument("--bloch needs three components");
    if (!pom.directions) throw InvalidArgument("--bloch needs a qubit POM");
    const BlochVector s(bloch[0], bloch[1], bloch[2]);
    if (!s.physical()) throw InvalidArgument("Bloch vector lies outside the unit ball");
    return qubit_probs(s.vec(), pom);
  }
};

void add_pom_options(CLI::App* app, PomOpts& o) {
  app->add_option("--pom,--kind", o.kind, "von_neumann | trine | tetrahedron | die | coin")
      ->capture_default_str();
  app->add_option("--sides", o.sides, "number of die faces")->capture_default_str();
}

void add_estimator_options(CLI::App* app, EstimatorOpts& o) {
  app->add_option("--estimator", o.kind,
                  "ml_classical | add_beta | classical_minimax | quantum_minimax | "
                  "ml_quantum_exact | ml_quantum_epsilon | mean_mc")
      ->capture_default_str();
  app->add_option("--beta", o.beta)->capture_default_str();
  app->add_option("--epsilon", o.epsilon)->capture_default_str();
  app->add_flag("--variant-bn", o.variant_bn, "use b_N = sqrt(1 - 4 eps)");
  app->add_option("--samples", o.samples)->capture_default_str();
  app->add_flag("--indicator", o.indicator, "restrict mean_mc to physical states");
}

void add_state_options(CLI::App* app, StateOpts& o) {
  app->add_option("--bloch", o.bloch, "x,y,z")->delimiter(',');
  app->add_option("--probs,--true-probs", o.probs, "p1,p2,...")->delimiter(',');
  app->add_flag("--mixed", o.mixed, "maximally mixed state");
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

class Emitter {
 public:
  Emitter(const Globals& g, std::ostream& out) : g_(g), out_(out) {}

  /// Explicit --format wins; otherwise a .csv output path selects CSV.
  bool csv(bool prefer_csv = false) const {
    if (!g_.format.empty()) return g_.format == "csv";
    if (!g_.out_path.empty()) return ends_with(g_.out_path, ".csv");
    return prefer_csv;
  }

  void write(const std::string& text) const {
    if (g_.out_path.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(g_.out_path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot open output file '" + g_.out_path + "'");
    f << text;
  }

  void json(const Json& j) const { write(j.dump(2) + "\n"); }
  void table(const CsvTable& t) const { write(t.to_csv()); }

 private:
  const Globals& g_;
  std::ostream& out_;
};

Json table_to_json(const CsvTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json obj;
    for (std::size_t i = 0; i < t.names.size(); ++i) obj[t.names[i]] = r[i];
    rows.push_back(obj);
  }
  return rows;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimax qubit tomography estimators and exact risk"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out_path, "write output to this file");
  app.add_option("--format", g.format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", g.threads, "OpenMP threads (0 keeps the default)")
      ->check(CLI::NonNegativeNumber);
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "random seed");
  app.fallthrough();

  // validate-pom
  PomOpts vp_pom;
  auto* vp = app.add_subcommand("validate-pom", "check the frame identities of a POM");
  add_pom_options(vp, vp_pom);

  // estimate
  PomOpts es_pom;
  EstimatorOpts es_est;
  std::vector<int> es_counts;
  auto* es = app.add_subcommand("estimate", "apply an estimator to detector counts");
  add_pom_options(es, es_pom);
  add_estimator_options(es, es_est);
  es->add_option("--counts", es_counts, "n1,n2,...")->delimiter(',')->required();

  // risk
  PomOpts rk_pom;
  EstimatorOpts rk_est;
  StateOpts rk_state;
  int rk_n = 10;
  auto* rk = app.add_subcommand("risk", "exact mean squared error at one state");
  add_pom_options(rk, rk_pom);
  add_estimator_options(rk, rk_est);
  add_state_options(rk, rk_state);
  rk->add_option("--N", rk_n, "number of copies")->capture_default_str();

  // risk-scan
  PomOpts rs_pom;
  EstimatorOpts rs_est;
  int rs_n = 10;
  GridSpec rs_grid;
  bool rs_no_refine = false;
  auto* rs = app.add_subcommand("risk-scan", "risk over a state grid with its extrema");
  add_pom_options(rs, rs_pom);
  add_estimator_options(rs, rs_est);
  rs->add_option("--N", rs_n)->capture_default_str();
  rs->add_option("--radii", rs_grid.radii)->capture_default_str();
  rs->add_option("--directions", rs_grid.directions)->capture_default_str();
  rs->add_option("--resolution", rs_grid.simplex_resolution, "simplex lattice resolution")
      ->capture_default_str();
  rs->add_flag("--no-refine", rs_no_refine, "skip Nelder-Mead refinement");

  // optimize-epsilon
  std::string oe_family = "quantum_minimax";
  std::string oe_n = "4";
  EpsilonSearchSpec oe_spec;
  auto* oe = app.add_subcommand("optimize-epsilon", "minimax search over epsilon");
  oe->add_option("--family", oe_family, "quantum_minimax | ml_quantum_epsilon")
      ->capture_default_str();
  oe->add_option("--N", oe_n, "N list (a,b,c) or range (a..b)")->capture_default_str();
  oe->add_option("--coarse", oe_spec.coarse_points)->capture_default_str();
  oe->add_option("--tol", oe_spec.tolerance)->capture_default_str();
  oe->add_option("--radii", oe_spec.grid.radii)->capture_default_str();
  oe->add_option("--directions", oe_spec.grid.directions)->capture_default_str();
  oe->add_flag("--variant-bn", oe_spec.variant_bn);

  // simulate
  PomOpts sm_pom;
  EstimatorOpts sm_est;
  StateOpts sm_state;
  SimConfig sm_config;
  auto* sm = app.add_subcommand("simulate", "Monte Carlo estimate of the risk");
  add_pom_options(sm, sm_pom);
  add_estimator_options(sm, sm_est);
  add_state_options(sm, sm_state);
  sm->add_option("--N", sm_config.total)->capture_default_str();
  sm->add_option("--trials", sm_config.trials)->capture_default_str();

  // figures
  std::string fg_id;
  std::string fg_n;
  FigureParams fg_params;
  auto* fg = app.add_subcommand("figures", "emit figure data");
  fg->add_option("--figure", fg_id, "fig1 | fig2 | fig3")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
  fg->add_option("--N", fg_n, "N list (a,b,c) or range (a..b)");
  fg->add_option("--points", fg_params.p_points, "p grid size for fig1")->capture_default_str();
  fg->add_option("--coarse", fg_params.search.coarse_points)->capture_default_str();
  fg->add_option("--radii", fg_params.search.grid.radii)->capture_default_str();
  fg->add_option("--directions", fg_params.search.grid.directions)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 1;
  }

  if (*seed_opt) g.seed = seed_value;
  if (g.threads > 0) omp_set_num_threads(g.threads);
  const Emitter emit(g, out);

  try {
    if (*vp) {
      const SymmetricPOM pom = vp_pom.build();
      const ValidationReport report = validate_spom(pom);
      Json j = report_to_json(report);
      j["pom"] = pom_to_json(pom);
      if (emit.csv()) {
        CsvTable t;
        t.names = {"passed", "max_residual"};
        for (const auto& c : report.checks) t.rows.push_back({c.passed ? 1.0 : 0.0, c.max_residual});
        emit.table(t);
      } else {
        emit.json(j);
      }
      return report.all_passed() ? 0 : 2;
    }

    if (*es) {
      const SymmetricPOM pom = es_pom.build();
      const EstimatorSpec spec = es_est.spec(g);
      const CountVector counts(es_counts);
      if (counts.size() != pom.num_outcomes) {
        throw InvalidArgument("--counts needs " + std::to_string(pom.num_outcomes) + " values");
      }
      Json j{{"estimator", estimator_to_json(spec)}, {"counts", es_counts}};
      ProbVector p_hat;
      if (spec.kind == EstimatorKind::QuantumAdmix) {
        const AdmixResult r = quantum_minimax_admix(counts, spec.epsilon, spec.variant_bn);
        p_hat = r.p_hat;
        j["lambda"] = r.lambda;
      } else if (spec.kind == EstimatorKind::MeanMC) {
        const MeanMcResult r =
            estimate_mean_mc(counts, spec.beta, spec.samples, spec.seed, spec.indicator);
        p_hat = r.p_hat;
        j["std_err"] = r.std_err;
        j["acceptance_rate"] = r.acceptance_rate;
      } else {
        p_hat = estimate(spec, counts);
      }
      j["p_hat"] = to_json(p_hat);
      if (pom.informationally_complete()) {
        const PhysicalityResult phys = check_physical(p_hat, pom);
        j["physical"] = phys.physical;
        j["min_eigenvalue"] = phys.min_eig;
        if (pom.dim == 2) j["bloch"] = to_json(reconstruct_state(p_hat, pom).bloch());
      }
      if (emit.csv()) {
        CsvTable t;
        for (int k = 0; k < p_hat.size(); ++k) t.names.push_back("p" + std::to_string(k + 1));
        t.rows.push_back(p_hat.vec());
        emit.table(t);
      } else {
        emit.json(j);
      }
      return 0;
    }

    if (*rk) {
      const SymmetricPOM pom = rk_pom.build();
      const EstimatorSpec spec = rk_est.spec(g);
      const ProbVector p = rk_state.build(pom);
      const double risk = risk_exact(spec, p, pom, rk_n);
      if (emit.csv()) {
        emit.table(CsvTable{{"N", "risk"}, {{double(rk_n), risk}}});
      } else {
        emit.json({{"estimator", estimator_to_json(spec)},
                   {"N", rk_n},
                   {"p", to_json(p)},
                   {"risk", risk}});
      }
      return 0;
    }

    if (*rs) {
      const SymmetricPOM pom = rs_pom.build();
      const EstimatorSpec spec = rs_est.spec(g);
      if (rs_no_refine) rs_grid.refine = false;
      const RiskSurface surface = risk_extrema(spec, pom, rs_n, rs_grid);
      if (emit.csv()) {
        emit.table(surface_to_csv(surface, pom));
      } else {
        Json j = extrema_to_json(surface);
        j["estimator"] = estimator_to_json(spec);
        j["N"] = rs_n;
        emit.json(j);
      }
      return 0;
    }

    if (*oe) {
      const EpsilonFamily family = parse_epsilon_family(oe_family);
      std::vector<EpsilonResult> results;
      for (int n : parse_n_list(oe_n)) results.push_back(optimize_epsilon(family, n, oe_spec));
      if (emit.csv()) {
        emit.table(epsilon_results_to_csv(results));
      } else {
        Json arr = Json::array();
        for (const auto& r : results) arr.push_back(epsilon_result_to_json(r));
        emit.json({{"family", family_name(family)}, {"results", arr}});
      }
      return 0;
    }

    if (*sm) {
      const SymmetricPOM pom = sm_pom.build();
      const EstimatorSpec spec = sm_est.spec(g);
      const ProbVector p = sm_state.build(pom);
      if (g.seed) sm_config.seed = *g.seed;
      const EmpiricalRisk r = empirical_risk(spec, p, pom, sm_config);
      if (emit.csv()) {
        emit.table(CsvTable{{"mean", "std_err", "trials"}, {{r.mean, r.std_err, double(r.trials)}}});
      } else {
        emit.json(empirical_risk_to_json(r));
      }
      return 0;
    }

    if (*fg) {
      if (!fg_n.empty()) fg_params.n_values = parse_n_list(fg_n);
      const FigureTable t = emit_figure_data(fg_id, fg_params);
      if (emit.csv(true)) {
        emit.table(t.to_csv_table());
      } else {
        emit.json({{"figure_id", t.figure_id}, {"rows", table_to_json(t.to_csv_table())}});
      }
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace qmm

#include "irgnh/experiments.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "irgnh/elliptic.hpp"
#include "irgnh/lemmas.hpp"
#include "irgnh/rates.hpp"
#include "irgnh/svg_plot.hpp"

#ifndef IRGNH_VERSION
#define IRGNH_VERSION "0.0.0"
#endif

namespace irgnh {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view version_string() { return IRGNH_VERSION; }

std::vector<Index> read_mask_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open observation mask '" + path.string() + "'");
  std::vector<Index> nodes;
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      long long v = -1;
      try {
        v = std::stoll(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || v < 0) throw ConfigError("observation mask: bad node index '" + tok + "'");
      nodes.push_back(static_cast<Index>(v));
    }
  }
  if (nodes.empty()) throw ConfigError("observation mask '" + path.string() + "' lists no nodes");
  return nodes;
}

namespace {

// Collects output files and writes manifest.json on destruction, so a
// manifest exists even when a command bails out early.
class Artifacts {
 public:
  Artifacts(const ExperimentConfig& config, Command command)
      : config_(config), start_(std::chrono::steady_clock::now()) {
    fs::create_directories(config.output.directory);
    manifest_ = json{{"command", to_string(command)},
                     {"config_hash", config.sha256},
                     {"seed", config.noise.seed},
                     {"version", version_string()},
                     {"started_at", timestamp()},
                     {"files", json::array()}};
  }
  Artifacts(const Artifacts&) = delete;
  Artifacts& operator=(const Artifacts&) = delete;

  ~Artifacts() {
    try {
      finish();
    } catch (...) {
    }
  }

  json& manifest() { return manifest_; }

  void grid(const std::string& name, const GridFunction& v) {
    if (!config_.output.wants("csv")) return;
    write_csv(v, path(name));
    record(name);
  }

  template <class Writer>
  void csv(const std::string& name, Writer writer) {
    if (!config_.output.wants("csv")) return;
    std::ofstream out(path(name));
    writer(out);
    record(name);
  }

  void json_file(const std::string& name, const json& j) {
    if (!config_.output.wants("json")) return;
    std::ofstream(path(name)) << std::setw(2) << j << '\n';
    record(name);
  }

  void svg(const std::string& name, const std::string& doc) {
    if (!config_.output.wants("svg")) return;
    std::ofstream(path(name)) << doc;
    record(name);
  }

  void set_exit_code(int code) { manifest_["exit_code"] = code; }

  void finish() {
    if (finished_) return;
    finished_ = true;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    manifest_["wall_time_seconds"] = wall;
    std::ofstream(path("manifest.json")) << std::setw(2) << manifest_ << '\n';
  }

 private:
  fs::path path(const std::string& name) const { return config_.output.directory / name; }
  void record(const std::string& name) { manifest_["files"].push_back(name); }

  static std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
  }

  const ExperimentConfig& config_;
  std::chrono::steady_clock::time_point start_;
  json manifest_;
  bool finished_ = false;
};

json noise_json(const NoiseSpec& n) {
  return json{{"kind", to_string(n.kind)}, {"fraction", n.fraction}, {"relative_amplitude", n.relative_amplitude},
              {"sigma", n.sigma},          {"amplitude", n.amplitude}, {"seed", n.seed}};
}

json delta_json(const std::map<double, double>& deltas) {
  json out = json::object();
  for (const auto& [r, d] : deltas) {
    std::ostringstream key;
    key << r;
    out[key.str()] = d;
  }
  return out;
}

PdeProblem make_pde(const ExperimentConfig& cfg) {
  Observation obs = Observation::full_interior();
  if (cfg.problem.observation_mask_path) obs = Observation::mask(read_mask_file(*cfg.problem.observation_mask_path));
  try {
    return PdeProblem::make(*cfg.problem.n, cfg.problem.f_const, cfg.problem.g_const, cfg.problem.c_bar, std::move(obs));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("problem: ") + ex.what());
  }
}

// Model, truth, start and exact data for the configured problem kind.
struct InverseSetup {
  std::unique_ptr<ForwardModel> model;
  GridFunction x0;
  GridFunction truth;
  GridFunction y;
  json info;
};

InverseSetup make_setup(const ExperimentConfig& cfg) {
  InverseSetup s;
  switch (cfg.problem.kind) {
    case ProblemKind::Elliptic: {
      auto model = std::make_unique<EllipticModel>(make_pde(cfg));
      s.truth = coscos_coefficient(*cfg.problem.n, cfg.problem.xi);
      s.x0 = GridFunction(s.truth.space(), 1.0);
      s.y = model->evaluate(s.truth);
      s.model = std::move(model);
      s.info = json{{"kind", "elliptic"}, {"n", *cfg.problem.n}, {"xi", cfg.problem.xi}, {"c_bar", cfg.problem.c_bar}};
      break;
    }
    case ProblemKind::Diagonal: {
      const DiagonalBenchmark b = build_source_exact_benchmark(*cfg.problem.n, *cfg.method.p, cfg.problem.spectrum_decay,
                                                               cfg.problem.v_norm, *cfg.method.r);
      s.model = std::make_unique<DiagonalLinearModel>(b.spectrum);
      s.truth = b.x_true;
      s.x0 = b.x0;
      s.y = b.exact_data();
      s.info = json{{"kind", "diagonal"},
                    {"n", *cfg.problem.n},
                    {"spectrum_decay", cfg.problem.spectrum_decay},
                    {"v_norm", cfg.problem.v_norm}};
      break;
    }
    case ProblemKind::Scalar: {
      const Space space = Space::flat(1);
      s.model = std::make_unique<PointwiseQuadraticModel>(space, cfg.problem.curvature);
      s.truth = GridFunction(space, cfg.problem.x_true);
      s.x0 = GridFunction(space, cfg.problem.x_start);
      s.y = s.model->evaluate(s.truth);
      s.info = json{{"kind", "scalar"}, {"curvature", cfg.problem.curvature}, {"x_true", cfg.problem.x_true},
                    {"x_start", cfg.problem.x_start}};
      break;
    }
  }
  return s;
}

json schedule_json(const Schedule& sch) {
  if (sch.mode == ScheduleMode::Constant)
    return json{{"mode", "constant"}, {"alpha_floor", sch.alpha_floor}, {"beta_floor", sch.beta_floor}};
  return json{{"mode", "geometric"}, {"alpha0", sch.alpha0}, {"q", sch.q}, {"s", sch.s}};
}

json window_json(const WindowAudit& a) {
  if (!a.applicable) return json{{"applicable", false}};
  return json{{"applicable", true},
              {"m", a.m},
              {"M", a.M},
              {"holds", a.holds},
              {"first_violation", a.first_violation},
              {"worst_lower_ratio", a.worst_lower_ratio},
              {"worst_upper_ratio", a.worst_upper_ratio}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string error_plot(const std::string& title, const std::vector<std::pair<std::string, const std::vector<IterationRecord>*>>& runs) {
  std::vector<svg::Series> series;
  for (const auto& [label, recs] : runs) {
    svg::Series s{label, {}, {}, true, true};
    for (const auto& r : *recs) {
      s.x.push_back(r.k);
      s.y.push_back(r.error_x);
    }
    series.push_back(std::move(s));
  }
  return svg::plot(svg::Axes{title, "iteration k", "error", false, true}, series);
}

int status_exit_code(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return exit_code::kSuccess;
    case RunStatus::Diverged: return exit_code::kDivergence;
    case RunStatus::SubproblemFailed: return exit_code::kNumericalFailure;
  }
  return exit_code::kNumericalFailure;
}

}  // namespace

int cmd_forward(const ExperimentConfig& cfg, std::ostream& log) {
  Artifacts out(cfg, Command::Forward);
  const PdeProblem problem = make_pde(cfg);
  const GridFunction c_true = coscos_coefficient(problem.n, cfg.problem.xi);
  const FactorizedState state = assemble_and_factor(problem, c_true);
  const GridFunction y = problem.observation.observe(state.state());
  std::vector<double> norms{1.0, 1.1, 2.0};
  if (cfg.method.r) norms.push_back(*cfg.method.r);
  const PerturbedData data = perturb(y, cfg.noise, norms);

  out.grid("c_true.csv", c_true);
  out.grid("u.csv", state.state());
  out.grid("y.csv", y);
  out.grid("y_delta.csv", data.y_delta);
  out.manifest()["problem"] = {{"n", problem.n}, {"f_const", cfg.problem.f_const}, {"g_const", cfg.problem.g_const},
                               {"c_bar", cfg.problem.c_bar}, {"xi", cfg.problem.xi},
                               {"observation", problem.observation.is_full() ? "full" : "mask"},
                               {"observed_nodes", y.size()}};
  out.manifest()["noise"] = noise_json(cfg.noise);
  out.manifest()["delta_by_norm"] = delta_json(data.delta_by_norm);
  out.manifest()["pde_residual"] = state.pde_residual();
  log << "forward: n = " << problem.n << ", PDE residual " << state.pde_residual() << ", max|y| "
      << y.values().cwiseAbs().maxCoeff() << '\n';
  out.set_exit_code(exit_code::kSuccess);
  return exit_code::kSuccess;
}

int cmd_invert(const ExperimentConfig& cfg, std::ostream& log) {
  Artifacts out(cfg, Command::Invert);
  InverseSetup setup = make_setup(cfg);
  const double r = *cfg.method.r;
  const PerturbedData data = perturb(setup.y, cfg.noise, {r});

  RunConfig rc = cfg.run_config(setup.x0);
  rc.truth = setup.truth;
  rc.delta = data.delta_by_norm.at(r);
  const RunResult res = run(*setup.model, data.y_delta, rc);
  const int code = status_exit_code(res.status);

  out.csv("iterations.csv", [&](std::ostream& os) { write_records_csv(res.records, os); });
  out.grid("final.csv", res.final_x);
  const IterationRecord& last = res.records.back();
  const WindowAudit audit = audit_window(rc.schedule, rc.exponents.p(), static_cast<int>(res.records.size()) - 1);
  json summary{{"status", to_string(res.status)},
               {"message", res.message},
               {"method", to_string(rc.method)},
               {"p", rc.exponents.p()},
               {"r", r},
               {"regime", to_string(rc.exponents.regime())},
               {"delta", rc.delta},
               {"k_star", res.k_star ? json(*res.k_star) : json(nullptr)},
               {"records", res.records.size()},
               {"linearizations", res.linearizations},
               {"final_error", finite_or_null(last.error_x)},
               {"final_residual", finite_or_null(last.residual)},
               {"schedule", schedule_json(rc.schedule)},
               {"window", window_json(audit)},
               {"problem", setup.info}};
  out.json_file("summary.json", summary);
  out.svg("errors.svg", error_plot("error vs iteration", {{std::string(to_string(rc.method)), &res.records}}));
  out.manifest()["summary"] = summary;
  out.manifest()["noise"] = noise_json(cfg.noise);
  log << "invert: " << to_string(res.status) << ", " << res.records.size() << " records, final error "
      << last.error_x << '\n';
  if (!res.message.empty()) log << "  " << res.message << '\n';
  out.set_exit_code(code);
  return code;
}

int cmd_rates(const ExperimentConfig& cfg, std::ostream& log) {
  Artifacts out(cfg, Command::Rates);
  json summary;

  if (cfg.problem.kind == ProblemKind::Scalar) {
    ScalarOrderSetup s;
    s.curvature = cfg.problem.curvature;
    s.x_true = cfg.problem.x_true;
    s.x_start = cfg.problem.x_start;
    s.alpha = cfg.method.alpha_floor;
    s.beta = cfg.method.beta_floor;
    s.iterations = cfg.method.max_iters;
    s.solver = cfg.method.solver;
    const OrderReport halley = scalar_order_study(Method::Halley, s);
    const OrderReport irgnm = scalar_order_study(Method::Irgnm, s);
    auto order_json = [](const OrderReport& r) {
      return json{{"errors", r.errors}, {"order", r.order ? json(*r.order) : json(nullptr)}, {"status", to_string(r.status)}};
    };
    const bool ordered = halley.order && irgnm.order && *halley.order > *irgnm.order;
    summary = json{{"kind", "scalar_order"},
                   {"halley", order_json(halley)},
                   {"irgnm", order_json(irgnm)},
                   {"halley_faster", ordered}};
    out.csv("orders.csv", [&](std::ostream& os) {
      os << std::setprecision(17) << "k,error_halley,error_irgnm\n";
      const std::size_t n = std::max(halley.errors.size(), irgnm.errors.size());
      for (std::size_t k = 0; k < n; ++k) {
        os << k << ',';
        if (k < halley.errors.size()) os << halley.errors[k];
        os << ',';
        if (k < irgnm.errors.size()) os << irgnm.errors[k];
        os << '\n';
      }
    });
    std::vector<svg::Series> series{{"halley", {}, halley.errors, true, true}, {"irgnm", {}, irgnm.errors, true, true}};
    for (auto& s2 : series)
      for (std::size_t k = 0; k < s2.y.size(); ++k) s2.x.push_back(static_cast<double>(k));
    out.svg("orders.svg", svg::plot(svg::Axes{"exact-data error, scalar model", "iteration k", "|x_k - x_true|", false, true}, series));
    log << "rates: empirical order halley " << (halley.order ? *halley.order : NAN) << ", irgnm "
        << (irgnm.order ? *irgnm.order : NAN) << '\n';
  } else {
    InverseSetup setup = make_setup(cfg);
    RateStudyConfig sc;
    sc.deltas = cfg.study.deltas;
    sc.method = cfg.method.method.value_or(Method::Halley);
    sc.second_reference = cfg.method.second_reference;
    sc.schedule = cfg.schedule();
    sc.tau = cfg.method.tau;
    sc.seed = cfg.noise.seed;
    sc.solver = cfg.method.solver;
    sc.workers = cfg.study.workers;
    const double p = *cfg.method.p;
    const double r = *cfg.method.r;
    const RateStudy study = run_rate_study(SweepProblem{setup.model.get(), setup.x0, setup.truth, setup.y, p, r}, sc);
    // Only the diagonal benchmark satisfies the source condition exactly, so
    // only there does the slope band carry a verdict.
    const bool asserted = cfg.problem.kind == ProblemKind::Diagonal;
    const double lo = study.expected_slope - 0.1;
    const double hi = study.expected_slope + 0.1;
    const bool within = study.fit.slope >= lo && study.fit.slope <= hi;
    json points = json::array();
    for (const auto& pt : study.points)
      points.push_back(json{{"delta", pt.delta}, {"k_star", pt.k_star}, {"error", pt.error}, {"status", to_string(pt.status)}});
    summary = json{{"kind", "delta_sweep"},
                   {"problem", setup.info},
                   {"method", to_string(sc.method)},
                   {"p", p},
                   {"r", r},
                   {"slope", study.fit.slope},
                   {"intercept", study.fit.intercept},
                   {"fit_residual", study.fit.residual},
                   {"expected_slope", study.expected_slope},
                   {"band", {lo, hi}},
                   {"asserted", asserted},
                   {"pass", asserted ? json(within) : json(nullptr)},
                   {"points", points}};
    if (cfg.problem.kind == ProblemKind::Diagonal) {
      const auto* diag = static_cast<const DiagonalLinearModel*>(setup.model.get());
      const SourceConditionFit sfit = source_condition_residual(diagonal_map(diag->spectrum()), setup.truth, setup.x0, p);
      summary["source_condition_residual"] = sfit.residual;
    }
    out.csv("rates.csv", [&](std::ostream& os) {
      os << std::setprecision(17) << "delta,k_star,error,local_slope,status\n";
      for (std::size_t i = 0; i < study.points.size(); ++i) {
        const auto& pt = study.points[i];
        os << pt.delta << ',' << pt.k_star << ',' << pt.error << ',';
        if (i > 0) {
          const auto& prev = study.points[i - 1];
          os << std::log(pt.error / prev.error) / std::log(pt.delta / prev.delta);
        }
        os << ',' << to_string(pt.status) << '\n';
      }
    });
    std::vector<double> ds, es;
    for (const auto& pt : study.points) {
      ds.push_back(pt.delta);
      es.push_back(pt.error);
    }
    out.svg("rates.svg", svg::loglog_fit(svg::Axes{"final error vs noise level", "delta", "error", true, true}, ds, es,
                                         study.fit.slope, study.fit.intercept));
    log << "rates: slope " << study.fit.slope << " (expected " << study.expected_slope << ")"
        << (asserted ? (within ? ", within band" : ", OUTSIDE band") : ", reported only") << '\n';
  }

  // Stopping indices of the exact-penalty rule for both methods.
  json stops = json::array();
  bool ordered = true;
  for (double p : {1.0, 1.25, 1.5, 1.75}) {
    for (int k = 3; k <= 30; ++k) {
      const double delta = std::ldexp(1.0, -k);
      const int kh = stopping_index_req1(p, delta, Method::Halley);
      const int ki = stopping_index_req1(p, delta, Method::Irgnm);
      ordered = ordered && kh <= ki;
      stops.push_back(json{{"p", p}, {"delta", delta}, {"halley", kh}, {"irgnm", ki}});
    }
  }
  summary["stopping_indices_ordered"] = ordered;
  out.csv("stopping.csv", [&](std::ostream& os) {
    os << std::setprecision(17) << "p,delta,k_halley,k_irgnm\n";
    for (const auto& s : stops) os << s["p"] << ',' << s["delta"] << ',' << s["halley"] << ',' << s["irgnm"] << '\n';
  });
  out.json_file("rates.json", summary);
  out.manifest()["summary"] = summary;
  out.set_exit_code(exit_code::kSuccess);
  return exit_code::kSuccess;
}

int cmd_compare(const ExperimentConfig& cfg, std::ostream& log) {
  Artifacts out(cfg, Command::Compare);
  CompareConfig cc;
  cc.n = *cfg.problem.n;
  cc.xi = cfg.problem.xi;
  cc.f_const = cfg.problem.f_const;
  cc.g_const = cfg.problem.g_const;
  cc.c_bar = cfg.problem.c_bar;
  cc.noise = cfg.noise;
  cc.schedule = Schedule::geometric(cfg.method.alpha0, cfg.method.q, cfg.method.s);
  cc.tau = cfg.method.tau;
  cc.r_robust = cfg.method.r.value_or(1.1);
  cc.max_iters = cfg.method.max_iters;
  cc.solver = cfg.method.solver;
  cc.method = cfg.method.method.value_or(Method::Halley);
  const CompareReport rep = compare_misfit_norms(cc);

  auto row_json = [](const CompareRow& row) {
    return json{{"r", row.r},
                {"delta", row.delta},
                {"k_star", row.k_star ? json(*row.k_star) : json(nullptr)},
                {"error", row.error},
                {"status", to_string(row.status)},
                {"message", row.message},
                {"records", row.records.size()}};
  };
  json summary{{"robust", row_json(rep.robust)},
               {"quadratic", row_json(rep.quadratic)},
               {"ratio", rep.ratio},
               {"flagged", rep.flagged},
               {"robust_better", rep.robust.error < rep.quadratic.error},
               {"schedule", schedule_json(cc.schedule)},
               {"method", to_string(cc.method)}};
  out.csv("compare.csv", [&](std::ostream& os) {
    os << std::setprecision(17) << "r,delta,k_star,error,status\n";
    for (const CompareRow* row : {&rep.robust, &rep.quadratic})
      os << row->r << ',' << row->delta << ',' << row->k_star.value_or(-1) << ',' << row->error << ','
         << to_string(row->status) << '\n';
  });
  out.grid("c_true.csv", rep.c_true);
  out.grid("y_delta.csv", rep.y_delta);
  out.grid("c_final_robust.csv", rep.robust.c_final);
  out.grid("c_final_quadratic.csv", rep.quadratic.c_final);
  out.json_file("compare.json", summary);
  std::ostringstream robust_label;
  robust_label << "r = " << rep.robust.r;
  out.svg("compare.svg", error_plot("coefficient error, impulsive noise",
                                    {{robust_label.str(), &rep.robust.records}, {"r = 2", &rep.quadratic.records}}));
  out.manifest()["summary"] = summary;
  out.manifest()["noise"] = noise_json(cfg.noise);
  log << "compare: error r=" << rep.robust.r << ": " << rep.robust.error << ", r=2: " << rep.quadratic.error
      << ", ratio " << rep.ratio << (rep.flagged ? " (flagged)" : "") << '\n';
  const int code = rep.robust.status == RunStatus::Diverged || rep.quadratic.status == RunStatus::Diverged
                       ? exit_code::kDivergence
                       : (rep.flagged ? exit_code::kNumericalFailure : exit_code::kSuccess);
  out.set_exit_code(code);
  return code;
}

int cmd_lemmas(const ExperimentConfig& cfg, std::ostream& log) {
  Artifacts out(cfg, Command::Lemmas);
  std::vector<svg::TableRow> rows;
  auto fmt = [](double v, int prec = 10) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
  };

  const CSigma c2 = c_sigma(2.0);
  const CSigma c3 = c_sigma(3.0);
  rows.push_back({"C(2)", fmt(c2.value), true});
  rows.push_back({"C(3)", fmt(c3.value), std::abs(c3.value - 1.25390626) <= 1e-6});

  RecursionParams worked{1.0, 3.0, 1.0, 0.0, 0.3535, 1.0};
  const Lemma2Certificate worked_cert = lemma2_certificate(worked, 4);
  rows.push_back({"worked instance mu_1, mu_2", fmt(worked_cert.mu[1], 4) + ", " + fmt(worked_cert.mu[2], 4),
                  worked_cert.status == CertificateStatus::Pass});

  RecursionParams boundary{1.0, 3.0, 1.0, 0.0, 0.0, 1.0};
  boundary.delta = lemma2_thresholds(1.0, 3.0, 1.0, 1.0).delta_max;
  const Lemma2Certificate boundary_cert = lemma2_certificate(boundary, 10);
  rows.push_back({"boundary probe mu0 = 0, delta = delta_bar", fmt(boundary_cert.worst_margin, 4),
                  boundary_cert.status == CertificateStatus::Pass});

  const std::uint64_t seed = cfg.noise.seed;
  const Lemma2Ensemble stated = lemma2_ensemble(cfg.lemmas.samples, seed, cfg.lemmas.k_max, Lemma2Variant::AsStated);
  const Lemma2Ensemble corrected = lemma2_ensemble(cfg.lemmas.samples, seed, cfg.lemmas.k_max, Lemma2Variant::Corrected);
  rows.push_back({"ensemble, bound as stated: failures", std::to_string(stated.failures) + " / " + std::to_string(stated.samples),
                  stated.failures == 0});
  rows.push_back({"ensemble, corrected bound: failures",
                  std::to_string(corrected.failures) + " / " + std::to_string(corrected.samples), corrected.failures == 0});

  json orders = json::array();
  for (double sigma : {2.0, 3.0}) {
    RecursionParams rp{1.0, sigma, 1.0, 0.0, 0.35, 1.0};
    const auto order = empirical_order(mu_recursion(rp, 4));
    const bool ok = order && std::abs(*order - sigma) <= 0.02 * sigma;
    orders.push_back(json{{"sigma", sigma}, {"order", order ? json(*order) : json(nullptr)}, {"pass", ok}});
    rows.push_back({"mu-recursion order, sigma = " + fmt(sigma, 2), order ? fmt(*order, 6) : "n/a", ok});
  }

  Lemma1Coefficients zero;
  Lemma1Coefficients small;
  small.a = small.d = 0.01;
  Lemma1Coefficients large = small;
  large.d = 10.0;
  const Lemma1Certificate l1_zero = lemma1_certificate(zero, 0.2, 0.2);
  const Lemma1Certificate l1_small = lemma1_certificate(small, 0.2, 0.2);
  const Lemma1Certificate l1_large = lemma1_certificate(large, 0.1, 0.2);
  rows.push_back({"implication, zero coefficients", l1_zero.pass ? "pass (vacuous)" : "fail", l1_zero.pass});
  rows.push_back({"implication, a = d = 0.01", l1_small.pass ? "pass" : "fail", l1_small.pass});
  rows.push_back({"implication, d = 10 (expected to fail)", l1_large.pass ? "pass" : "fail with witness", !l1_large.pass});

  json sigmas = json::array();
  for (double p : {1.0, 1.25, 1.5, 1.75}) {
    const SigmaFormula h = sigma_formula(p, Method::Halley);
    const SigmaFormula i = sigma_formula(p, Method::Irgnm);
    sigmas.push_back(json{{"p", p},
                          {"halley", h.sigma},
                          {"irgnm", i.sigma},
                          {"min_expression", h.min_expression ? json(*h.min_expression) : json(nullptr)}});
  }

  json summary{{"c_sigma", {{"2", {{"value", c2.value}, {"terms", c2.terms}, {"tail_bound", c2.tail_bound}}},
                            {"3", {{"value", c3.value}, {"terms", c3.terms}, {"tail_bound", c3.tail_bound}}}}},
               {"worked_instance", worked_cert},
               {"boundary_probe", boundary_cert},
               {"ensemble_as_stated", stated},
               {"ensemble_corrected", corrected},
               {"mu_orders", orders},
               {"implication", {{"zero", l1_zero}, {"small", l1_small}, {"large_d", l1_large}}},
               {"sigma", sigmas}};
  out.json_file("lemmas.json", summary);
  out.svg("lemmas.svg", svg::table("lemma certificates", rows));
  out.manifest()["summary"] = {{"C3", c3.value},
                               {"ensemble_as_stated_failures", stated.failures},
                               {"ensemble_corrected_failures", corrected.failures}};
  log << "lemmas: C(3) = " << std::setprecision(10) << c3.value << ", ensemble failures as stated "
      << stated.failures << "/" << stated.samples << ", corrected " << corrected.failures << "/"
      << corrected.samples << '\n';
  out.set_exit_code(exit_code::kSuccess);
  return exit_code::kSuccess;
}

int run_command(Command command, const CommandOptions& options, std::ostream& log) {
  ExperimentConfig cfg;
  try {
    cfg = ExperimentConfig::load(options.config_path);
    if (options.out) cfg.output.directory = *options.out;
    if (options.seed) cfg.noise.seed = *options.seed;
    if (options.workers) cfg.study.workers = *options.workers;
    cfg.validate(command);
  } catch (const ConfigError& ex) {
    log << "config error: " << ex.what() << '\n';
    return exit_code::kConfigError;
  }

  try {
    switch (command) {
      case Command::Forward: return cmd_forward(cfg, log);
      case Command::Invert: return cmd_invert(cfg, log);
      case Command::Rates: return cmd_rates(cfg, log);
      case Command::Compare: return cmd_compare(cfg, log);
      case Command::Lemmas: return cmd_lemmas(cfg, log);
    }
  } catch (const ConfigError& ex) {
    log << "config error: " << ex.what() << '\n';
    return exit_code::kConfigError;
  } catch (const std::exception& ex) {
    log << "numerical failure: " << ex.what() << '\n';
    return exit_code::kNumericalFailure;
  }
  return exit_code::kNumericalFailure;
}

}  // namespace irgnh

// Acceptance suite: one PASS/FAIL line per criterion. A FAIL that comes with
// an analysed deviation is printed with its reason and does not fail the
// process; any other FAIL does.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irgnh/banach.hpp"
#include "irgnh/elliptic.hpp"
#include "irgnh/lemmas.hpp"
#include "irgnh/rates.hpp"

using namespace irgnh;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string deviation;  // non-empty: FAIL is an analysed, documented deviation
};

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_rate(x, y).slope;
}

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

Outcome rate_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  const DiagonalBenchmark bench = build_source_exact_benchmark(32, 2.0, 6.0, 0.1, 2.0);
  RateStudyConfig cfg;
  cfg.deltas = {1e-2, 1e-3, 1e-4, 1e-5};
  cfg.method = Method::Halley;
  cfg.schedule = Schedule::geometric(1.0, 2.0, 1.0);
  cfg.seed = 20;
  cfg.workers = 4;
  const RateStudy study = run_rate_study(bench, cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool completed = true;
  for (const auto& pt : study.points) completed = completed && pt.status == RunStatus::Completed;
  Outcome o;
  o.pass = completed && study.fit.slope >= 0.4 && study.fit.slope <= 0.6 && seconds < 60.0;
  o.detail = "slope " + fmt(study.fit.slope) + " in [0.4, 0.6], runtime " + fmt(seconds, 3) + " s at n = 32";
  return o;
}

Outcome derivative_correctness() {
  const int n = 31;
  const PdeProblem problem = PdeProblem::make(n);
  const GridFunction c = coscos_coefficient(n, 0.1);
  const FactorizedState st = assemble_and_factor(problem, c);
  GridFunction h(problem.space());
  for (Index i = 0; i < h.size(); ++i) {
    const auto [x1, x2] = node_coordinates(h.space(), i);
    h[i] = std::sin(3.0 * x1) * std::cos(2.0 * x2) + 0.3;
  }
  const GridFunction v1 = solve_first(st, h);
  const GridFunction v2 = solve_second(st, h, h, v1, v1);
  std::vector<double> ts{1e-1, 3e-2, 1e-2, 3e-3, 1e-3}, r1, r2;
  for (double t : ts) {
    const GridFunction diff = assemble_and_factor(problem, c + t * h).state() - st.state() - t * v1;
    r1.push_back(lp_norm(diff, 2));
    r2.push_back(lp_norm(diff - (0.5 * t * t) * v2, 2));
  }
  const double s1 = loglog_slope(ts, r1);
  const double s2 = loglog_slope(ts, r2);
  const double adj = dot_product_test(derivative_map(st, problem.observation), 100, 31);
  Outcome o;
  o.pass = std::abs(s1 - 2.0) <= 0.2 && std::abs(s2 - 3.0) <= 0.3 && adj <= 1e-10;
  o.detail = "first-order slope " + fmt(s1) + ", second-order slope " + fmt(s2) + ", adjoint discrepancy " +
             fmt(adj, 3);
  return o;
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> size(2, 32);
  std::uniform_real_distribution<double> unif(0.05, 2.0);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = size(rng);
    const int m = size(rng);
    Eigen::MatrixXd M(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = gauss(rng) / std::sqrt(static_cast<double>(n));
    const Space dom = Space::flat(n, 1.0 / n);
    const Space ran = Space::flat(m, 1.0 / m);
    // Adjoint in the weighted pairings: (w_ran / w_dom) M^T.
    const double scale = ran.weight / dom.weight;
    const LinearMap K(
        dom, ran, [M, ran](const GridFunction& u) { return GridFunction(ran, M * u.values()); },
        [M, dom, scale](const GridFunction& w) { return GridFunction(dom, scale * (M.transpose() * w.values())); });
    GridFunction xk(dom), xr(dom), rk(ran);
    for (Index i = 0; i < n; ++i) {
      xk[i] = gauss(rng);
      xr[i] = gauss(rng);
    }
    for (Index i = 0; i < m; ++i) rk[i] = gauss(rng);
    const SubproblemSpec spec{K, xk, rk, xr, unif(rng), ExponentConfig::make(2, 2)};
    const GridFunction a = solve(spec, SolverOptions{}).x;
    const GridFunction b = solve_oracle_quadratic(spec);
    worst = std::max(worst, lp_norm(a - b, 2) / lp_norm(b, 2));
  }
  Outcome o;
  o.pass = worst <= 1e-8;
  o.detail = "20 random instances, worst relative difference " + fmt(worst, 3);
  return o;
}

Outcome lemma2_certificate_check() {
  const Lemma2Ensemble stated = lemma2_ensemble(1000, 2024, 30, Lemma2Variant::AsStated);
  const Lemma2Ensemble corrected = lemma2_ensemble(1000, 2024, 30, Lemma2Variant::Corrected);
  const double c3 = c_sigma(3.0).value;
  const Lemma2Certificate worked = lemma2_certificate(RecursionParams{1.0, 3.0, 1.0, 0.0, 0.3535, 1.0}, 4);
  const bool worked_ok = worked.status == CertificateStatus::Pass && std::abs(worked.mu[1] - 0.0442) <= 5e-5 &&
                         worked.mu[1] <= 0.125 && std::abs(worked.mu[2] - 8.63e-5) <= 5e-7 &&
                         worked.mu[2] <= std::exp2(-9);
  const bool c3_ok = std::abs(c3 - 1.25390626) <= 1e-6;

  Outcome o;
  o.pass = stated.failures == 0 && c3_ok && worked_ok;
  o.detail = "as-stated bound: " + std::to_string(stated.failures) + "/" + std::to_string(stated.samples) +
             " failures; corrected bound: " + std::to_string(corrected.failures) + "/" +
             std::to_string(corrected.samples) + " failures; C(3) = " + fmt(c3, 10) + "; worked instance mu1 = " +
             fmt(worked.mu[1], 4) + ", mu2 = " + fmt(worked.mu[2], 4);
  if (!o.pass && c3_ok && worked_ok && corrected.failures == 0) {
    o.deviation =
        "the noisy bound mu_{k+1} <= 2^(-sigma^(k+1)) + C(sigma) delta^(1/p) cannot hold once C_hat > C(sigma), since "
        "mu_1 >= C_hat delta^(1/p); the corrected bound with C_hat C(sigma) delta^(1/p) and p-th power "
        "thresholds holds on the same ensemble";
  }
  return o;
}

Outcome stopping_indices() {
  int violations = 0;
  for (double p : {1.0, 1.25, 1.5, 1.75})
    for (int k = 3; k <= 30; ++k) {
      const double delta = std::ldexp(1.0, -k);
      if (stopping_index_req1(p, delta, Method::Halley) > stopping_index_req1(p, delta, Method::Irgnm)) ++violations;
    }
  const int kh = stopping_index_req1(1.0, std::ldexp(1.0, -27), Method::Halley);
  const int ki = stopping_index_req1(1.0, std::ldexp(1.0, -27), Method::Irgnm);
  Outcome o;
  o.pass = violations == 0 && kh == 3 && ki == 5;
  o.detail = std::to_string(violations) + " ordering violations over 112 (p, delta) pairs; p = 1, delta = 2^-27: Halley " +
             std::to_string(kh) + ", IRGNM " + std::to_string(ki);
  return o;
}

Outcome empirical_orders() {
  bool mu_ok = true;
  std::string detail;
  for (double sigma : {2.0, 3.0}) {
    const auto order = empirical_order(mu_recursion(RecursionParams{1.0, sigma, 1.0, 0.0, 0.35, 1.0}, 4));
    const bool ok = order && std::abs(*order - sigma) <= 0.02 * sigma;
    mu_ok = mu_ok && ok;
    detail += "mu order (sigma " + fmt(sigma, 2) + ") " + (order ? fmt(*order, 5) : std::string("n/a")) + "; ";
  }
  const OrderReport halley = scalar_order_study(Method::Halley, ScalarOrderSetup{});
  const OrderReport irgnm = scalar_order_study(Method::Irgnm, ScalarOrderSetup{});
  const bool ordered = halley.order && irgnm.order && *halley.order > *irgnm.order;
  detail += "scalar model order Halley " + (halley.order ? fmt(*halley.order, 4) : std::string("n/a")) + " > IRGNM " +
            (irgnm.order ? fmt(*irgnm.order, 4) : std::string("n/a"));
  Outcome o;
  o.pass = mu_ok && ordered;
  o.detail = detail;
  return o;
}

CompareConfig compare_config(std::uint64_t seed) {
  CompareConfig cc;
  cc.n = 31;
  cc.noise.kind = NoiseKind::Impulsive;
  cc.noise.fraction = 0.05;
  cc.noise.relative_amplitude = 0.1;
  cc.noise.seed = seed;
  cc.schedule = Schedule::geometric(1e4, 2.0, 1.0);
  cc.r_robust = 1.1;
  return cc;
}

Outcome impulsive_comparison() {
  const CompareReport rep = compare_misfit_norms(compare_config(3));
  int wins = 0;
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const CompareReport other = compare_misfit_norms(compare_config(seed));
    if (!other.flagged && other.robust.error < other.quadratic.error) ++wins;
  }
  Outcome o;
  o.pass = !rep.flagged && rep.robust.error < rep.quadratic.error;
  o.detail = "seed 3, n = 31: error r = 1.1 " + fmt(rep.robust.error, 4) + " vs r = 2 " + fmt(rep.quadratic.error, 4) +
             " (ratio " + fmt(rep.ratio, 3) + "); other seeds: r = 1.1 smaller in " + std::to_string(wins) + "/5";
  return o;
}

Outcome discretization() {
  std::vector<double> hs, errs;
  for (int n : {15, 31, 63}) {
    hs.push_back(1.0 / (n + 1));
    errs.push_back(manufactured_max_error(n));
  }
  const double slope = loglog_slope(hs, errs);

  // Factorization reuse: every inversion run assembles once per outer iterate.
  bool counts_ok = true;
  std::string counts;
  for (Method method : {Method::Halley, Method::Irgnm}) {
    const int n = 15;
    const EllipticModel model(PdeProblem::make(n));
    const GridFunction truth = coscos_coefficient(n, 0.1);
    const GridFunction y = model.evaluate(truth);
    NoiseSpec noise;
    noise.seed = 8;
    const PerturbedData data = perturb(y, noise, {2.0});
    RunConfig rc;
    rc.method = method;
    rc.exponents = ExponentConfig::make(2, 2);
    rc.schedule = Schedule::geometric(1e4, 2.0, 1.0);
    rc.x0 = GridFunction(truth.space(), 1.0);
    rc.truth = truth;
    rc.delta = data.delta_by_norm.at(2.0);
    const long before = assembly_count();
    const RunResult res = run(model, data.y_delta, rc);
    const long assemblies = assembly_count() - before;
    const bool ok = res.k_star && assemblies == static_cast<long>(res.records.size()) &&
                    assemblies == res.linearizations && assemblies == *res.k_star + 1;
    counts_ok = counts_ok && ok;
    counts += std::string(to_string(method)) + " " + std::to_string(assemblies) + " assemblies for iterates 0.." +
              std::to_string(res.k_star.value_or(-1)) + "; ";
  }
  Outcome o;
  o.pass = std::abs(slope - 2.0) <= 0.1 && counts_ok;
  o.detail = "manufactured max-norm slope " + fmt(slope, 4) + "; " + counts;
  return o;
}

Outcome banach_primitives() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pick_p(1.0, 2.0);
  std::uniform_int_distribution<int> size(1, 50);
  std::normal_distribution<double> gauss;
  auto random_vec = [&](int n) {
    GridFunction v(Space::flat(n, 1.0 / n));
    for (Index i = 0; i < n; ++i) v[i] = gauss(rng);
    return v;
  };
  double pairing = 0.0, bregman_min = 0.0, margin_dev = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double p = pick_p(rng);
    const GridFunction v = random_vec(size(rng));
    const double norm_p = std::pow(lp_norm(v, p), p);
    pairing = std::max(pairing, std::abs(inner(duality_map(v, p), v) - norm_p) / norm_p);
  }
  for (int t = 0; t < 1000; ++t) {
    const int n = size(rng);
    bregman_min = std::min(bregman_min, bregman_shifted(random_vec(n), random_vec(n), random_vec(n), pick_p(rng)));
  }
  for (int t = 0; t < 1000; ++t) {
    const int n = size(rng);
    margin_dev = std::max(margin_dev, std::abs(coercivity_margin(random_vec(n), random_vec(n), random_vec(n), 2.0) - 0.5));
  }
  Outcome o;
  o.pass = pairing <= 1e-12 && bregman_min >= 0.0 && margin_dev <= 1e-12;
  o.detail = "pairing relative error " + fmt(pairing, 3) + ", min Bregman " + fmt(bregman_min, 3) +
             ", p = 2 margin deviation " + fmt(margin_dev, 3);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"rate reproduction", rate_reproduction},
      {"derivative correctness", derivative_correctness},
      {"subproblem oracle equivalence", oracle_equivalence},
      {"recursion certificate", lemma2_certificate_check},
      {"stopping-index inequality", stopping_indices},
      {"empirical order", empirical_orders},
      {"impulsive-noise comparison", impulsive_comparison},
      {"PDE discretization", discretization},
      {"Banach primitives", banach_primitives},
  };
  int unexpected = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    std::cout << "criterion " << index << " " << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << '\n';
    if (!o.pass) {
      if (o.deviation.empty()) {
        ++unexpected;
      } else {
        std::cout << "    documented deviation: " << o.deviation << '\n';
      }
    }
    std::cout.flush();
  }
  std::cout << (unexpected == 0 ? "acceptance: no unexpected failures\n" : "acceptance: unexpected failures\n");
  return unexpected == 0 ? 0 : 1;
}

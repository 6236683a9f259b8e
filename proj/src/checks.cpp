#include "preqmc/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "preqmc/anova.hpp"
#include "preqmc/covariance.hpp"
#include "preqmc/fft.hpp"
#include "preqmc/normal.hpp"
#include "preqmc/preintegrate.hpp"
#include "preqmc/quadrature.hpp"
#include "preqmc/rng.hpp"
#include "preqmc/sobol.hpp"

namespace preqmc {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

const MethodResult* find_method(const ConvergenceReport& rep, Method m) {
  for (const auto& mr : rep.methods)
    if (mr.method == m) return &mr;
  return nullptr;
}

// Median per-call time of `op`, each sample averaging calls until the clock
// has advanced enough to be meaningful.
double time_per_call(const std::function<void()>& op) {
  using clock = std::chrono::steady_clock;
  std::vector<double> samples;
  for (int trial = 0; trial < 3; ++trial) {
    std::size_t calls = 0;
    const auto t0 = clock::now();
    double elapsed = 0.0;
    while (elapsed < 0.05) {
      op();
      ++calls;
      elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    }
    samples.push_back(elapsed / static_cast<double>(calls));
  }
  std::sort(samples.begin(), samples.end());
  return samples[1];
}

std::vector<double> gaussian_vector(CounterRng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = inv_normal_cdf(rng.next_u01());
  return v;
}

}  // namespace

CheckResult check_convergence_rates(const ConvergenceReport& rep) {
  CheckResult res{"convergence-rates", false, ""};
  const MethodResult* mc = find_method(rep, Method::mc);
  const MethodResult* qmc = find_method(rep, Method::qmc);
  const MethodResult* pmc = find_method(rep, Method::pre_mc);
  const MethodResult* pqmc = find_method(rep, Method::pre_qmc);
  if (!mc || !qmc || !pmc || !pqmc) {
    res.detail = "report is missing methods";
    return res;
  }
  const bool fits = mc->rate.valid && qmc->rate.valid && pmc->rate.valid &&
                    pqmc->rate.valid;
  const double s_mc = mc->rate.slope, s_qmc = qmc->rate.slope,
               s_pmc = pmc->rate.slope, s_pqmc = pqmc->rate.slope;
  const bool mc_ok = s_mc >= -0.65 && s_mc <= -0.35;
  const bool pmc_ok = s_pmc >= -0.65 && s_pmc <= -0.35;
  const bool qmc_ok = s_qmc >= -0.85 && s_qmc <= -0.45;
  const bool pqmc_ok = s_pqmc <= -0.85;
  const double budget =
      900.0 * 4.0 / static_cast<double>(std::min<std::size_t>(4, rep.workers));
  const bool time_ok = rep.wall_seconds <= budget;
  res.pass = fits && mc_ok && pmc_ok && qmc_ok && pqmc_ok && time_ok &&
             rep.fast_transform;
  res.detail = "slopes mc=" + fmt(s_mc) + " qmc=" + fmt(s_qmc) +
               " pre-mc=" + fmt(s_pmc) + " pre-qmc=" + fmt(s_pqmc) +
               "; wall=" + fmt(rep.wall_seconds, 3) + "s (budget " +
               fmt(budget, 3) + "s, " + std::to_string(rep.workers) +
               " workers); fst=" + (rep.fast_transform ? "on" : "off");
  return res;
}

CheckResult check_error_ordering(const ConvergenceReport& rep) {
  CheckResult res{"error-ordering", false, ""};
  std::size_t si = 0;
  for (std::size_t i = 0; i < rep.config.sizes.size(); ++i)
    if (rep.config.sizes[i] > rep.config.sizes[si]) si = i;
  const MethodResult* mc = find_method(rep, Method::mc);
  const MethodResult* qmc = find_method(rep, Method::qmc);
  const MethodResult* pmc = find_method(rep, Method::pre_mc);
  const MethodResult* pqmc = find_method(rep, Method::pre_qmc);
  if (!mc || !qmc || !pmc || !pqmc) {
    res.detail = "report is missing methods";
    return res;
  }
  const double r_mc = mc->rmse_rel[si], r_qmc = qmc->rmse_rel[si],
               r_pmc = pmc->rmse_rel[si], r_pqmc = pqmc->rmse_rel[si];
  res.pass = 2.0 * r_pqmc <= r_pmc && 2.0 * r_pmc <= r_mc &&
             2.0 * r_pqmc <= r_qmc;
  res.detail = "rmse at N=" + std::to_string(rep.config.sizes[si]) +
               ": mc=" + fmt(r_mc) + " qmc=" + fmt(r_qmc) +
               " pre-mc=" + fmt(r_pmc) + " pre-qmc=" + fmt(r_pqmc);
  return res;
}

CheckResult check_one_dim_exactness() {
  CheckResult res{"one-dim-exactness", false, ""};
  ExperimentConfig cfg;
  cfg.d = 1;
  cfg.methods = {Method::pre_mc, Method::pre_qmc};
  const ConvergenceReport rep = run_experiment(cfg);
  const double exact = analytic_digital_price(cfg.market);
  double max_dev = 0.0;
  for (const auto& mr : rep.methods)
    for (const auto& cell : mr.estimates)
      for (double e : cell) max_dev = std::max(max_dev, std::abs(e - exact));
  res.pass = max_dev <= 1e-9 && rep.reference.analytic;
  res.detail = "max |estimate - analytic| = " + fmt(max_dev, 3) +
               " (analytic price " + fmt(exact, 10) + ")";
  return res;
}

CheckResult check_anova_identities() {
  CheckResult res{"anova-identities", false, ""};
  MarketParams mp;
  auto fact = std::make_shared<const PathFactorization>(TimeGrid{mp.maturity, 3},
                                                        FactorMethod::pca);
  const AnovaDecomposition dec = decompose_digital(mp, fact, 64);
  const VarianceReport vr = variance_report(dec);
  const double rel =
      std::abs(vr.variance_sum - vr.independent_total) / vr.independent_total;
  const bool sum_ok = rel <= 1e-4;
  const bool lemma_ok = vr.projected[0] < vr.total_variance;

  // orthogonality of all term pairs for a dense d=2 polynomial
  auto poly = [](const double* x) {
    return (1.0 + x[0] + 0.5 * x[0] * x[0]) *
           (1.0 - x[1] + x[1] * x[1] * x[1]);
  };
  const AnovaDecomposition d2 = decompose(poly, 2, 32);
  const GaussRule& r = gauss_hermite(40);
  double terms_at[4];
  KahanSum inner[4][4];
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double w = r.w[i] * r.w[j];
      const double x[2] = {r.x[i], r.x[j]};
      for (std::uint32_t u = 0; u < 4; ++u) terms_at[u] = d2.evaluate_term(u, x);
      for (std::uint32_t u = 0; u < 4; ++u)
        for (std::uint32_t v = u + 1; v < 4; ++v)
          inner[u][v].add(w * terms_at[u] * terms_at[v]);
    }
  double max_inner = 0.0;
  for (std::uint32_t u = 0; u < 4; ++u)
    for (std::uint32_t v = u + 1; v < 4; ++v)
      max_inner = std::max(max_inner, std::abs(inner[u][v].value()));
  const bool ortho_ok = max_inner <= 1e-8;

  res.pass = sum_ok && lemma_ok && ortho_ok;
  res.detail = "variance sum vs independent total rel dev " + fmt(rel, 3) +
               "; sigma^2(P1 f)=" + fmt(vr.projected[0]) + " < sigma^2(f)=" +
               fmt(vr.total_variance) + (lemma_ok ? "" : " VIOLATED") +
               "; max term inner product " + fmt(max_inner, 3);
  return res;
}

CheckResult check_factorizations() {
  CheckResult res{"factorizations", false, ""};
  double max_resid = 0.0;
  for (FactorMethod m :
       {FactorMethod::standard, FactorMethod::bridge, FactorMethod::pca})
    for (std::size_t d : {1u, 2u, 8u, 64u, 256u}) {
      PathFactorization f(TimeGrid{1.0, d}, m);
      max_resid = std::max(max_resid, max_factorization_residual(f));
    }
  const bool resid_ok = max_resid <= 1e-9;

  // FST path against the dense factor at d = 256
  PathFactorization pca(TimeGrid{1.0, 256}, FactorMethod::pca);
  const Matrix& A = pca.dense_factor();
  MatvecScratch scratch;
  CounterRng rng(0x46535443);
  std::vector<double> x(256), w(256), wd(256);
  double max_rel = 0.0;
  for (int t = 0; t < 20; ++t) {
    for (auto& v : x) v = 2.0 * rng.next_u01() - 1.0;
    pca.matvec(x.data(), w.data(), scratch);
    double scale = 0.0;
    for (std::size_t l = 0; l < 256; ++l) {
      double s = 0.0;
      for (std::size_t j = 0; j < 256; ++j) s += A(l, j) * x[j];
      wd[l] = s;
      scale = std::max(scale, std::abs(s));
    }
    for (std::size_t l = 0; l < 256; ++l)
      max_rel = std::max(max_rel, std::abs(w[l] - wd[l]) / scale);
  }
  const bool fst_ok = max_rel <= 1e-10;

  // O(d log d) scaling band: time at 4096 within 8x of 1024
  OddSineTransform t1(1024), t4(4096);
  FstScratch fs;
  std::vector<double> b1(1024, 0.5), o1(1024), b4(4096, 0.5), o4(4096);
  for (int i = 0; i < 5; ++i) {
    t1.apply(b1.data(), o1.data(), fs);
    t4.apply(b4.data(), o4.data(), fs);
  }
  const double per1 = time_per_call([&]() { t1.apply(b1.data(), o1.data(), fs); });
  const double per4 = time_per_call([&]() { t4.apply(b4.data(), o4.data(), fs); });
  const double ratio = per4 / per1;
  const bool time_ok = ratio <= 8.0;

  res.pass = resid_ok && fst_ok && time_ok;
  res.detail = "max ||AA^T - C||_max = " + fmt(max_resid, 3) +
               "; fst vs dense rel " + fmt(max_rel, 3) + "; fst time ratio " +
               fmt(ratio, 3) + " (4096 vs 1024, bound 8)";
  return res;
}

CheckResult check_root_finder() {
  CheckResult res{"root-finder", false, ""};
  MarketParams mp;
  auto f1 = std::make_shared<const PathFactorization>(TimeGrid{mp.maturity, 1},
                                                      FactorMethod::pca);
  DigitalAsianEvaluator ev1(mp, f1);
  RootResult r1;
  ev1.conditional_price(nullptr, r1);
  const double dev1 = std::abs(r1.root - (-0.95));
  const bool d1_ok = r1.status == RootStatus::interior && dev1 <= 1e-10;

  auto f256 = std::make_shared<const PathFactorization>(
      TimeGrid{mp.maturity, 256}, FactorMethod::pca);
  DigitalAsianEvaluator ev(mp, f256);
  CounterRng rng(0x726f6f74);
  std::vector<double> y(255);
  double max_res = 0.0;
  int max_it = 0, interior = 0;
  for (int t = 0; t < 10000; ++t) {
    for (auto& v : y) v = inv_normal_cdf(rng.next_u01());
    RootResult rr;
    ev.conditional_price(y.data(), rr);
    if (rr.status != RootStatus::interior) continue;
    ++interior;
    max_res = std::max(max_res, std::abs(rr.residual));
    max_it = std::max(max_it, rr.iterations);
  }
  const bool d256_ok = interior >= 9990 && max_res <= 1e-10 && max_it <= 20;

  res.pass = d1_ok && d256_ok;
  res.detail = "d=1 root dev " + fmt(dev1, 3) + "; d=256: " +
               std::to_string(interior) + "/10000 interior, max residual " +
               fmt(max_res, 3) + ", max iterations " + std::to_string(max_it);
  return res;
}

CheckResult check_derivative_probes() {
  CheckResult res{"derivative-probes", false, ""};
  MarketParams mp;
  double worst = 0.0;
  std::size_t worst_d = 0;
  auto record = [&](double dev, std::size_t d) {
    if (dev > worst) {
      worst = dev;
      worst_d = d;
    }
  };
  for (std::size_t d : {2u, 4u, 8u}) {
    auto fact = std::make_shared<const PathFactorization>(
        TimeGrid{mp.maturity, d}, FactorMethod::pca);
    JumpIntegrand g = make_digital_asian(mp, fact);
    CounterRng rng(0xd1f0 + d);
    for (int p = 0; p < 100; ++p) {
      std::vector<double> y = gaussian_vector(rng, d - 1);
      if (find_root(g, y).status != RootStatus::interior) continue;
      const std::vector<double> grad = psi_gradient(g, y);
      for (std::size_t k = 0; k + 1 < d; ++k) {
        const std::size_t kf = k + 1;  // full-space coordinate
        const double h = 1e-5 * (1.0 + std::abs(y[k]));
        std::vector<double> yp = y, ym = y;
        yp[k] += h;
        ym[k] -= h;
        // root-location derivative
        const double fd_psi =
            (find_root(g, yp).root - find_root(g, ym).root) / (2.0 * h);
        const double a_psi = grad[k];
        record(std::abs(a_psi - fd_psi) /
                   std::max({std::abs(a_psi), std::abs(fd_psi), 0.01}),
               d);
        // derivative of the preintegrated value
        const double fd_p =
            (preintegrate(g, yp).value - preintegrate(g, ym).value) / (2.0 * h);
        const double a_p = dk_preintegrated(g, y, kf);
        record(std::abs(a_p - fd_p) /
                   std::max({std::abs(a_p), std::abs(fd_p), 0.01}),
               d);
      }
    }
  }
  res.pass = worst <= 1e-6;
  res.detail = "max mixed-relative deviation " + fmt(worst, 3) +
               (worst_d ? " (d=" + std::to_string(worst_d) + ")" : "");
  return res;
}

CheckResult check_boundary_fixture() {
  CheckResult res{"boundary-fixture", false, ""};
  JumpIntegrand g = oscillating_integrand(3);
  CounterRng rng(0x626e6479);
  double max_dev = 0.0;
  int interior = 0;
  for (int t = 0; t < 1000; ++t) {
    const double x2 = 0.35 + rng.next_u01() * (3.0 - 0.35);
    const std::vector<double> y = {x2};
    const RootResult rr = find_root(g, y);
    if (rr.status != RootStatus::interior) continue;
    ++interior;
    max_dev = std::max(max_dev, std::abs(rr.root - oscillating_psi(3, x2)));
  }
  const bool psi_ok = interior == 1000 && max_dev <= 1e-9;

  std::vector<double> xs;
  for (int q = 1; q <= 8; ++q) xs.push_back(1.0 / kPi + std::pow(10.0, -q));
  const std::vector<DecayProbe> probes = boundary_decay_probe(3, xs);
  bool decreasing = true;
  for (std::size_t i = 1; i < probes.size(); ++i)
    if (!(probes[i].psi_numeric < probes[i - 1].psi_numeric)) decreasing = false;
  const DecayProbe& last = probes.back();
  const bool decay_ok = last.has_root && decreasing &&
                        last.psi_numeric < -15.0 &&
                        std::abs(last.d2_preintegrated) < 1e-6;

  res.pass = psi_ok && decay_ok;
  res.detail = "max |psi - closed form| = " + fmt(max_dev, 3) + " on " +
               std::to_string(interior) + " root points; at x2=1/pi+1e-8: psi=" +
               fmt(last.psi_numeric, 4) + ", |D2 P1 f|=" +
               fmt(std::abs(last.d2_preintegrated), 3);
  return res;
}

CheckResult check_sampler() {
  CheckResult res{"sampler", false, ""};
  const DirectionTable& table = default_direction_table();

  SobolSampler s1(table, 1);
  bool radical_ok = true;
  double coord = 0.0;
  for (std::uint32_t i = 0; i < (1u << 12); ++i) {
    s1.generate(&coord);
    double want = 0.0;
    for (int b = 0; b < 32; ++b)
      if (i >> b & 1u) want += std::ldexp(1.0, -b - 1);
    if (coord != want) radical_ok = false;
  }

  SobolSampler s16(table, 16);
  std::vector<std::vector<int>> hits(16, std::vector<int>(1024, 0));
  std::vector<double> row(16);
  for (int i = 0; i < 1024; ++i) {
    s16.generate(row.data());
    for (int j = 0; j < 16; ++j)
      ++hits[j][static_cast<std::size_t>(row[j] * 1024.0)];
  }
  bool strat_ok = true;
  for (const auto& h : hits)
    for (int c : h)
      if (c != 1) strat_ok = false;

  double max_err = 0.0;
  const double lo = 1e-10, hi = 1.0 - 1e-10;
  for (int i = 0; i < 100000; ++i) {
    const double u = lo + (hi - lo) * static_cast<double>(i) / 99999.0;
    const double x = inv_normal_cdf(u);
    max_err = std::max(max_err, std::abs(normal_cdf(x) - u) / normal_pdf(x));
  }
  const bool inv_ok = max_err <= 1e-9;

  res.pass = radical_ok && strat_ok && inv_ok;
  res.detail = std::string("dim-1 radical inverse ") +
               (radical_ok ? "exact" : "MISMATCH") + "; m=10 stratification " +
               (strat_ok ? "exact" : "BROKEN") + "; inverse-normal max error " +
               fmt(max_err, 3);
  return res;
}

std::vector<CheckResult> run_invariant_checks() {
  return {check_factorizations(), check_root_finder(),
          check_derivative_probes(), check_boundary_fixture(), check_sampler()};
}

int print_check_lines(std::ostream& os, const std::vector<CheckResult>& results) {
  int failures = 0;
  for (const auto& r : results) {
    os << (r.pass ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) os << ": " << r.detail;
    os << '\n';
    if (!r.pass) ++failures;
  }
  return failures;
}

}  // namespace preqmc

#include "preqmc/preintegrate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "preqmc/quadrature.hpp"

namespace preqmc {

namespace {

constexpr double kDomainCap = 40.0;
constexpr int kMaxIter = 50;

void check_input(const JumpIntegrand& g, const std::vector<double>& y) {
  if (!g.phi || !g.dphi_axis)
    throw std::invalid_argument("JumpIntegrand: phi and dphi_axis are required");
  if (g.dim == 0 || g.axis >= g.dim)
    throw std::invalid_argument("JumpIntegrand: bad dim/axis");
  if (y.size() + 1 != g.dim)
    throw std::invalid_argument("preintegrate: y must have dim-1 entries");
}

}  // namespace

RootResult find_root(const JumpIntegrand& g, const std::vector<double>& y) {
  check_input(g, y);
  std::vector<double> full(g.dim);
  auto f = [&](double xi) {
    g.embed(xi, y.data(), full.data());
    return g.phi(full.data());
  };
  auto df = [&](double xi) {
    g.embed(xi, y.data(), full.data());
    return g.dphi_axis(full.data());
  };

  const double tol = 1e-12 * (1.0 + std::fabs(g.scale));
  double lo, hi, flo, fhi;
  double f0 = f(0.0);
  if (f0 == 0.0) return {RootStatus::interior, 0.0, 0.0, 0};
  if (f0 > 0.0) {
    hi = 0.0;
    fhi = f0;
    lo = -1.0;
    while (true) {
      flo = f(lo);
      if (flo <= 0.0) break;
      if (lo <= -kDomainCap) return {RootStatus::all_positive, 0.0, flo, 0};
      lo = std::max(2.0 * lo, -kDomainCap);
    }
  } else {
    lo = 0.0;
    flo = f0;
    hi = 1.0;
    while (true) {
      fhi = f(hi);
      if (fhi >= 0.0) break;
      if (hi >= kDomainCap)
        throw std::runtime_error(
            "find_root: phi stays negative up to the domain cap; integrand "
            "does not escape to +inf along the axis");
      hi = std::min(2.0 * hi, kDomainCap);
    }
  }

  double x = (lo <= 0.0 && 0.0 <= hi) ? 0.0 : 0.5 * (lo + hi);
  double fx = (x == 0.0) ? f0 : f(x);
  for (int it = 1; it <= kMaxIter; ++it) {
    if (std::fabs(fx) <= tol)
      return {RootStatus::interior, x, std::fabs(fx), it - 1};
    if (fx > 0.0) {
      hi = x;
      fhi = fx;
    } else {
      lo = x;
      flo = fx;
    }
    double dfx = df(x);
    double next = (dfx > 0.0) ? x - fx / dfx : lo - 1.0;  // force bisection
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    x = next;
    fx = f(x);
  }
  throw std::runtime_error("find_root: no convergence within 50 iterations (x=" +
                           std::to_string(x) + ", residual=" +
                           std::to_string(fx) + ")");
}

PreintResult preintegrate(const JumpIntegrand& g, const std::vector<double>& y,
                          PreintMode mode) {
  RootResult r = find_root(g, y);
  if (mode == PreintMode::closed_form) {
    double xi = (r.status == RootStatus::all_positive)
                    ? -std::numeric_limits<double>::infinity()
                    : r.root;
    if (g.closed_form_tail) return {g.closed_form_tail(xi, y.data()), r};
    if (!g.constant_theta())
      throw std::invalid_argument(
          "preintegrate: closed form requires a constant payoff factor or an "
          "explicit closed_form_tail");
    double mass = std::isinf(xi) ? 1.0 : 1.0 - normal_cdf(xi);
    return {g.theta_value * mass, r};
  }

  std::vector<double> full(g.dim);
  auto integrand = [&](double xi) {
    g.embed(xi, y.data(), full.data());
    return g.theta_at(full.data()) * normal_pdf(xi);
  };
  double a = (r.status == RootStatus::all_positive) ? -9.0 : r.root;
  double b = std::max(a + kDomainCap, 9.0);
  double v = 0.0;
  const int panels = 8;
  for (int p = 0; p < panels; ++p) {
    double pa = a + (b - a) * p / panels;
    double pb = a + (b - a) * (p + 1) / panels;
    v += integrate_gl(integrand, pa, pb, 64);
  }
  return {v, r};
}

std::vector<double> psi_gradient(const JumpIntegrand& g,
                                 const std::vector<double>& y) {
  RootResult r = find_root(g, y);
  if (r.status != RootStatus::interior)
    throw std::domain_error("psi_gradient: no interior root at this y");
  std::vector<double> full(g.dim);
  g.embed(r.root, y.data(), full.data());
  double denom = g.dphi_axis(full.data());
  std::vector<double> grad(g.dim - 1);
  for (std::size_t k = 0, out = 0; k < g.dim; ++k) {
    if (k == g.axis) continue;
    double dk;
    if (g.dphi) {
      dk = g.dphi(full.data(), k);
    } else {
      double h = 1e-6 * (1.0 + std::fabs(full[k]));
      double save = full[k];
      full[k] = save + h;
      double up = g.phi(full.data());
      full[k] = save - h;
      double dn = g.phi(full.data());
      full[k] = save;
      dk = (up - dn) / (2.0 * h);
    }
    grad[out++] = -dk / denom;
  }
  return grad;
}

double psi_gradient(const JumpIntegrand& g, const std::vector<double>& y,
                    std::size_t k) {
  if (k == g.axis || k >= g.dim)
    throw std::invalid_argument("psi_gradient: k must differ from the axis");
  std::vector<double> grad = psi_gradient(g, y);
  return grad[k < g.axis ? k : k - 1];
}

double dk_preintegrated(const JumpIntegrand& g, const std::vector<double>& y,
                        std::size_t k) {
  check_input(g, y);
  if (k == g.axis || k >= g.dim)
    throw std::invalid_argument("dk_preintegrated: k must differ from the axis");
  RootResult r = find_root(g, y);

  double boundary = 0.0;
  std::vector<double> full(g.dim);
  if (r.status == RootStatus::interior) {
    g.embed(r.root, y.data(), full.data());
    double denom = g.dphi_axis(full.data());
    double dk;
    if (g.dphi) {
      dk = g.dphi(full.data(), k);
    } else {
      double h = 1e-6 * (1.0 + std::fabs(full[k]));
      double save = full[k];
      full[k] = save + h;
      double up = g.phi(full.data());
      full[k] = save - h;
      double dn = g.phi(full.data());
      full[k] = save;
      dk = (up - dn) / (2.0 * h);
    }
    boundary = g.theta_at(full.data()) * (dk / denom) * normal_pdf(r.root);
  }
  if (g.constant_theta()) return boundary;

  // varying payoff factor: tail integral of its k-derivative
  auto integrand = [&](double xi) {
    g.embed(xi, y.data(), full.data());
    double h = 1e-6 * (1.0 + std::fabs(full[k]));
    double save = full[k];
    full[k] = save + h;
    double up = g.theta(full.data());
    full[k] = save - h;
    double dn = g.theta(full.data());
    full[k] = save;
    return (up - dn) / (2.0 * h) * normal_pdf(xi);
  };
  double a = (r.status == RootStatus::all_positive) ? -9.0 : r.root;
  double b = std::max(a + kDomainCap, 9.0);
  double tail = 0.0;
  for (int p = 0; p < 8; ++p) {
    double pa = a + (b - a) * p / 8.0;
    double pb = a + (b - a) * (p + 1) / 8.0;
    tail += integrate_gl(integrand, pa, pb, 64);
  }
  return tail + boundary;
}

JumpIntegrand oscillating_integrand(int m) {
  if (m < 1) throw std::invalid_argument("oscillating_integrand: m >= 1");
  auto q = [m](double x2) {
    return x2 > 0.0 ? std::pow(x2, m) * std::sin(1.0 / x2) : 0.0;
  };
  JumpIntegrand g;
  g.dim = 2;
  g.axis = 0;
  g.scale = 1.0;
  g.phi = [q](const double* x) { return std::exp(x[0]) - q(x[1]); };
  g.dphi_axis = [](const double* x) { return std::exp(x[0]); };
  g.dphi = [q, m](const double* x, std::size_t k) -> double {
    if (k == 0) return std::exp(x[0]);
    double x2 = x[1];
    if (x2 <= 0.0) return 0.0;
    return -(m * std::pow(x2, m - 1) * std::sin(1.0 / x2) -
             std::pow(x2, m - 2) * std::cos(1.0 / x2));
  };
  return g;
}

bool oscillating_has_root(double x2) {
  return x2 > 0.0 && std::sin(1.0 / x2) > 0.0;
}

double oscillating_psi(int m, double x2) {
  if (!oscillating_has_root(x2))
    throw std::domain_error("oscillating_psi: no root at this x2");
  return m * std::log(x2) + std::log(std::sin(1.0 / x2));
}

std::vector<DecayProbe> boundary_decay_probe(int m,
                                             const std::vector<double>& x2_values) {
  JumpIntegrand g = oscillating_integrand(m);
  std::vector<DecayProbe> out;
  out.reserve(x2_values.size());
  for (double x2 : x2_values) {
    DecayProbe p;
    p.x2 = x2;
    RootResult r = find_root(g, {x2});
    p.has_root = (r.status == RootStatus::interior);
    p.iterations = r.iterations;
    p.residual = r.residual;
    if (p.has_root) {
      p.psi_numeric = r.root;
      p.psi_closed = oscillating_psi(m, x2);
    }
    p.d2_preintegrated = dk_preintegrated(g, {x2}, 1);
    out.push_back(p);
  }
  return out;
}

}  // namespace preqmc

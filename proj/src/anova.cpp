#include "preqmc/anova.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "preqmc/normal.hpp"
#include "preqmc/preintegrate.hpp"
#include "preqmc/quadrature.hpp"

namespace preqmc {
namespace {

constexpr std::size_t kMaxGridCells = std::size_t{1} << 24;
constexpr double kRange = 9.0;     // adaptive panels cover [-9, 9]
constexpr double kOuterTol = 1e-8;
constexpr double kInnerTol = 1e-9;

std::vector<std::size_t> mask_axes(std::uint32_t mask, std::size_t d) {
  std::vector<std::size_t> axes;
  for (std::size_t a = 0; a < d; ++a)
    if (mask >> a & 1u) axes.push_back(a);
  return axes;
}

void advance_digits(std::vector<std::size_t>& digit, std::size_t n) {
  for (std::size_t a = 0; a < digit.size(); ++a) {
    if (++digit[a] < n) return;
    digit[a] = 0;
  }
}

// Tensor Gauss-Hermite sum of g over the listed coordinates of x; the
// remaining coordinates keep their incoming values.
double gh_over_axes(const std::function<double(const double*)>& g,
                    const std::vector<std::size_t>& axes, const GaussRule& r,
                    std::vector<double>& x) {
  if (axes.empty()) return g(x.data());
  const std::size_t m = axes.size(), n = r.size();
  std::vector<std::size_t> digit(m, 0);
  for (std::size_t a : axes) x[a] = r.x[0];
  KahanSum acc;
  for (;;) {
    double w = 1.0;
    for (std::size_t p = 0; p < m; ++p) w *= r.w[digit[p]];
    acc.add(w * g(x.data()));
    std::size_t p = 0;
    for (; p < m; ++p) {
      if (++digit[p] < n) {
        x[axes[p]] = r.x[digit[p]];
        break;
      }
      digit[p] = 0;
      x[axes[p]] = r.x[0];
    }
    if (p == m) break;
  }
  return acc.value();
}

// Nested adaptive integration (with the normal density folded in) over the
// listed coordinates; used where the integrand has a moving kink.
double adaptive_over_axes(const std::vector<std::size_t>& axes, std::size_t pos,
                          std::vector<double>& x,
                          const std::function<double(std::vector<double>&)>& inner,
                          double tol) {
  if (pos == axes.size()) return inner(x);
  return integrate_adaptive(
      [&](double t) {
        x[axes[pos]] = t;
        return normal_pdf(t) * adaptive_over_axes(axes, pos + 1, x, inner, tol);
      },
      -kRange, kRange, tol);
}

}  // namespace

double AnovaDecomposition::variance_sum() const {
  KahanSum s;
  for (std::uint32_t u = 1; u <= full_mask(); ++u) s.add(terms[u]);
  return s.value();
}

double AnovaDecomposition::projected_variance(std::size_t axis) const {
  if (axis >= dimension) throw std::out_of_range("projected_variance: bad axis");
  return closed[full_mask() & ~(1u << axis)];
}

double AnovaDecomposition::projected_variance_identity(std::size_t axis) const {
  if (axis >= dimension)
    throw std::out_of_range("projected_variance_identity: bad axis");
  KahanSum s;
  for (std::uint32_t u = 1; u <= full_mask(); ++u)
    if (!(u >> axis & 1u)) s.add(terms[u]);
  return s.value();
}

double AnovaDecomposition::evaluate_term(std::uint32_t u, const double* x) const {
  u &= full_mask();
  if (u == 0) return mean;
  KahanSum s;
  std::uint32_t sub = u;
  for (;;) {
    double v = lower(sub, x);
    s.add((std::popcount(u ^ sub) & 1) ? -v : v);
    if (sub == 0) break;
    sub = (sub - 1) & u;
  }
  return s.value();
}

double AnovaDecomposition::project_term(std::uint32_t u, std::size_t axis,
                                        const double* x) const {
  if (axis >= dimension) throw std::out_of_range("project_term: bad axis");
  const GaussRule& r = gauss_hermite(nodes);
  std::vector<double> buf(x, x + dimension);
  KahanSum s;
  for (std::size_t i = 0; i < r.size(); ++i) {
    buf[axis] = r.x[i];
    s.add(r.w[i] * evaluate_term(u, buf.data()));
  }
  return s.value();
}

AnovaDecomposition decompose(std::function<double(const double*)> g,
                             std::size_t d, std::size_t n) {
  if (d == 0 || d > 6)
    throw std::invalid_argument("decompose: dimension must be in [1, 6]");
  if (n < 2) throw std::invalid_argument("decompose: need at least 2 nodes");
  std::size_t cells = 1;
  for (std::size_t a = 0; a < d; ++a) {
    if (cells > kMaxGridCells / n)
      throw std::invalid_argument("decompose: n^d grid exceeds the 2^24 cell cap");
    cells *= n;
  }

  const GaussRule& rule = gauss_hermite(n);
  auto fn = std::make_shared<std::function<double(const double*)>>(std::move(g));
  const std::uint32_t full = (std::uint32_t{1} << d) - 1;

  // one pass over the tensor grid; coordinate 1 is the fastest digit
  std::vector<double> grid(cells);
  {
    std::vector<double> x(d, rule.x[0]);
    std::vector<std::size_t> digit(d, 0);
    for (std::size_t i = 0; i < cells; ++i) {
      grid[i] = (*fn)(x.data());
      for (std::size_t a = 0; a < d; ++a) {
        if (++digit[a] < n) {
          x[a] = rule.x[digit[a]];
          break;
        }
        digit[a] = 0;
        x[a] = rule.x[0];
      }
    }
  }

  AnovaDecomposition dec;
  dec.dimension = d;
  dec.nodes = n;
  dec.closed.assign(std::size_t{1} << d, 0.0);
  dec.terms.assign(std::size_t{1} << d, 0.0);

  {
    KahanSum m1, m2;
    std::vector<std::size_t> digit(d, 0);
    for (std::size_t i = 0; i < cells; ++i) {
      double w = 1.0;
      for (std::size_t a = 0; a < d; ++a) w *= rule.w[digit[a]];
      m1.add(w * grid[i]);
      m2.add(w * grid[i] * grid[i]);
      advance_digits(digit, n);
    }
    dec.mean = m1.value();
    dec.total_variance = m2.value() - dec.mean * dec.mean;
  }
  dec.closed[full] = dec.total_variance;

  // D_v for the proper nonempty subsets: contract the grid over the
  // complement of v, then take the weighted second moment.
  for (std::uint32_t v = 1; v < full; ++v) {
    auto kept = mask_axes(v, d);
    std::size_t nk = 1;
    for (std::size_t p = 0; p < kept.size(); ++p) nk *= n;
    std::vector<double> bucket(nk, 0.0);
    std::vector<std::size_t> digit(d, 0);
    for (std::size_t i = 0; i < cells; ++i) {
      std::size_t idx = 0, stride = 1;
      for (std::size_t p = 0; p < kept.size(); ++p) {
        idx += digit[kept[p]] * stride;
        stride *= n;
      }
      double w = 1.0;
      for (std::size_t a = 0; a < d; ++a)
        if (!(v >> a & 1u)) w *= rule.w[digit[a]];
      bucket[idx] += w * grid[i];
      advance_digits(digit, n);
    }
    KahanSum m2;
    std::vector<std::size_t> kd(kept.size(), 0);
    for (std::size_t j = 0; j < nk; ++j) {
      double w = 1.0;
      for (std::size_t p = 0; p < kept.size(); ++p) w *= rule.w[kd[p]];
      m2.add(w * bucket[j] * bucket[j]);
      advance_digits(kd, n);
    }
    dec.closed[v] = m2.value() - dec.mean * dec.mean;
  }

  for (std::uint32_t u = 1; u <= full; ++u) {
    KahanSum s;
    std::uint32_t sub = u;
    for (;;) {
      s.add((std::popcount(u ^ sub) & 1) ? -dec.closed[sub] : dec.closed[sub]);
      if (sub == 0) break;
      sub = (sub - 1) & u;
    }
    dec.terms[u] = s.value();
  }

  const double mean_value = dec.mean;
  dec.lower = [fn, d, n, mean_value](std::uint32_t v, const double* x) {
    const std::uint32_t all = (std::uint32_t{1} << d) - 1;
    v &= all;
    if (v == 0) return mean_value;
    std::vector<double> buf(x, x + d);
    return gh_over_axes(*fn, mask_axes(all & ~v, d), gauss_hermite(n), buf);
  };

  dec.independent_total = [fn, d, n]() {
    const std::size_t n2 = n + 9;
    std::size_t cells2 = 1;
    for (std::size_t a = 0; a < d; ++a) {
      if (cells2 > kMaxGridCells / n2)
        throw std::runtime_error(
            "independent variance route: grid exceeds the 2^24 cell cap");
      cells2 *= n2;
    }
    const GaussRule& r = gauss_hermite(n2);
    KahanSum m1, m2;
    std::vector<double> x(d, r.x[0]);
    std::vector<std::size_t> digit(d, 0);
    for (std::size_t i = 0; i < cells2; ++i) {
      double w = 1.0;
      for (std::size_t a = 0; a < d; ++a) w *= r.w[digit[a]];
      double v = (*fn)(x.data());
      m1.add(w * v);
      m2.add(w * v * v);
      for (std::size_t a = 0; a < d; ++a) {
        if (++digit[a] < n2) {
          x[a] = r.x[digit[a]];
          break;
        }
        digit[a] = 0;
        x[a] = r.x[0];
      }
    }
    double m = m1.value();
    return m2.value() - m * m;
  };

  return dec;
}

namespace {

// Shared state for the digital decomposition lambdas. Single-threaded use:
// the evaluator inside owns scratch.
struct DigitalCtx {
  MarketParams market;
  std::shared_ptr<const PathFactorization> fact;
  std::size_t d;
  double disc;
  DigitalAsianEvaluator eval;
  std::vector<double> ybuf;

  DigitalCtx(const MarketParams& m, std::shared_ptr<const PathFactorization> f)
      : market(m),
        fact(std::move(f)),
        d(fact->dim()),
        disc(m.discount()),
        eval(m, fact),
        ybuf(d > 0 ? d - 1 : 0) {}

  // exact conditional price: coordinate 1 integrated in closed form
  double tail(const double* x) {
    for (std::size_t i = 1; i < d; ++i) ybuf[i - 1] = x[i];
    return eval.conditional_price(ybuf.data());
  }

  // exact mass of {phi > 0} along one remaining coordinate
  double mass_along(std::vector<double>& x, std::size_t axis) {
    return disc * make_axis_section(market, *fact, x.data(), axis).indicator_mass();
  }

  // M_v at x: integrate out the complement of v
  double lower(std::uint32_t v, const double* xin, std::size_t n) {
    const std::uint32_t all = (std::uint32_t{1} << d) - 1;
    v &= all;
    const std::uint32_t c = all & ~v;
    std::vector<double> x(xin, xin + d);
    if (c == 0) return eval.payoff(x.data());
    if (c & 1u) {
      // coordinate 1 goes out in closed form; the rest of the complement is
      // smooth, so plain Gauss-Hermite
      std::function<double(const double*)> g = [this](const double* xx) {
        return tail(xx);
      };
      return gh_over_axes(g, mask_axes(c & ~1u, d), gauss_hermite(n), x);
    }
    // coordinate 1 stays: the innermost complement coordinate gets the exact
    // two-root mass, the others adaptive panels around the moving kink
    const std::size_t jlast = std::size_t(std::bit_width(c)) - 1;
    return adaptive_over_axes(
        mask_axes(c & ~(1u << jlast), d), 0, x,
        [this, jlast](std::vector<double>& xx) { return mass_along(xx, jlast); },
        kInnerTol);
  }
};

}  // namespace

AnovaDecomposition decompose_digital(const MarketParams& market,
                                     std::shared_ptr<const PathFactorization> fact,
                                     std::size_t n) {
  market.validate();
  if (!fact) throw std::invalid_argument("decompose_digital: null factorization");
  const std::size_t d = fact->dim();
  if (d == 0 || d > 3)
    throw std::invalid_argument("decompose_digital: dimension must be in [1, 3]");
  if (n < 2) throw std::invalid_argument("decompose_digital: need at least 2 nodes");

  auto ctx = std::make_shared<DigitalCtx>(market, std::move(fact));
  const std::uint32_t full = (std::uint32_t{1} << d) - 1;

  AnovaDecomposition dec;
  dec.dimension = d;
  dec.nodes = n;
  dec.closed.assign(std::size_t{1} << d, 0.0);
  dec.terms.assign(std::size_t{1} << d, 0.0);

  std::vector<double> origin(d, 0.0);
  dec.mean = ctx->lower(0, origin.data(), n);
  // the payoff is theta times an indicator, so f^2 integrates to theta * mean
  dec.total_variance = ctx->disc * dec.mean - dec.mean * dec.mean;
  dec.closed[full] = dec.total_variance;

  for (std::uint32_t v = 1; v < full; ++v) {
    auto kept = mask_axes(v, d);
    const std::uint32_t c = full & ~v;
    std::vector<double> x(d, 0.0);
    double second;
    if (c & 1u) {
      // M_v is smooth in the kept coordinates
      std::function<double(const double*)> sq = [&ctx, v, n](const double* xx) {
        double m = ctx->lower(v, xx, n);
        return m * m;
      };
      second = gh_over_axes(sq, kept, gauss_hermite(n), x);
    } else {
      // coordinate 1 is kept, so M_v still carries the kink
      second = adaptive_over_axes(
          kept, 0, x,
          [&ctx, v, n](std::vector<double>& xx) {
            double m = ctx->lower(v, xx.data(), n);
            return m * m;
          },
          kOuterTol);
    }
    dec.closed[v] = second - dec.mean * dec.mean;
  }

  for (std::uint32_t u = 1; u <= full; ++u) {
    KahanSum s;
    std::uint32_t sub = u;
    for (;;) {
      s.add((std::popcount(u ^ sub) & 1) ? -dec.closed[sub] : dec.closed[sub]);
      if (sub == 0) break;
      sub = (sub - 1) & u;
    }
    dec.terms[u] = s.value();
  }

  const double mean_value = dec.mean;
  dec.lower = [ctx, n, mean_value](std::uint32_t v, const double* x) {
    if ((v & ((std::uint32_t{1} << ctx->d) - 1)) == 0) return mean_value;
    return ctx->lower(v, x, n);
  };

  dec.independent_total = [ctx, n]() {
    JumpIntegrand g = make_digital_asian(ctx->market, ctx->fact);
    const GaussRule& r = gauss_hermite(n + 9);
    const std::size_t m = ctx->d - 1;
    std::vector<double> y(m, m ? r.x[0] : 0.0);
    std::vector<std::size_t> digit(m, 0);
    std::size_t cells = 1;
    for (std::size_t a = 0; a < m; ++a) cells *= r.size();
    KahanSum m1;
    for (std::size_t i = 0; i < cells; ++i) {
      double w = 1.0;
      for (std::size_t a = 0; a < m; ++a) w *= r.w[digit[a]];
      m1.add(w * preintegrate(g, y, PreintMode::quadrature).value);
      for (std::size_t a = 0; a < m; ++a) {
        if (++digit[a] < r.size()) {
          y[a] = r.x[digit[a]];
          break;
        }
        digit[a] = 0;
        y[a] = r.x[0];
      }
    }
    double I = m1.value();
    return ctx->disc * I - I * I;
  };

  return dec;
}

std::function<double(const double*)> project(
    std::function<double(const double*)> g, std::size_t d, std::size_t axis,
    std::size_t n) {
  if (axis >= d) throw std::invalid_argument("project: axis out of range");
  if (n < 2) throw std::invalid_argument("project: need at least 2 nodes");
  auto fn = std::make_shared<std::function<double(const double*)>>(std::move(g));
  return [fn, d, axis, n](const double* x) {
    const GaussRule& r = gauss_hermite(n);
    std::vector<double> buf(x, x + d);
    KahanSum s;
    for (std::size_t i = 0; i < r.size(); ++i) {
      buf[axis] = r.x[i];
      s.add(r.w[i] * (*fn)(buf.data()));
    }
    return s.value();
  };
}

std::function<double(const double*)> project_digital(
    const MarketParams& market,
    std::shared_ptr<const PathFactorization> fact) {
  market.validate();
  if (!fact) throw std::invalid_argument("project_digital: null factorization");
  auto ev = std::make_shared<DigitalAsianEvaluator>(market, fact);
  const std::size_t d = fact->dim();
  return [ev, d](const double* x) {
    std::vector<double> y(d > 0 ? d - 1 : 0);
    for (std::size_t i = 1; i < d; ++i) y[i - 1] = x[i];
    return ev->conditional_price(y.data());
  };
}

VarianceReport variance_report(const AnovaDecomposition& dec) {
  VarianceReport rep;
  rep.total_variance = dec.total_variance;
  rep.variance_sum = dec.variance_sum();
  rep.independent_total =
      dec.independent_total ? dec.independent_total() : rep.variance_sum;
  for (std::size_t a = 0; a < dec.dimension; ++a) {
    rep.projected.push_back(dec.projected_variance(a));
    rep.projected_identity.push_back(dec.projected_variance_identity(a));
    if (rep.projected.back() > rep.total_variance * (1.0 + 1e-9) + 1e-12)
      throw std::logic_error("integrating out coordinate " +
                             std::to_string(a + 1) + " increased the variance");
  }
  for (std::uint32_t u = 1; u <= dec.full_mask(); ++u)
    rep.term_table.emplace_back(u, dec.terms[u]);
  return rep;
}

std::string subset_name(std::uint32_t mask) {
  if (mask == 0) return "-";
  std::string s;
  for (std::size_t a = 0; a < 32; ++a) {
    if (!(mask >> a & 1u)) continue;
    if (!s.empty()) s += ':';
    s += std::to_string(a + 1);
  }
  return s;
}

void write_variance_csv(std::ostream& os, const AnovaDecomposition& dec) {
  os << "subset,variance,share\n";
  const double total = dec.total_variance;
  os << std::setprecision(12);
  for (std::uint32_t u = 1; u <= dec.full_mask(); ++u) {
    double share = total > 0.0 ? dec.terms[u] / total : 0.0;
    os << subset_name(u) << ',' << dec.terms[u] << ',' << share << '\n';
  }
  os << "total," << total << ',' << (total > 0.0 ? 1.0 : 0.0) << '\n';
}

}  // namespace preqmc

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "preqmc/payoff.hpp"

namespace preqmc {

// Variable subsets are bit masks: bit j stands for coordinate j+1. The
// decomposition stores, for every subset v, the variance D_v of the
// "lower" function M_v = (prod_{k not in v} P_k) g, and derives the
// per-term variances sigma^2(g_u) by Moebius inversion over D.
struct AnovaDecomposition {
  std::size_t dimension = 0;
  std::size_t nodes = 0;       // quadrature level of the build
  double mean = 0.0;           // g_emptyset = I(g)
  double total_variance = 0.0; // D of the full set = sigma^2(g)
  std::vector<double> closed;  // D_v indexed by mask, size 2^dimension
  std::vector<double> terms;   // sigma^2(g_u) indexed by mask

  // M_v evaluated at an arbitrary point (only coordinates in v are read).
  std::function<double(std::uint32_t, const double*)> lower;
  // Second, independently configured route to sigma^2(g) (lazy).
  std::function<double()> independent_total;

  std::uint32_t full_mask() const { return (1u << dimension) - 1; }
  double term_variance(std::uint32_t u) const { return terms[u]; }
  double closed_variance(std::uint32_t v) const { return closed[v]; }
  // Sum of all nonempty term variances (the decomposition side of the
  // variance identity).
  double variance_sum() const;
  // sigma^2(P_{axis+1} g) = D of the complement of {axis}.
  double projected_variance(std::size_t axis) const;
  // Right-hand side of the projected-variance identity: sum of term
  // variances over subsets avoiding the axis.
  double projected_variance_identity(std::size_t axis) const;

  // g_u at an arbitrary point via Moebius over the lower functions.
  double evaluate_term(std::uint32_t u, const double* x) const;
  // P_{axis+1} g_u at x (coordinate `axis` integrated numerically).
  double project_term(std::uint32_t u, std::size_t axis, const double* x) const;
};

// Brute-force decomposition of a generic integrand against the standard
// normal density: one n^d tensor Gauss-Hermite grid, then contractions.
// d <= 6; the grid size n^d is capped at 2^24 values.
AnovaDecomposition decompose(std::function<double(const double*)> g,
                             std::size_t d, std::size_t n);

// Digital Asian specialization: the monotone coordinate is integrated in
// closed form, the innermost remaining discontinuous coordinate by the
// exact two-root mass of the convex section, and the other coordinates by
// adaptive panels (kinked) or Gauss-Hermite (smooth). d <= 3.
AnovaDecomposition decompose_digital(const MarketParams& market,
                                     std::shared_ptr<const PathFactorization> fact,
                                     std::size_t n);

// P_{axis+1} g with n-node quadrature along that axis; the returned
// callable reads a full-length argument and ignores the integrated
// coordinate.
std::function<double(const double*)> project(
    std::function<double(const double*)> g, std::size_t d, std::size_t axis,
    std::size_t n);

// Exact conditional projection of the digital payoff along coordinate 1.
std::function<double(const double*)> project_digital(
    const MarketParams& market,
    std::shared_ptr<const PathFactorization> fact);

struct VarianceReport {
  double total_variance = 0.0;     // from the decomposition
  double independent_total = 0.0;  // second quadrature route
  double variance_sum = 0.0;       // sum of term variances
  std::vector<double> projected;            // sigma^2(P_k g) per axis
  std::vector<double> projected_identity;   // sum_{k not in u} sigma^2(g_u)
  std::vector<std::pair<std::uint32_t, double>> term_table;  // nonempty masks
};

// Collects both sides of the variance identities and enforces that every
// projection reduces variance.
VarianceReport variance_report(const AnovaDecomposition& dec);

std::string subset_name(std::uint32_t mask);  // "-" for empty, else "1:3"
void write_variance_csv(std::ostream& os, const AnovaDecomposition& dec);

}  // namespace preqmc

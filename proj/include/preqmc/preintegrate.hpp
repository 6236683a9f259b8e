#pragma once

#include <functional>
#include <vector>

#include "preqmc/normal.hpp"

namespace preqmc {

// Integrand of the form theta(x) * 1{phi(x) > 0} against the standard
// normal density, where phi is strictly increasing in one coordinate (the
// axis) and escapes to +infinity along it. Preintegration replaces the
// indicator with the exact conditional mass beyond the root of phi.
struct JumpIntegrand {
  std::size_t dim = 0;
  std::size_t axis = 0;  // preintegration coordinate, 0-based
  std::function<double(const double*)> phi;
  std::function<double(const double*)> dphi_axis;           // d phi / d x_axis
  std::function<double(const double*, std::size_t)> dphi;   // optional: any k
  std::function<double(const double*)> theta;               // null = constant
  double theta_value = 1.0;
  double scale = 1.0;  // typical magnitude of phi; sets the residual tolerance
  // Optional closed-form conditional integral (root, y) -> value of
  // integral_{root}^inf theta rho; called with root = -infinity in the
  // all-positive case.
  std::function<double(double, const double*)> closed_form_tail;

  bool constant_theta() const { return !theta; }
  double theta_at(const double* x) const { return theta ? theta(x) : theta_value; }
  // Embed (xi, y) into a full argument vector; y lists the non-axis
  // coordinates in their original order.
  void embed(double xi, const double* y, double* full) const {
    for (std::size_t i = 0; i < axis; ++i) full[i] = y[i];
    full[axis] = xi;
    for (std::size_t i = axis + 1; i < dim; ++i) full[i] = y[i - 1];
  }
};

enum class RootStatus { interior, all_positive };

struct RootResult {
  RootStatus status = RootStatus::interior;
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Safeguarded Newton for phi(., y) = 0: geometric bracket growth capped at
// |x| = 40 (phi positive throughout => all_positive), Newton steps clipped
// to the bracket with bisection fallback, residual tolerance
// 1e-12 * (1 + scale), iteration cap 50.
RootResult find_root(const JumpIntegrand& g, const std::vector<double>& y);

enum class PreintMode { closed_form, quadrature };

struct PreintResult {
  double value = 0.0;
  RootResult root;
};

// One-coordinate conditional integral
//   P(y) = integral theta(x_axis, y) rho(x_axis) dx_axis over {phi > 0}.
// closed_form uses closed_form_tail when present, else the normal-tail
// identity for constant theta; quadrature composes Gauss-Legendre panels
// above the root.
PreintResult preintegrate(const JumpIntegrand& g, const std::vector<double>& y,
                          PreintMode mode = PreintMode::closed_form);

// Gradient of the root function psi(y): component k (full-space index,
// k != axis) equals -(d phi/d x_k)/(d phi/d x_axis) at the root.
std::vector<double> psi_gradient(const JumpIntegrand& g,
                                 const std::vector<double>& y);
double psi_gradient(const JumpIntegrand& g, const std::vector<double>& y,
                    std::size_t k);

// Analytic derivative of the preintegrated function along full-space
// coordinate k: boundary term theta * (D_k phi / D_axis phi) * rho(psi)
// plus the tail integral of D_k theta when theta varies.
double dk_preintegrated(const JumpIntegrand& g, const std::vector<double>& y,
                        std::size_t k);

// Two-dimensional fixture with accumulating root branches:
//   phi(x1, x2) = exp(x1) - x2^m sin(1/x2)  (x2 > 0),  exp(x1)  (x2 <= 0).
// The root in x1 exists iff x2^m sin(1/x2) > 0 and then equals
// m log(x2) + log(sin(1/x2)); it runs to -infinity at the boundary of that
// region while the derivative of the preintegrated function decays to 0.
JumpIntegrand oscillating_integrand(int m);
bool oscillating_has_root(double x2);
double oscillating_psi(int m, double x2);  // requires oscillating_has_root

struct DecayProbe {
  double x2 = 0.0;
  bool has_root = false;
  double psi_numeric = 0.0;
  double psi_closed = 0.0;
  double d2_preintegrated = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

std::vector<DecayProbe> boundary_decay_probe(int m,
                                             const std::vector<double>& x2_values);

}  // namespace preqmc

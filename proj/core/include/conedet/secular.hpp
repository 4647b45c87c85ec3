#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conedet/expo_poly.hpp"
#include "conedet/extension_model.hpp"
#include "conedet/special_functions.hpp"

namespace conedet {

struct SecularContext {
  Lagrangian L;
  BaseSpectrum S;
  special::SeriesConfig cfg;
  std::optional<LeadingData> lead;  // empty when p(x, y) vanishes identically
  Complex C_const;                  // a (2 pi R)^{-q/2} prod 2^{-nu} Gamma(1 - nu)

  /// Validates (L, S) and computes the leading data of p(x, y).
  static SecularContext create(Lagrangian L, BaseSpectrum S, special::SeriesConfig cfg = {});

  const LeadingData& leading() const;  // throws kDegenerateDeterminant
  int log_power() const;               // q0 - j0
};

/// F = mantissa * exp(log_scale); the Bessel rows are divided by e^{|Im mu| R}.
struct ScaledValue {
  Complex mantissa;
  double log_scale = 0.0;
  double hadamard = 0.0;  // Hadamard bound of the scaled matrix

  Complex value() const;
};

/// The 2q x 2q matrix [[A, B], [J+(mu), J-(mu)]] with the Bessel rows scaled.
CMatrix secular_matrix_scaled(const SecularContext& ctx, Complex mu);

ScaledValue secular_F_scaled(const SecularContext& ctx, Complex mu);
Complex secular_F(const SecularContext& ctx, Complex mu);

/// det [[A, B], [diag(Id, R^nu), diag(log R Id, R^{-nu})]].
Complex secular_F0_closed(const Lagrangian& L, const BaseSpectrum& S);
double F0_scale(const Lagrangian& L, const BaseSpectrum& S);

/// (mu1^2 F(mu2) - mu2^2 F(mu1)) / (mu1^2 - mu2^2), cancelling the mu^2 term.
Complex secular_F0_extrapolated(const SecularContext& ctx, double mu1 = 1e-4, double mu2 = 1e-5);

/// |F(0)| <= 1e-10 (1 + Hadamard bound of the F(0) matrix).
bool has_kernel(const Lagrangian& L, const BaseSpectrum& S);

/// Winding number of F around the circle |mu - center| = radius. F is
/// evaluated through its evenness where the circle crosses the left half-plane.
int zero_order(const SecularContext& ctx, Complex center, double radius, int samples = 256);

struct Root {
  double mu = 0.0;       // positive real root, or x for F(ix) = 0
  int multiplicity = 1;
  double residual = 0.0;  // |F| divided by the local Hadamard scale
  bool from_minimum = false;  // found as a |F| minimum without a sign change
};

struct SpectrumSlice {
  std::vector<Root> positive_mus;    // eigenvalue mu^2
  std::vector<Root> negative_roots;  // eigenvalue -x^2
  bool kernel = false;
  int kernel_multiplicity = 0;
  Complex F0;
  int requested = 0;
  double mu_max = 0.0;
  double x_max = 0.0;
  double scan_step = 0.0;
  bool shortfall = false;
  std::vector<std::string> warnings;

  /// Ascending eigenvalues, repeated by multiplicity.
  std::vector<double> eigenvalues() const;
};

/// First K positive roots of F below mu_max (mu_max <= 0 picks (K + 3) pi / R)
/// and every imaginary-axis root up to the asymptotic regime.
SpectrumSlice find_eigenvalues(const SecularContext& ctx, int K, double mu_max = 0.0);

/// F(ix) / [C x^{|nu| - q/2 - 2 alpha0} e^{q x R} (gamma~ - log x)^{q0 - j0}].
Complex asymptotic_ratio(const SecularContext& ctx, double x);

struct OracleResult {
  Complex value;
  Complex log_integral;  // (1 / (pi i)) int log mu F'/F dmu over the arc
  Complex F_t;
};

/// Contour representation of the determinant over the arc mu = |t| e^{i theta},
/// theta from arg t down to arg t - pi, with n_quad Gauss-Legendre panels.
/// Refuses kernels (kKernel), arcs through a zero of F and discs |mu| < |t|
/// containing one (kContourHit).
OracleResult contour_det_oracle(const SecularContext& ctx, Complex t, int n_quad = 16);

}  // namespace conedet

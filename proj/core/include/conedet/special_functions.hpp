#pragma once

#include "conedet/linalg.hpp"

namespace conedet::special {

/// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.5772156649015329;

/// log 2 - gamma, the shift that appears in the large-|mu| behaviour of F.
double gamma_tilde();

struct SeriesConfig {
  double term_tolerance = 1e-17;  // relative size of the last series term kept
  int max_terms = 80;
  double small_z_radius = 12.0;   // |z| above which Hankel asymptotics take over

  void validate() const;
};

/// Gamma function on (-2, 4); throws at the poles 0 and -1.
double gamma(double x);

/// z^{-nu} J_nu(z), an entire even function of z, for non-integer nu in (-2, 2)
/// or nu in {0, 1}.
Complex bessel_j_scaled(double nu, Complex z, const SeriesConfig& cfg = {});

/// bessel_j_scaled(nu, z) * exp(-|Im z|). Finite for arbitrarily large |Im z|.
Complex bessel_j_scaled_e(double nu, Complex z, const SeriesConfig& cfg = {});

/// J_nu(z) on the principal branch of z^nu.
Complex bessel_j(double nu, Complex z, const SeriesConfig& cfg = {});

/// Y_0(x) for real x > 0.
double bessel_y0(double x, const SeriesConfig& cfg = {});

/// (pi/2) Y_0(mu r) - (log mu - log 2 + gamma) J_0(mu r).
///
/// The log mu terms cancel, leaving the entire even function
///   log r * J_0(mu r) - sum_{k>=1} H_k (-mu^2 r^2 / 4)^k / (k!)^2,
/// which is what the small-|mu r| branch evaluates. Throws for mu on the
/// negative real axis, where the defining expression sits on the log cut.
Complex tilde_j0(Complex mu, double r, const SeriesConfig& cfg = {});

/// tilde_j0(mu, r) * exp(-|Im mu| r).
Complex tilde_j0_e(Complex mu, double r, const SeriesConfig& cfg = {});

}  // namespace conedet::special

#include "conedet/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "conedet/errors.hpp"

namespace conedet::special {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxAsymptoticTerms = 80;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidInput, what);
}

bool is_integer(double x) { return x == std::floor(x); }

void check_order(double nu) {
  require(std::isfinite(nu) && nu > -2.0 && nu < 2.0,
          "Bessel order must lie in (-2, 2)");
  require(!(nu < 0.0 && is_integer(nu)), "negative integer Bessel order");
}

// Even functions of z are evaluated in the closed right half-plane, where
// the Hankel expansions and principal powers behave.
Complex to_right_half_plane(Complex z) {
  if (z.real() < 0.0 || (z.real() == 0.0 && z.imag() < 0.0)) return -z;
  return z;
}

// sum_k (-z^2/4)^k / (k! Gamma(nu + k + 1)) / 2^nu.
Complex scaled_series(double nu, Complex z, const SeriesConfig& cfg) {
  const Complex w = -z * z / 4.0;
  const double first = 1.0 / (std::pow(2.0, nu) * gamma(nu + 1.0));
  Complex term = first;
  Complex sum = first;
  const double w_abs = std::abs(w);
  for (int k = 1; k <= cfg.max_terms; ++k) {
    const double kk = static_cast<double>(k);
    term *= w / (kk * (nu + kk));
    sum += term;
    const bool decaying = kk * std::abs(nu + kk) > w_abs;
    if (term == Complex{} || (decaying && std::abs(term) <= cfg.term_tolerance * std::abs(sum))) {
      return sum;
    }
  }
  throw Error(ErrorCode::kNumericFailure, "Bessel series did not converge within max_terms");
}

// sum_{k>=1} H_k (-z^2/4)^k / (k!)^2
Complex harmonic_series(Complex z, const SeriesConfig& cfg) {
  const Complex w = -z * z / 4.0;
  const double w_abs = std::abs(w);
  Complex term = 1.0;
  Complex sum = 0.0;
  double harmonic = 0.0;
  for (int k = 1; k <= cfg.max_terms; ++k) {
    const double kk = static_cast<double>(k);
    term *= w / (kk * kk);
    harmonic += 1.0 / kk;
    const Complex contribution = harmonic * term;
    sum += contribution;
    if (contribution == Complex{}) return sum;
    if (kk * kk > w_abs && std::abs(contribution) <= cfg.term_tolerance * std::abs(sum)) {
      return sum;
    }
  }
  throw Error(ErrorCode::kNumericFailure, "harmonic Bessel series did not converge");
}

struct HankelPQ {
  Complex p{1.0, 0.0};
  Complex q{0.0, 0.0};
};

HankelPQ hankel_pq(double nu, Complex w, double tolerance) {
  HankelPQ out;
  const double mu4 = 4.0 * nu * nu;
  Complex u = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kMaxAsymptoticTerms; ++k) {
    const double odd = 2.0 * k - 1.0;
    const Complex next = u * ((mu4 - odd * odd) / (8.0 * k)) / w;
    const double size = std::abs(next);
    if (size == 0.0) break;  // half-integer order: the expansion terminates
    if (size > previous) break;
    previous = size;
    u = next;
    switch (k % 4) {
      case 1: out.q += u; break;
      case 2: out.p -= u; break;
      case 3: out.q -= u; break;
      default: out.p += u; break;
    }
    if (size < tolerance) break;
  }
  return out;
}

// cos(omega) and sin(omega), optionally times exp(-|Im omega|).
void cos_sin(Complex omega, bool exp_scaled, Complex& c, Complex& s) {
  const Complex i{0.0, 1.0};
  const double shift = exp_scaled ? std::abs(omega.imag()) : 0.0;
  const Complex plus = std::exp(i * omega - shift);
  const Complex minus = std::exp(-i * omega - shift);
  c = (plus + minus) / 2.0;
  s = (plus - minus) / (2.0 * i);
}

// J_nu(w) for Re w >= 0, |w| large.
Complex hankel_j(double nu, Complex w, bool exp_scaled, double tolerance) {
  const auto pq = hankel_pq(nu, w, tolerance);
  Complex c, s;
  cos_sin(w - nu * kPi / 2.0 - kPi / 4.0, exp_scaled, c, s);
  return std::sqrt(2.0 / (kPi * w)) * (pq.p * c - pq.q * s);
}

// Y_0(w) for Re w >= 0, |w| large.
Complex hankel_y0(Complex w, bool exp_scaled, double tolerance) {
  const auto pq = hankel_pq(0.0, w, tolerance);
  Complex c, s;
  cos_sin(w - kPi / 4.0, exp_scaled, c, s);
  return std::sqrt(2.0 / (kPi * w)) * (pq.p * s + pq.q * c);
}

Complex scaled_impl(double nu, Complex z, const SeriesConfig& cfg, bool exp_scaled) {
  check_order(nu);
  cfg.validate();
  if (std::abs(z) <= cfg.small_z_radius) {
    const Complex value = scaled_series(nu, z, cfg);
    return exp_scaled ? value * std::exp(-std::abs(z.imag())) : value;
  }
  const Complex w = to_right_half_plane(z);
  return std::pow(w, -nu) * hankel_j(nu, w, exp_scaled, cfg.term_tolerance);
}

Complex tilde_j0_impl(Complex mu, double r, const SeriesConfig& cfg, bool exp_scaled) {
  require(r > 0.0 && std::isfinite(r), "tilde_j0 needs r > 0");
  require(!(mu.imag() == 0.0 && mu.real() < 0.0), "tilde_j0: mu lies on the negative real axis");
  cfg.validate();
  const Complex z = mu * r;
  if (std::abs(z) <= cfg.small_z_radius) {
    const Complex value = std::log(r) * scaled_series(0.0, z, cfg) - harmonic_series(z, cfg);
    return exp_scaled ? value * std::exp(-std::abs(z.imag())) : value;
  }
  // Even in mu: evaluate where the principal log of mu r is continuous.
  const Complex m = to_right_half_plane(mu);
  const Complex w = m * r;
  const Complex shift = std::log(m) - std::log(2.0) + kEulerGamma;
  return kPi / 2.0 * hankel_y0(w, exp_scaled, cfg.term_tolerance) -
         shift * hankel_j(0.0, w, exp_scaled, cfg.term_tolerance);
}

}  // namespace

double gamma_tilde() { return std::log(2.0) - kEulerGamma; }

void SeriesConfig::validate() const {
  require(term_tolerance > 0.0, "SeriesConfig.term_tolerance must be positive");
  require(max_terms >= 10, "SeriesConfig.max_terms must be at least 10");
  require(small_z_radius > 0.0, "SeriesConfig.small_z_radius must be positive");
}

double gamma(double x) {
  require(std::isfinite(x) && x > -2.0 && x < 4.0, "gamma: argument outside (-2, 4)");
  require(!(x <= 0.0 && is_integer(x)), "gamma: pole at a nonpositive integer");
  return std::tgamma(x);
}

Complex bessel_j_scaled(double nu, Complex z, const SeriesConfig& cfg) {
  return scaled_impl(nu, z, cfg, false);
}

Complex bessel_j_scaled_e(double nu, Complex z, const SeriesConfig& cfg) {
  return scaled_impl(nu, z, cfg, true);
}

Complex bessel_j(double nu, Complex z, const SeriesConfig& cfg) {
  if (z == Complex{}) {
    require(nu >= 0.0, "J_nu(0) is singular for negative order");
    return nu == 0.0 ? Complex{1.0, 0.0} : Complex{};
  }
  return std::pow(z, nu) * bessel_j_scaled(nu, z, cfg);
}

double bessel_y0(double x, const SeriesConfig& cfg) {
  require(x > 0.0 && std::isfinite(x), "bessel_y0 needs x > 0");
  cfg.validate();
  if (x <= cfg.small_z_radius) {
    const Complex z{x, 0.0};
    const double j0 = scaled_series(0.0, z, cfg).real();
    const double h = harmonic_series(z, cfg).real();
    return 2.0 / kPi * ((std::log(x) - std::log(2.0) + kEulerGamma) * j0 - h);
  }
  return hankel_y0(Complex{x, 0.0}, false, cfg.term_tolerance).real();
}

Complex tilde_j0(Complex mu, double r, const SeriesConfig& cfg) {
  return tilde_j0_impl(mu, r, cfg, false);
}

Complex tilde_j0_e(Complex mu, double r, const SeriesConfig& cfg) {
  return tilde_j0_impl(mu, r, cfg, true);
}

}  // namespace conedet::special

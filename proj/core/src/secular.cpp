#include "conedet/secular.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "conedet/errors.hpp"

namespace conedet {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kKernelThreshold = 1e-10;
constexpr double kRootResidual = 1e-9;
constexpr double kArcHit = 1e-10;

// F is even: evaluate in the closed right half-plane so that no evaluation
// point lands on the cut of the tilde-J_0 row.
ScaledValue F_even(const SecularContext& ctx, Complex mu) {
  if (mu.real() < 0.0 || (mu.real() == 0.0 && mu.imag() < 0.0)) mu = -mu;
  return secular_F_scaled(ctx, mu);
}

double relative_size(const ScaledValue& v) {
  return v.hadamard > 0.0 ? std::abs(v.mantissa) / v.hadamard : 0.0;
}

Complex leading_constant(const LeadingData& lead, const BaseSpectrum& S) {
  Complex C = lead.a_j0alpha0 * std::pow(2.0 * kPi * S.R(), -0.5 * S.q());
  for (double nu : S.nus()) C *= std::pow(2.0, -nu) * special::gamma(1.0 - nu);
  return C;
}

CMatrix F0_matrix(const Lagrangian& L, const BaseSpectrum& S) {
  const int q = S.q();
  const int q0 = S.q0();
  CMatrix plus = CMatrix::Zero(q, q);
  CMatrix minus = CMatrix::Zero(q, q);
  for (int k = 0; k < q; ++k) {
    if (k < q0) {
      plus(k, k) = 1.0;
      minus(k, k) = std::log(S.R());
    } else {
      const double nu = S.nus()[k - q0];
      plus(k, k) = std::pow(S.R(), nu);
      minus(k, k) = std::pow(S.R(), -nu);
    }
  }
  return block2x2(L.A, L.B, plus, minus);
}

Complex ratio_from(const SecularContext& ctx, double x, const ScaledValue& f) {
  const LeadingData& lead = ctx.leading();
  if (f.mantissa == Complex{}) return 0.0;
  const double power = ctx.S.nu_sum() - 0.5 * ctx.S.q() - 2.0 * lead.alpha0_value;
  const Complex log_den = std::log(ctx.C_const) + power * std::log(x) +
                          static_cast<double>(ctx.log_power()) *
                              std::log(Complex{special::gamma_tilde() - std::log(x), 0.0});
  // The e^{q x R} factor is exactly the scale stripped from the mantissa.
  return std::exp(std::log(f.mantissa) - log_den);
}

// Sign scan of a phase-rotated F along a real parameter, with bisection and a
// |F| minimum search for roots that do not change sign.
class RootScanner {
 public:
  RootScanner(std::function<ScaledValue(double)> eval, std::vector<double> grid)
      : eval_(std::move(eval)), grid_(std::move(grid)) {}

  std::vector<Root> run() {
    values_.reserve(grid_.size());
    for (double t : grid_) values_.push_back(eval_(t));
    choose_rotation();
    std::vector<Root> roots;
    const std::size_t n = grid_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double a = g(values_[i]);
      const double b = g(values_[i + 1]);
      if (a == 0.0 && values_[i].mantissa == Complex{}) {
        roots.push_back(make_root(grid_[i], false));
      } else if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
        roots.push_back(make_root(bisect(grid_[i], grid_[i + 1], a), false));
      }
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double ga = g(values_[i - 1]);
      const double gb = g(values_[i]);
      const double gc = g(values_[i + 1]);
      const bool same_sign = (ga > 0 && gb > 0 && gc > 0) || (ga < 0 && gb < 0 && gc < 0);
      const double ra = relative_size(values_[i - 1]);
      const double rb = relative_size(values_[i]);
      const double rc = relative_size(values_[i + 1]);
      if (!same_sign || !(rb < ra && rb <= rc)) continue;
      const double t = golden_minimum(grid_[i - 1], grid_[i + 1]);
      if (relative_size(eval_(t)) <= kRootResidual) roots.push_back(make_root(t, true));
    }
    std::sort(roots.begin(), roots.end(), [](const Root& x, const Root& y) { return x.mu < y.mu; });
    return roots;
  }

 private:
  double g(const ScaledValue& v) const { return (rotation_ * v.mantissa).real(); }

  void choose_rotation() {
    const std::size_t probe = std::min<std::size_t>(values_.size(), 16);
    double best = -1.0;
    for (std::size_t i = 0; i < probe; ++i) {
      const double size = relative_size(values_[i]);
      if (size > best) {
        best = size;
        const double modulus = std::abs(values_[i].mantissa);
        rotation_ = modulus > 0.0 ? std::conj(values_[i].mantissa) / modulus : Complex{1.0, 0.0};
      }
    }
  }

  double bisect(double lo, double hi, double g_lo) const {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (hi - lo <= 1e-14 * std::abs(hi)) break;
      const double gm = g(eval_(mid));
      if (gm == 0.0) return mid;
      if ((gm < 0.0) == (g_lo < 0.0)) {
        lo = mid;
        g_lo = gm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  double golden_minimum(double lo, double hi) const {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = relative_size(eval_(x1));
    double f2 = relative_size(eval_(x2));
    for (int it = 0; it < 120 && hi - lo > 1e-15 * std::abs(hi); ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - ratio * (hi - lo);
        f1 = relative_size(eval_(x1));
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + ratio * (hi - lo);
        f2 = relative_size(eval_(x2));
      }
    }
    return f1 < f2 ? x1 : x2;
  }

  Root make_root(double t, bool from_minimum) const {
    Root r;
    r.mu = t;
    r.residual = relative_size(eval_(t));
    r.from_minimum = from_minimum;
    return r;
  }

  std::function<ScaledValue(double)> eval_;
  std::vector<double> grid_;
  std::vector<ScaledValue> values_;
  Complex rotation_{1.0, 0.0};
};

void dedupe(std::vector<Root>& roots, double spacing) {
  std::vector<Root> out;
  for (const auto& r : roots) {
    if (!out.empty() && r.mu - out.back().mu < 0.5 * spacing) {
      if (r.residual < out.back().residual) out.back() = r;
      continue;
    }
    out.push_back(r);
  }
  roots = std::move(out);
}

}  // namespace

SecularContext SecularContext::create(Lagrangian L, BaseSpectrum S, special::SeriesConfig cfg) {
  require_valid(L, S);
  cfg.validate();
  SecularContext ctx{std::move(L), std::move(S), cfg, std::nullopt, Complex{}};
  try {
    ctx.lead = leading_data(build_p(ctx.L, ctx.S), ctx.S.q0());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateDeterminant) throw;
  }
  if (ctx.lead) ctx.C_const = leading_constant(*ctx.lead, ctx.S);
  return ctx;
}

const LeadingData& SecularContext::leading() const {
  if (!lead) throw Error(ErrorCode::kDegenerateDeterminant, "p(x, y) vanishes identically");
  return *lead;
}

int SecularContext::log_power() const { return S.q0() - leading().j0; }

Complex ScaledValue::value() const { return mantissa * std::exp(log_scale); }

CMatrix secular_matrix_scaled(const SecularContext& ctx, Complex mu) {
  if (mu.imag() == 0.0 && mu.real() < 0.0) {
    throw Error(ErrorCode::kInvalidInput, "secular function: mu lies on the negative real axis");
  }
  const auto& S = ctx.S;
  const int q = S.q();
  const int q0 = S.q0();
  const double R = S.R();
  const Complex z = mu * R;
  CMatrix plus = CMatrix::Zero(q, q);
  CMatrix minus = CMatrix::Zero(q, q);
  for (int k = 0; k < q0; ++k) {
    plus(k, k) = special::bessel_j_scaled_e(0.0, z, ctx.cfg);
    minus(k, k) = special::tilde_j0_e(mu, R, ctx.cfg);
  }
  for (int j = 0; j < S.q1(); ++j) {
    const double nu = S.nus()[j];
    const int k = q0 + j;
    plus(k, k) = std::pow(2.0, nu) * special::gamma(1.0 + nu) * std::pow(R, nu) *
                 special::bessel_j_scaled_e(nu, z, ctx.cfg);
    minus(k, k) = std::pow(2.0, -nu) * special::gamma(1.0 - nu) * std::pow(R, -nu) *
                  special::bessel_j_scaled_e(-nu, z, ctx.cfg);
  }
  return block2x2(ctx.L.A, ctx.L.B, plus, minus);
}

ScaledValue secular_F_scaled(const SecularContext& ctx, Complex mu) {
  const CMatrix M = secular_matrix_scaled(ctx, mu);
  ScaledValue v;
  v.mantissa = determinant(M);
  v.log_scale = ctx.S.q() * std::abs(mu.imag()) * ctx.S.R();
  v.hadamard = hadamard_bound(M);
  return v;
}

Complex secular_F(const SecularContext& ctx, Complex mu) { return secular_F_scaled(ctx, mu).value(); }

Complex secular_F0_closed(const Lagrangian& L, const BaseSpectrum& S) {
  if (L.q() != S.q()) throw Error(ErrorCode::kInvalidInput, "Lagrangian size does not match the base spectrum");
  const int q = S.q();
  std::vector<long double> left(q, 1.0L);
  std::vector<long double> right(q, std::log(static_cast<long double>(S.R())));
  for (int k = S.q0(); k < q; ++k) {
    const long double nu = S.nus()[k - S.q0()];
    left[k] = std::pow(static_cast<long double>(S.R()), nu);
    right[k] = 1.0L / left[k];
  }
  return boundary_determinant(L.A, L.B, left, right);
}

double F0_scale(const Lagrangian& L, const BaseSpectrum& S) { return hadamard_bound(F0_matrix(L, S)); }

Complex secular_F0_extrapolated(const SecularContext& ctx, double mu1, double mu2) {
  if (!(mu1 > 0.0 && mu2 > 0.0 && mu1 != mu2)) {
    throw Error(ErrorCode::kInvalidInput, "extrapolation needs two distinct positive points");
  }
  const Complex f1 = secular_F(ctx, mu1);
  const Complex f2 = secular_F(ctx, mu2);
  const double s1 = mu1 * mu1;
  const double s2 = mu2 * mu2;
  return (s1 * f2 - s2 * f1) / (s1 - s2);
}

bool has_kernel(const Lagrangian& L, const BaseSpectrum& S) {
  return std::abs(secular_F0_closed(L, S)) <= kKernelThreshold * (1.0 + F0_scale(L, S));
}

int zero_order(const SecularContext& ctx, Complex center, double radius, int samples) {
  if (!(radius > 0.0) || samples < 16) throw Error(ErrorCode::kInvalidInput, "zero_order needs radius > 0");
  double total = 0.0;
  Complex previous = F_even(ctx, center + radius).mantissa;
  for (int k = 1; k <= samples; ++k) {
    const double theta = 2.0 * kPi * k / samples;
    const Complex current = F_even(ctx, center + std::polar(radius, theta)).mantissa;
    if (previous == Complex{} || current == Complex{}) {
      throw Error(ErrorCode::kContourHit, "F vanishes on the winding circle");
    }
    total += std::arg(current / previous);
    previous = current;
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

std::vector<double> SpectrumSlice::eigenvalues() const {
  std::vector<double> out;
  for (const auto& r : negative_roots) out.insert(out.end(), r.multiplicity, -r.mu * r.mu);
  out.insert(out.end(), kernel_multiplicity, 0.0);
  for (const auto& r : positive_mus) out.insert(out.end(), r.multiplicity, r.mu * r.mu);
  std::sort(out.begin(), out.end());
  return out;
}

SpectrumSlice find_eigenvalues(const SecularContext& ctx, int K, double mu_max) {
  if (K < 1) throw Error(ErrorCode::kInvalidInput, "K must be at least 1");
  const double R = ctx.S.R();
  const int q = ctx.S.q();
  SpectrumSlice out;
  out.requested = K;
  out.mu_max = mu_max > 0.0 ? mu_max : (K + 3) * kPi / R;
  out.scan_step = kPi / (16.0 * q * R);
  out.F0 = secular_F0_closed(ctx.L, ctx.S);
  out.kernel = has_kernel(ctx.L, ctx.S);

  double first_positive = out.scan_step;
  if (out.kernel) {
    const double radius = 0.25 * out.scan_step;
    out.kernel_multiplicity = std::max(1, zero_order(ctx, 0.0, radius) / 2);
    first_positive = 0.5 * out.scan_step;
  }

  // Positive axis.
  std::vector<double> grid;
  if (!out.kernel) grid.push_back(0.0);
  for (double mu = first_positive; mu <= out.mu_max + 0.5 * out.scan_step; mu += out.scan_step) grid.push_back(mu);
  RootScanner positive([&](double mu) { return secular_F_scaled(ctx, mu); }, grid);
  auto roots = positive.run();
  std::erase_if(roots, [](const Root& r) { return r.mu <= 0.0; });
  dedupe(roots, out.scan_step);
  int counted = 0;
  for (auto& r : roots) {
    if (counted >= K) break;
    const double radius = std::min(0.25 * out.scan_step, 0.5 * r.mu);
    r.multiplicity = std::max(1, zero_order(ctx, r.mu, radius, 128));
    if (r.residual > kRootResidual) {
      std::ostringstream msg;
      msg << "root near mu = " << r.mu << " has relative residual " << r.residual;
      out.warnings.push_back(msg.str());
    }
    counted += r.multiplicity;
    out.positive_mus.push_back(r);
  }
  if (counted < K) {
    out.shortfall = true;
    std::ostringstream msg;
    msg << "found " << counted << " of " << K << " positive eigenvalues below mu_max = " << out.mu_max;
    out.warnings.push_back(msg.str());
  }

  // Imaginary axis: F(ix) = 0 gives the eigenvalue -x^2.
  std::vector<double> xs;
  if (!out.kernel) xs.push_back(0.0);
  const double x_lo = 1e-3 / R;
  const double x_hi = 1e8 / R;
  const double factor = std::pow(10.0, 1.0 / 40.0);
  out.x_max = x_hi;
  for (double x = x_lo; x <= x_hi; x *= factor) {
    xs.push_back(x);
    if (ctx.lead && x * R >= 10.0) {
      const Complex ratio = ratio_from(ctx, x, secular_F_scaled(ctx, Complex{0.0, x}));
      if (std::abs(ratio - 1.0) < 0.1) {
        out.x_max = x;
        break;
      }
    }
  }
  RootScanner imaginary([&](double x) { return secular_F_scaled(ctx, Complex{0.0, x}); }, xs);
  auto negative = imaginary.run();
  std::erase_if(negative, [](const Root& r) { return r.mu <= 0.0; });
  std::vector<Root> kept;
  for (auto& r : negative) {
    if (!kept.empty() && r.mu < kept.back().mu * std::sqrt(factor)) continue;
    const double radius = 0.25 * r.mu * (factor - 1.0);
    r.multiplicity = std::max(1, zero_order(ctx, Complex{0.0, r.mu}, radius, 128));
    kept.push_back(r);
  }
  out.negative_roots = std::move(kept);
  int negative_count = 0;
  for (const auto& r : out.negative_roots) negative_count += r.multiplicity;
  if (negative_count > q) {
    out.warnings.push_back("more negative eigenvalues than q were found; the scan is unreliable");
  }
  if (!ctx.lead) out.warnings.push_back("p(x, y) vanishes identically: imaginary scan ran to the fixed cap");
  return out;
}

Complex asymptotic_ratio(const SecularContext& ctx, double x) {
  if (!(x >= 10.0)) throw Error(ErrorCode::kInvalidInput, "asymptotic_ratio needs x >= 10");
  return ratio_from(ctx, x, secular_F_scaled(ctx, Complex{0.0, x}));
}

OracleResult contour_det_oracle(const SecularContext& ctx, Complex t, int n_quad) {
  if (!(t.imag() > 0.0)) throw Error(ErrorCode::kInvalidInput, "t must lie in the upper half-plane");
  if (n_quad < 1) throw Error(ErrorCode::kInvalidInput, "n_quad must be positive");
  if (has_kernel(ctx.L, ctx.S)) {
    throw Error(ErrorCode::kKernel,
                "nontrivial kernel: F(0) = 0, so the determinant is not defined by this formula");
  }
  const LeadingData& lead = ctx.leading();
  const double rho = std::abs(t);
  const double theta_hi = std::arg(t);
  const double theta_lo = theta_hi - kPi;

  if (const int enclosed = zero_order(ctx, 0.0, rho, 512); enclosed != 0) {
    std::ostringstream msg;
    msg << "the disc |mu| < " << rho << " encloses " << enclosed
        << " zeros of F (an eigenvalue); choose a smaller |t|";
    throw Error(ErrorCode::kContourHit, msg.str());
  }

  auto log_derivative = [&](Complex mu) {
    const ScaledValue centre = F_even(ctx, mu);
    if (relative_size(centre) <= kArcHit) throw Error(ErrorCode::kContourHit, "contour passes through a zero of F");
    auto rel = [&](Complex z) {
      const ScaledValue v = F_even(ctx, z);
      return v.mantissa * std::exp(v.log_scale - centre.log_scale);
    };
    const double h = 1e-5 * (1.0 + std::abs(mu));
    const Complex d1 = (rel(mu + h) - rel(mu - h)) / (2.0 * h);
    const Complex d2 = (rel(mu + 0.5 * h) - rel(mu - 0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0 / centre.mantissa;
  };
  auto integrand = [&](double theta) -> Complex {
    const Complex mu = std::polar(rho, theta);
    const Complex log_mu{std::log(rho), theta};
    return log_mu * log_derivative(mu) * Complex{0.0, 1.0} * mu;
  };

  Complex integral = 0.0;
  const double width = (theta_hi - theta_lo) / n_quad;
  for (int k = 0; k < n_quad; ++k) {
    const double a = theta_lo + k * width;
    integral += boost::math::quadrature::gauss<double, 20>::integrate(integrand, a, a + width);
  }
  integral = -integral;  // the arc runs from arg t downwards

  OracleResult out;
  out.log_integral = integral / Complex{0.0, kPi};
  out.F_t = secular_F(ctx, t);
  const int n = ctx.S.q0() - lead.j0;
  const Complex prefactor = std::pow(Complex{-2.0 * std::exp(special::kEulerGamma), 0.0}, n);
  out.value = prefactor * out.F_t / ctx.C_const * std::exp(out.log_integral);
  return out;
}

}  // namespace conedet

#include "conedet/singularity.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "conedet/errors.hpp"
#include "conedet/special_functions.hpp"

namespace conedet {
namespace {

constexpr double kMergeTolerance = 1e-12;
constexpr double kCoefficientZero = 1e-11;
constexpr std::size_t kMaxTerms = 2'000'000;

struct Window {
  double xi_max = 0.0;
  int ell_max = 0;
  int max_power = 0;
};

bool is_zero_xi(double xi) { return std::abs(xi) <= kMergeTolerance; }

// Window in which truncated powers of `base` reproduce every coefficient with
// xi <= N and l <= M exactly.
Window plan_window(const SeriesTerms& base, const std::vector<double>& basis, double N, int M) {
  double xi_min = 0.0;
  int ell_min = 0;
  bool any_positive = false;
  for (const auto& [key, c] : base) {
    const double xi = exponent_value(key.m, basis);
    if (xi < -kMergeTolerance) throw Error(ErrorCode::kInvalidInput, "series has a negative y-exponent");
    if (is_zero_xi(xi)) {
      if (key.j < 1) throw Error(ErrorCode::kInvalidInput, "series has a non-nilpotent constant part");
      continue;
    }
    ell_min = any_positive ? std::min(ell_min, key.j) : key.j;
    xi_min = any_positive ? std::min(xi_min, xi) : xi;
    any_positive = true;
  }
  Window w;
  w.xi_max = N + kMergeTolerance * (1.0 + N);
  const double n1_real = any_positive ? std::floor(w.xi_max / xi_min) : 0.0;
  if (n1_real > 1e6) throw Error(ErrorCode::kNumericFailure, "smallest exponent too small for the xi window");
  const int n1 = static_cast<int>(n1_real);
  const int pad = n1 * std::max(0, -ell_min);
  w.ell_max = M + pad;
  w.max_power = n1 + M + pad;
  return w;
}

SeriesTerms multiply(const SeriesTerms& a, const SeriesTerms& b, const std::vector<double>& basis,
                     const Window& w) {
  SeriesTerms out;
  std::vector<int> m(basis.size());
  for (const auto& [ka, ca] : a) {
    for (const auto& [kb, cb] : b) {
      const int ell = ka.j + kb.j;
      if (ell > w.ell_max) continue;
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ka.m[i] + kb.m[i];
      if (exponent_value(m, basis) > w.xi_max) continue;
      out[ExpoKey{ell, m}] += ca * cb;
    }
  }
  if (out.size() > kMaxTerms) throw Error(ErrorCode::kNumericFailure, "formal series exceeds the term budget");
  return out;
}

void accumulate(SeriesTerms& acc, const SeriesTerms& add, Complex factor, int ell_max) {
  for (const auto& [key, c] : add) {
    if (key.j <= ell_max) acc[key] += factor * c;
  }
}

void drop_exact_zeros(SeriesTerms& s) {
  std::erase_if(s, [](const auto& kv) { return kv.second == Complex{}; });
}

void check_window(double N, int M) {
  if (!(N > 0.0) || !std::isfinite(N)) throw Error(ErrorCode::kInvalidInput, "N must be positive");
  if (M < 1) throw Error(ErrorCode::kInvalidInput, "M must be at least 1");
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

SeriesTerms one_plus_remainder(const LeadingData& lead) {
  SeriesTerms out;
  out[ExpoKey{0, std::vector<int>(lead.basis.size(), 0)}] = 1.0;
  for (const auto& t : lead.remainder) out[ExpoKey{t.k, t.beta_key}] += t.b;
  drop_exact_zeros(out);
  return out;
}

LogSeries log_expand(const LeadingData& lead, double N, int M) {
  check_window(N, M);
  LogSeries out;
  out.basis = lead.basis;
  out.N = N;
  out.M = M;
  if (lead.remainder.empty()) return out;

  SeriesTerms z;
  for (const auto& t : lead.remainder) z[ExpoKey{t.k, t.beta_key}] += t.b;
  drop_exact_zeros(z);
  const Window w = plan_window(z, out.basis, N, M);

  SeriesTerms power;
  for (const auto& [key, c] : z) {
    if (key.j <= w.ell_max && exponent_value(key.m, out.basis) <= w.xi_max) power[key] = c;
  }
  for (int n = 1; n <= w.max_power && !power.empty(); ++n) {
    if (n > 1) power = multiply(power, z, out.basis, w);
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;
    accumulate(out.terms, power, sign / n, w.ell_max);
  }
  drop_exact_zeros(out.terms);
  for (auto it = out.terms.begin(); it != out.terms.end();) {
    if (it->first.j > M) {
      out.padding.insert(*it);
      it = out.terms.erase(it);
    } else {
      ++it;
    }
  }
  out.ell_max = w.ell_max;
  out.max_power = w.max_power;
  return out;
}

SeriesTerms formal_exp(const LogSeries& series) {
  check_window(series.N, series.M);
  SeriesTerms out;
  out[ExpoKey{0, std::vector<int>(series.basis.size(), 0)}] = 1.0;
  SeriesTerms base = series.terms;
  for (const auto& [key, c] : series.padding) base[key] += c;
  if (base.empty()) return out;
  Window w = plan_window(base, series.basis, series.N, series.M);
  if (series.ell_max > 0) {
    w.ell_max = series.ell_max;
    w.max_power = series.max_power;
  }
  SeriesTerms power;
  for (const auto& [key, c] : base) {
    if (key.j <= w.ell_max && exponent_value(key.m, series.basis) <= w.xi_max) power[key] = c;
  }
  double inverse_factorial = 1.0;
  for (int n = 1; n <= w.max_power && !power.empty(); ++n) {
    if (n > 1) power = multiply(power, base, series.basis, w);
    inverse_factorial /= n;
    accumulate(out, power, inverse_factorial, series.M);
  }
  drop_exact_zeros(out);
  return out;
}

SingularityReport analyze_leading(const LeadingData& lead, int q0, double N, int M) {
  SingularityReport report;
  report.j0 = lead.j0;
  report.q0 = q0;
  report.log_branch_coeff_at_0 = lead.j0 - q0;
  report.alpha0_key = lead.alpha0_key;
  report.alpha0 = lead.alpha0_value;
  report.a_j0alpha0 = lead.a_j0alpha0;
  report.gamma_tilde = special::gamma_tilde();
  report.N = N;
  report.M = M;
  report.negligible = lead.negligible;

  const LogSeries series = log_expand(lead, N, M);
  report.series_terms = series.terms.size();

  struct Entry {
    double xi;
    std::vector<int> key;
    int ell;
    Complex c;
  };
  std::vector<Entry> entries;
  for (const auto& [key, c] : series.terms) {
    if (series.xi(key) <= N + kMergeTolerance * (1.0 + N)) entries.push_back({series.xi(key), key.m, key.j, c});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.xi != b.xi ? a.xi < b.xi : a.key < b.key;
  });

  for (std::size_t i = 0; i < entries.size();) {
    const double xi = std::max(0.0, entries[i].xi);
    std::size_t end = i;
    std::map<int, Complex> by_ell;
    std::vector<int> key = entries[i].key;
    double total = 0.0;
    while (end < entries.size() && entries[end].xi - entries[i].xi <= kMergeTolerance * (1.0 + xi)) {
      by_ell[entries[end].ell] += entries[end].c;
      key = std::min(key, entries[end].key);
      ++end;
    }
    i = end;
    for (const auto& [ell, c] : by_ell) total += std::abs(c);
    const double threshold = kCoefficientZero * (1.0 + total);
    const bool xi_zero = is_zero_xi(xi);

    for (const auto& [ell, c] : by_ell) {  // ascending l: first hit is the minimum
      if (ell > 0 || std::abs(c) <= threshold) continue;
      const int n = -ell;
      PoleEntry pole;
      pole.xi = xi_zero ? 0.0 : xi;
      pole.xi_key = key;
      pole.p_xi = ell;
      pole.order = n + 1;
      pole.c = c;
      pole.f_at_minus_xi = ((n + 1) % 2 == 0 ? 1.0 : -1.0) * c * factorial(n) / std::pow(2.0, n) * pole.xi;
      report.poles.push_back(std::move(pole));
      break;
    }
    for (const auto& [ell, c] : by_ell) {
      if (ell <= 0 || std::abs(c) <= threshold) continue;
      LogEntry log;
      log.xi = xi_zero ? 0.0 : xi;
      log.xi_key = key;
      log.ell_xi = ell;
      log.c = c;
      const double weight = std::pow(2.0, ell) / factorial(ell - 1);
      log.g_leading = xi_zero ? c * weight : -c * log.xi * weight;
      report.logs.push_back(std::move(log));
      break;
    }
  }
  return report;
}

SingularityReport analyze(const Lagrangian& L, const BaseSpectrum& S, double N, int M) {
  check_window(N, M);
  require_valid(L, S);
  const LeadingData lead = leading_data(build_p(L, S), S.q0());
  return analyze_leading(lead, S.q0(), N, M);
}

LogIntCheck verify_logint(double c, double t_abs, double s) {
  if (!(t_abs > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::kInvalidInput, "verify_logint needs t_abs > 0");
  if (!(std::log(t_abs) > c)) throw Error(ErrorCode::kInvalidInput, "verify_logint needs log t_abs > c");
  if (!(s > 0.0 && s <= 0.05)) throw Error(ErrorCode::kInvalidInput, "verify_logint needs 0 < s <= 0.05");

  // x = exp(c + w / (2s)) turns the integral into -e^{-2sc} int_{w0}^inf e^{-w} / w dw;
  // w = e^v then leaves the smooth integrand exp(-e^v).
  const double gap = std::log(t_abs) - c;
  const double w0 = 2.0 * s * gap;
  constexpr double kCutoff = 40.0;
  LogIntCheck out;
  out.tail_bound = std::exp(-kCutoff) / kCutoff;
  double integral = 0.0;
  const double v_lo = std::log(w0);
  const double v_hi = std::log(kCutoff);
  if (v_hi > v_lo) {
    const int panels = std::max(8, static_cast<int>(std::ceil((v_hi - v_lo) / 0.25)));
    const double width = (v_hi - v_lo) / panels;
    for (int k = 0; k < panels; ++k) {
      const double a = v_lo + k * width;
      integral += boost::math::quadrature::gauss<double, 20>::integrate(
          [](double v) { return std::exp(-std::exp(v)); }, a, a + width);
    }
  }
  const double prefactor = std::exp(-2.0 * s * c);
  out.lhs = -prefactor * integral;
  out.rhs = prefactor * (std::log(s) + special::kEulerGamma + std::log(2.0 * gap));
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace conedet

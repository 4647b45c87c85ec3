#pragma once

#include <map>
#include <vector>

#include "conedet/expo_poly.hpp"

namespace conedet {

/// Formal series in x and y; key.j is the x-power l and key.m the exact
/// multi-index of the y-exponent 2 xi.
using SeriesTerms = std::map<ExpoKey, Complex>;

struct LogSeries {
  SeriesTerms terms;
  std::vector<double> basis;
  double N = 0.0;  // xi cutoff
  int M = 0;       // l cutoff
  // Coefficients with M < l <= ell_max. Not part of the expansion proper, but
  // products with negative-l terms feed back into l <= M, so formal_exp needs them.
  SeriesTerms padding;
  int ell_max = 0;
  int max_power = 0;

  double xi(const ExpoKey& key) const { return exponent_value(key.m, basis); }
};

/// Coefficients c_{l xi} of log(1 + sum_k b_{k beta} x^k y^{2 beta}) for every
/// xi <= N and l <= M. Intermediate powers are truncated to a window wide
/// enough that every retained coefficient is exact: with n1 = floor(N / beta_min)
/// and k_min the most negative x-power among beta > 0 terms, partial products
/// keep l <= M + n1 max(0, -k_min), and powers stop at n1 + M + n1 max(0, -k_min).
LogSeries log_expand(const LeadingData& lead, double N, int M);

/// exp of the truncated series over the same (N, M) window, constant term included.
SeriesTerms formal_exp(const LogSeries& series);

/// 1 + sum_k b_{k beta} x^k y^{2 beta} as a series.
SeriesTerms one_plus_remainder(const LeadingData& lead);

struct PoleEntry {
  double xi = 0.0;
  std::vector<int> xi_key;
  int p_xi = 0;  // <= 0
  int order = 1;
  Complex c;     // c_{p_xi, xi}
  Complex f_at_minus_xi;
};

struct LogEntry {
  double xi = 0.0;
  std::vector<int> xi_key;
  int ell_xi = 1;  // > 0
  Complex c;       // c_{ell_xi, xi}
  Complex g_leading;
};

struct SingularityReport {
  int j0 = 0;
  int q0 = 0;
  int log_branch_coeff_at_0 = 0;  // j0 - q0
  std::vector<int> alpha0_key;
  double alpha0 = 0.0;
  Complex a_j0alpha0;
  double gamma_tilde = 0.0;
  double N = 0.0;
  int M = 0;
  std::vector<PoleEntry> poles;  // ascending xi
  std::vector<LogEntry> logs;    // ascending xi
  std::vector<FlaggedTerm> negligible;
  std::size_t series_terms = 0;
};

SingularityReport analyze(const Lagrangian& L, const BaseSpectrum& S, double N = 5.0, int M = 10);
SingularityReport analyze_leading(const LeadingData& lead, int q0, double N = 5.0, int M = 10);

struct LogIntCheck {
  double lhs = 0.0;  // the integral from t_abs to infinity of x^{-2s-1} / (c - log x)
  double rhs = 0.0;  // e^{-2sc} (log s + gamma + log(2 (log t_abs - c)))
  double residual = 0.0;
  double tail_bound = 0.0;
};

/// Quadrature check of the small-s behaviour of the log integral.
LogIntCheck verify_logint(double c, double t_abs, double s);

}  // namespace conedet

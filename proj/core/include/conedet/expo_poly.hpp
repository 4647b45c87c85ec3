#pragma once

#include <compare>
#include <map>
#include <vector>

#include "conedet/extension_model.hpp"
#include "conedet/linalg.hpp"

namespace conedet {

/// Monomial x^j y^{2 (m . nu)}. The multi-index m is exact; its numeric value
/// is only ever derived from the basis of the owning polynomial.
struct ExpoKey {
  int j = 0;
  std::vector<int> m;

  auto operator<=>(const ExpoKey&) const = default;
  bool operator==(const ExpoKey&) const = default;
};

/// m . nu
double exponent_value(const std::vector<int>& m, const std::vector<double>& basis);

/// Sparse polynomial in x and y over a fixed basis nu_1..nu_{q1} of
/// y-exponents. Exact zeros are never stored.
class ExpoPoly {
 public:
  using Terms = std::map<ExpoKey, Complex>;

  ExpoPoly() = default;
  explicit ExpoPoly(std::vector<double> basis) : basis_(std::move(basis)) {}

  static ExpoPoly constant(std::vector<double> basis, Complex c);
  static ExpoPoly monomial(std::vector<double> basis, ExpoKey key, Complex c);

  const Terms& terms() const { return terms_; }
  const std::vector<double>& basis() const { return basis_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  double alpha(const ExpoKey& key) const { return exponent_value(key.m, basis_); }

  void add_term(const ExpoKey& key, Complex c);

  /// Sum of c x^j y^{2 alpha}, y > 0.
  Complex evaluate(Complex x, double y) const;

  ExpoPoly& operator+=(const ExpoPoly& other);
  ExpoPoly& operator-=(const ExpoPoly& other);
  ExpoPoly& operator*=(Complex c);
  friend ExpoPoly operator+(ExpoPoly a, const ExpoPoly& b) { return a += b; }
  friend ExpoPoly operator-(ExpoPoly a, const ExpoPoly& b) { return a -= b; }
  friend ExpoPoly operator*(ExpoPoly a, Complex c) { return a *= c; }
  friend ExpoPoly operator*(const ExpoPoly& a, const ExpoPoly& b);
  ExpoPoly operator-() const { return *this * Complex{-1.0, 0.0}; }

  friend bool operator==(const ExpoPoly&, const ExpoPoly&) = default;

 private:
  void check_compatible(const ExpoPoly& other) const;

  std::vector<double> basis_;
  Terms terms_;
};

using PolyMatrix = std::vector<std::vector<ExpoPoly>>;

/// The 2q x 2q matrix [[A, B], [D, Id]] with
/// D = diag(x Id_{q0}, tau_j y^{2 nu_j}).
PolyMatrix polyp_matrix(const Lagrangian& L, const BaseSpectrum& S);

/// p(x, y) = det polyp_matrix(L, S), expanded as the sum over column subsets
/// of det(A - B D) = sum_S (-1)^{|S|} det(M_S) prod_{k in S} d_k.
ExpoPoly build_p(const Lagrangian& L, const BaseSpectrum& S);

/// Determinant over the ExpoPoly ring by Laplace expansion along rows,
/// memoized on the remaining column set. Cost grows like n 2^n, so this is
/// meant for n <= 16.
ExpoPoly poly_det(const PolyMatrix& M);

struct RemainderTerm {
  int k = 0;
  std::vector<int> beta_key;  // may have negative entries
  double beta_value = 0.0;
  Complex b;
};

struct FlaggedTerm {
  ExpoKey key;
  double alpha_value = 0.0;
  Complex coefficient;
};

struct LeadingData {
  int j0 = 0;
  std::vector<int> alpha0_key;
  double alpha0_value = 0.0;
  Complex a_j0alpha0;
  std::vector<RemainderTerm> remainder;
  std::vector<double> basis;
  /// Merged coefficients below 1e-13 of the largest one. Reported, and left
  /// out of the leading-term choice and of the remainder.
  std::vector<FlaggedTerm> negligible;
};

/// Keys whose alpha values agree to 1e-12 (1 + alpha) are merged onto the
/// lexicographically smallest key of their cluster before the leading term
/// x^{j0} y^{2 alpha0} is factored out.
LeadingData leading_data(const ExpoPoly& p, int q0);

}  // namespace conedet

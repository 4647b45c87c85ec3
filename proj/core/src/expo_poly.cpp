#include "conedet/expo_poly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "conedet/errors.hpp"

namespace conedet {
namespace {

constexpr double kMergeTolerance = 1e-12;
constexpr double kNegligible = 1e-13;

std::vector<int> add_keys(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

class SubsetDet {
 public:
  explicit SubsetDet(const PolyMatrix& M) : M_(M), n_(static_cast<int>(M.size())) {}

  ExpoPoly operator()(std::uint32_t columns) {
    if (columns == 0) return ExpoPoly::constant(M_[0][0].basis(), 1.0);
    if (auto it = memo_.find(columns); it != memo_.end()) return it->second;
    const int row = n_ - std::popcount(columns);
    ExpoPoly sum(M_[0][0].basis());
    int position = 0;
    for (int c = 0; c < n_; ++c) {
      if (!(columns & (1u << c))) continue;
      const ExpoPoly& entry = M_[row][c];
      if (!entry.is_zero()) {
        ExpoPoly minor = (*this)(columns & ~(1u << c));
        if (!minor.is_zero()) {
          ExpoPoly product = entry * minor;
          if (position % 2 == 0) {
            sum += product;
          } else {
            sum -= product;
          }
        }
      }
      ++position;
    }
    return memo_.emplace(columns, std::move(sum)).first->second;
  }

 private:
  const PolyMatrix& M_;
  int n_;
  std::unordered_map<std::uint32_t, ExpoPoly> memo_;
};

}  // namespace

double exponent_value(const std::vector<int>& m, const std::vector<double>& basis) {
  double value = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) value += m[i] * basis[i];
  return value;
}

ExpoPoly ExpoPoly::constant(std::vector<double> basis, Complex c) {
  const auto n = basis.size();
  return monomial(std::move(basis), ExpoKey{0, std::vector<int>(n, 0)}, c);
}

ExpoPoly ExpoPoly::monomial(std::vector<double> basis, ExpoKey key, Complex c) {
  if (key.m.size() != basis.size()) throw Error(ErrorCode::kInvalidInput, "multi-index length mismatch");
  ExpoPoly p(std::move(basis));
  p.add_term(key, c);
  return p;
}

void ExpoPoly::add_term(const ExpoKey& key, Complex c) {
  if (key.m.size() != basis_.size()) throw Error(ErrorCode::kInvalidInput, "multi-index length mismatch");
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

Complex ExpoPoly::evaluate(Complex x, double y) const {
  if (!(y > 0.0)) throw Error(ErrorCode::kInvalidInput, "evaluate needs y > 0");
  Complex sum = 0.0;
  for (const auto& [key, c] : terms_) {
    sum += c * std::pow(x, key.j) * std::pow(y, 2.0 * alpha(key));
  }
  return sum;
}

void ExpoPoly::check_compatible(const ExpoPoly& other) const {
  if (basis_ != other.basis_) throw Error(ErrorCode::kInvalidInput, "ExpoPoly operands use different bases");
}

ExpoPoly& ExpoPoly::operator+=(const ExpoPoly& other) {
  check_compatible(other);
  for (const auto& [key, c] : other.terms_) add_term(key, c);
  return *this;
}

ExpoPoly& ExpoPoly::operator-=(const ExpoPoly& other) {
  check_compatible(other);
  for (const auto& [key, c] : other.terms_) add_term(key, -c);
  return *this;
}

ExpoPoly& ExpoPoly::operator*=(Complex c) {
  if (c == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    it = it->second == Complex{} ? terms_.erase(it) : std::next(it);
  }
  return *this;
}

ExpoPoly operator*(const ExpoPoly& a, const ExpoPoly& b) {
  a.check_compatible(b);
  ExpoPoly out(a.basis_);
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      out.add_term(ExpoKey{ka.j + kb.j, add_keys(ka.m, kb.m)}, ca * cb);
    }
  }
  return out;
}

PolyMatrix polyp_matrix(const Lagrangian& L, const BaseSpectrum& S) {
  const int q = S.q();
  if (L.q() != q || L.B.rows() != q || L.A.cols() != q || L.B.cols() != q) {
    throw Error(ErrorCode::kInvalidInput, "Lagrangian size does not match the base spectrum");
  }
  const auto& basis = S.nus();
  const int q0 = S.q0();
  const std::vector<int> zero(basis.size(), 0);
  PolyMatrix M(2 * q, std::vector<ExpoPoly>(2 * q, ExpoPoly(basis)));
  for (int r = 0; r < q; ++r) {
    for (int c = 0; c < q; ++c) {
      M[r][c] = ExpoPoly::constant(basis, L.A(r, c));
      M[r][q + c] = ExpoPoly::constant(basis, L.B(r, c));
    }
    M[q + r][q + r] = ExpoPoly::constant(basis, 1.0);
    if (r < q0) {
      M[q + r][r] = ExpoPoly::monomial(basis, ExpoKey{1, zero}, 1.0);
    } else {
      std::vector<int> m = zero;
      m[r - q0] = 1;
      M[q + r][r] = ExpoPoly::monomial(basis, ExpoKey{0, m}, S.taus()[r - q0]);
    }
  }
  return M;
}

ExpoPoly build_p(const Lagrangian& L, const BaseSpectrum& S) {
  const int q = S.q();
  if (L.q() != q || L.B.rows() != q || L.A.cols() != q || L.B.cols() != q) {
    throw Error(ErrorCode::kInvalidInput, "Lagrangian size does not match the base spectrum");
  }
  if (q > 24) throw Error(ErrorCode::kInvalidInput, "build_p supports q <= 24");
  const int q0 = S.q0();
  const int q1 = S.q1();
  ExpoPoly p(S.nus());
  CMatrix M(q, q);
  for (std::uint32_t subset = 0; subset < (1u << q); ++subset) {
    ExpoKey key{0, std::vector<int>(q1, 0)};
    Complex weight = (std::popcount(subset) % 2 == 0) ? 1.0 : -1.0;
    for (int k = 0; k < q; ++k) {
      const bool from_b = subset & (1u << k);
      M.col(k) = from_b ? L.B.col(k) : L.A.col(k);
      if (!from_b) continue;
      if (k < q0) {
        ++key.j;
      } else {
        key.m[k - q0] = 1;
        weight *= S.taus()[k - q0];
      }
    }
    p.add_term(key, weight * determinant(M));
  }
  return p;
}

ExpoPoly poly_det(const PolyMatrix& M) {
  const auto n = M.size();
  if (n == 0) throw Error(ErrorCode::kInvalidInput, "poly_det of an empty matrix");
  if (n > 31) throw Error(ErrorCode::kInvalidInput, "poly_det supports at most 31 rows");
  for (const auto& row : M) {
    if (row.size() != n) throw Error(ErrorCode::kInvalidInput, "poly_det needs a square matrix");
    for (const auto& entry : row) {
      if (entry.basis() != M[0][0].basis()) {
        throw Error(ErrorCode::kInvalidInput, "poly_det entries use different bases");
      }
    }
  }
  SubsetDet det(M);
  return det((1u << n) - 1u);
}

LeadingData leading_data(const ExpoPoly& p, int q0) {
  if (q0 < 0) throw Error(ErrorCode::kInvalidInput, "q0 must be nonnegative");
  LeadingData out;
  out.basis = p.basis();
  if (p.is_zero()) throw Error(ErrorCode::kDegenerateDeterminant, "p(x, y) vanishes identically");

  // Cluster the distinct multi-indices by numeric exponent value.
  std::vector<std::pair<double, std::vector<int>>> keys;
  for (const auto& [key, c] : p.terms()) keys.emplace_back(p.alpha(key), key.m);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  std::map<std::vector<int>, std::vector<int>> representative;
  std::map<std::vector<int>, double> cluster_value;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t end = i + 1;
    const double start = keys[i].first;
    while (end < keys.size() && keys[end].first - start <= kMergeTolerance * (1.0 + std::abs(start))) ++end;
    std::vector<int> rep = keys[i].second;
    for (std::size_t k = i; k < end; ++k) rep = std::min(rep, keys[k].second);
    for (std::size_t k = i; k < end; ++k) representative[keys[k].second] = rep;
    cluster_value[rep] = start;
    i = end;
  }

  std::map<std::pair<std::vector<int>, int>, Complex> merged;  // (rep, j) -> coefficient
  for (const auto& [key, c] : p.terms()) {
    if (key.j < 0 || key.j > q0) {
      throw Error(ErrorCode::kInvalidInput, "p(x, y) has an x-power outside [0, q0]");
    }
    merged[{representative.at(key.m), key.j}] += c;
  }

  double scale = 0.0;
  for (const auto& [k, c] : merged) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) throw Error(ErrorCode::kDegenerateDeterminant, "p(x, y) vanishes identically");

  bool found = false;
  std::pair<std::vector<int>, int> lead_key;
  for (const auto& [k, c] : merged) {
    const double value = cluster_value.at(k.first);
    if (std::abs(c) <= kNegligible * scale) {
      out.negligible.push_back({ExpoKey{k.second, k.first}, value, c});
      continue;
    }
    const double best = found ? cluster_value.at(lead_key.first) : 0.0;
    if (!found || value < best || (value == best && k.second < lead_key.second)) {
      lead_key = k;
      found = true;
    }
  }

  out.j0 = lead_key.second;
  out.alpha0_key = lead_key.first;
  out.alpha0_value = cluster_value.at(lead_key.first);
  out.a_j0alpha0 = merged.at(lead_key);
  for (const auto& [k, c] : merged) {
    if (k == lead_key || std::abs(c) <= kNegligible * scale) continue;
    RemainderTerm term;
    term.k = k.second - out.j0;
    term.beta_key.resize(k.first.size());
    for (std::size_t i = 0; i < k.first.size(); ++i) term.beta_key[i] = k.first[i] - out.alpha0_key[i];
    term.beta_value = cluster_value.at(k.first) - out.alpha0_value;
    term.b = c / out.a_j0alpha0;
    out.remainder.push_back(std::move(term));
  }
  return out;
}

}  // namespace conedet

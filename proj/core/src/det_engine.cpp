#include "conedet/det_engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "conedet/errors.hpp"
#include "conedet/expo_poly.hpp"
#include "conedet/secular.hpp"
#include "conedet/special_functions.hpp"

namespace conedet {
namespace {

constexpr double kPi = std::numbers::pi;

Complex log_power_factor(int n) {
  return std::pow(Complex{-2.0 * std::exp(special::kEulerGamma), 0.0}, n);
}

double relative_difference(Complex a, Complex b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

// det [[A, B], [diag(1, R^{2 nu}), diag(log R, 1)]].
Complex ratio_determinant(const Lagrangian& L, const BaseSpectrum& S) {
  const int q = S.q();
  std::vector<long double> left(q, 1.0L);
  std::vector<long double> right(q, 1.0L);
  for (int k = 0; k < q; ++k) {
    if (k < S.q0()) {
      right[k] = std::log(static_cast<long double>(S.R()));
    } else {
      left[k] = std::pow(static_cast<long double>(S.R()), 2.0L * S.nus()[k - S.q0()]);
    }
  }
  return boundary_determinant(L.A, L.B, left, right);
}

bool is_zero_entry(Complex z, double scale) { return std::abs(z) <= 1e-14 * (1.0 + scale); }

int numerical_rank(const CMatrix& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  const double top = sv.maxCoeff();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (top > 0.0 && sv(i) > 1e-10 * top) ++rank;
  }
  return rank;
}

}  // namespace

std::string_view to_string(DetMethod method) {
  switch (method) {
    case DetMethod::kGeneral: return "general";
    case DetMethod::kRatio: return "ratio";
    case DetMethod::kNeumann: return "neumann";
    case DetMethod::kRowCol: return "rowcol";
    case DetMethod::kDecomposable: return "decomposable";
    case DetMethod::kOneD: return "oned";
    case DetMethod::kContourOracle: return "oracle";
  }
  return "unknown";
}

std::optional<DetMethod> parse_det_method(std::string_view name) {
  for (auto m : {DetMethod::kGeneral, DetMethod::kRatio, DetMethod::kNeumann, DetMethod::kRowCol,
                 DetMethod::kDecomposable, DetMethod::kOneD, DetMethod::kContourOracle}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string inputs_digest(const Lagrangian& L, const BaseSpectrum& S) {
  std::uint64_t hash = 1469598103934665603ULL;
  auto mix = [&hash](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash ^= bytes[i];
      hash *= 1099511628211ULL;
    }
  };
  const double R = S.R();
  const int q0 = S.q0();
  mix(&R, sizeof R);
  mix(&q0, sizeof q0);
  for (double nu : S.nus()) mix(&nu, sizeof nu);
  for (const CMatrix* m : {&L.A, &L.B}) {
    for (Eigen::Index r = 0; r < m->rows(); ++r) {
      for (Eigen::Index c = 0; c < m->cols(); ++c) {
        const double parts[2] = {(*m)(r, c).real(), (*m)(r, c).imag()};
        mix(parts, sizeof parts);
      }
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void require_trivial_kernel(const Lagrangian& L, const BaseSpectrum& S) {
  if (has_kernel(L, S)) {
    std::ostringstream msg;
    msg << "nontrivial kernel: F(0) = " << std::abs(secular_F0_closed(L, S))
        << " vanishes, and the closed-form determinant requires ker L_L = {0}";
    throw Error(ErrorCode::kKernel, msg.str());
  }
}

Complex det_neumann(const BaseSpectrum& S) {
  Complex value = std::pow(2.0 * kPi * S.R(), 0.5 * S.q());
  for (double nu : S.nus()) value *= std::pow(2.0, nu) * std::pow(S.R(), -nu) / special::gamma(1.0 - nu);
  return value;
}

DetResult det_general(const Lagrangian& L, const BaseSpectrum& S) {
  require_valid(L, S);
  require_trivial_kernel(L, S);
  const LeadingData lead = leading_data(build_p(L, S), S.q0());
  DetResult result;
  result.method = DetMethod::kGeneral;
  result.F0 = secular_F0_closed(L, S);
  result.inputs_digest = inputs_digest(L, S);
  Complex value = std::pow(2.0 * kPi * S.R(), 0.5 * S.q()) / lead.a_j0alpha0;
  for (double nu : S.nus()) value *= std::pow(2.0, nu) / special::gamma(1.0 - nu);
  result.value = value * log_power_factor(S.q0() - lead.j0) * result.F0;
  result.cross_check_residuals["ratio_times_neumann"] =
      relative_difference(result.value, det_ratio(L, S) * det_neumann(S));
  if (!lead.negligible.empty()) {
    result.notes.push_back("p(x, y) has coefficients below 1e-13 of its largest; they were ignored");
  }
  return result;
}

Complex det_ratio(const Lagrangian& L, const BaseSpectrum& S) {
  require_valid(L, S);
  require_trivial_kernel(L, S);
  const LeadingData lead = leading_data(build_p(L, S), S.q0());
  return log_power_factor(S.q0() - lead.j0) / lead.a_j0alpha0 * ratio_determinant(L, S);
}

std::optional<RowColLayout> detect_rowcol(const Lagrangian& L) {
  const int q = L.q();
  const double scale = max_abs(L.A);
  std::vector<int> zero;
  std::vector<int> rest;
  for (int i = 0; i < q; ++i) {
    bool is_zero = true;
    for (int k = 0; k < q && is_zero; ++k) {
      is_zero = is_zero_entry(L.A(i, k), scale) && is_zero_entry(L.A(k, i), scale);
    }
    (is_zero ? zero : rest).push_back(i);
  }
  const int r = static_cast<int>(zero.size());
  if (numerical_rank(L.A) != q - r) return std::nullopt;
  RowColLayout layout;
  layout.r = r;
  layout.perm = zero;
  layout.perm.insert(layout.perm.end(), rest.begin(), rest.end());
  return layout;
}

Complex det_rowcol(const Lagrangian& L, const BaseSpectrum& S, const std::vector<int>& perm, int r) {
  require_valid(L, S);
  const int q = S.q();
  const int q0 = S.q0();
  if (static_cast<int>(perm.size()) != q || r < 0 || r > q) {
    throw Error(ErrorCode::kInvalidInput, "rowcol: perm must list q indices and 0 <= r <= q");
  }
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < q; ++i) {
    if (sorted[i] != i) throw Error(ErrorCode::kInvalidInput, "rowcol: perm is not a permutation of 0..q-1");
  }
  for (int k = 1; k < r; ++k) {
    if (perm[k - 1] >= perm[k]) throw Error(ErrorCode::kInvalidInput, "rowcol: zero indices must increase");
  }
  const double scale = max_abs(L.A);
  for (int k = 0; k < r; ++k) {
    const int i = perm[k];
    for (int c = 0; c < q; ++c) {
      if (!is_zero_entry(L.A(i, c), scale) || !is_zero_entry(L.A(c, i), scale)) {
        throw Error(ErrorCode::kInvalidInput,
                    "rowcol: A has a nonzero entry in a listed zero row/column; use the ratio method");
      }
    }
  }
  if (numerical_rank(L.A) != q - r) {
    throw Error(ErrorCode::kInvalidInput, "rowcol: rank(A) differs from q - r; use the ratio method");
  }
  require_trivial_kernel(L, S);

  CMatrix selected = CMatrix::Zero(q, q);
  CMatrix complement = CMatrix::Zero(q, q);
  for (int k = 0; k < q; ++k) (k < r ? selected : complement)(perm[k], perm[k]) = 1.0;
  const Complex pivot = determinant(block2x2(L.A, L.B, selected, complement));
  if (std::abs(pivot) <= 1e-12 * hadamard_bound(block2x2(L.A, L.B, selected, complement))) {
    throw Error(ErrorCode::kNumericFailure, "rowcol: det[[A, B], [I_r, I_{q-r}]] vanishes");
  }
  int j0 = 0;
  Complex factor = 1.0;
  for (int k = 0; k < r; ++k) {
    if (perm[k] < q0) {
      ++j0;
    } else {
      const double nu = S.nus()[perm[k] - q0];
      factor *= std::pow(2.0, -2.0 * nu) * special::gamma(1.0 - nu) / special::gamma(1.0 + nu);
    }
  }
  return log_power_factor(q0 - j0) * factor / pivot * ratio_determinant(L, S);
}

Lagrangian assemble_decomposable(const Lagrangian& L0, const Lagrangian& L1) {
  if (L0.q0 != L0.q() || L1.q0 != 0) {
    throw Error(ErrorCode::kInvalidInput, "decomposable: L0 must be the q0 block and L1 the q1 block");
  }
  const int q0 = L0.q();
  const int q = q0 + L1.q();
  Lagrangian L;
  L.q0 = q0;
  L.A = CMatrix::Zero(q, q);
  L.B = CMatrix::Zero(q, q);
  L.A.topLeftCorner(q0, q0) = L0.A;
  L.B.topLeftCorner(q0, q0) = L0.B;
  L.A.bottomRightCorner(L1.q(), L1.q()) = L1.A;
  L.B.bottomRightCorner(L1.q(), L1.q()) = L1.B;
  return L;
}

std::optional<std::pair<Lagrangian, Lagrangian>> split_decomposable(const Lagrangian& L) {
  const int q = L.q();
  const int q0 = L.q0;
  const int q1 = q - q0;
  for (const CMatrix* m : {&L.A, &L.B}) {
    const double scale = max_abs(*m);
    for (int i = 0; i < q; ++i) {
      for (int k = 0; k < q; ++k) {
        if ((i < q0) != (k < q0) && !is_zero_entry((*m)(i, k), scale)) return std::nullopt;
      }
    }
  }
  Lagrangian L0{L.A.topLeftCorner(q0, q0), L.B.topLeftCorner(q0, q0), q0};
  Lagrangian L1{L.A.bottomRightCorner(q1, q1), L.B.bottomRightCorner(q1, q1), 0};
  return std::make_pair(std::move(L0), std::move(L1));
}

Complex det_decomposable(const Lagrangian& L0, const Lagrangian& L1, const BaseSpectrum& S) {
  if (L0.q() != S.q0() || L1.q() != S.q1()) {
    throw Error(ErrorCode::kInvalidInput, "decomposable: block sizes do not match q0 and q1");
  }
  const Lagrangian L = assemble_decomposable(L0, L1);
  require_valid(L, S);
  require_trivial_kernel(L, S);
  const int q0 = S.q0();
  const int q1 = S.q1();

  int j0 = 0;
  Complex a_j0 = 1.0;
  Complex block0 = 1.0;
  if (q0 > 0) {
    const BaseSpectrum S0 = BaseSpectrum::create(S.R(), q0, {});
    const LeadingData lead0 = leading_data(build_p(L0, S0), q0);
    j0 = lead0.j0;
    a_j0 = lead0.a_j0alpha0;
    block0 = determinant(block2x2(L0.A, L0.B, CMatrix::Identity(q0, q0),
                                  std::log(S.R()) * CMatrix::Identity(q0, q0)));
  }
  Complex b_alpha0 = 1.0;
  Complex block1 = 1.0;
  if (q1 > 0) {
    const BaseSpectrum S1 = BaseSpectrum::create(S.R(), 0, S.nus());
    b_alpha0 = leading_data(build_p(L1, S1), 0).a_j0alpha0;
    CMatrix r_plus = CMatrix::Zero(q1, q1);
    CMatrix r_minus = CMatrix::Zero(q1, q1);
    for (int j = 0; j < q1; ++j) {
      r_plus(j, j) = std::pow(S.R(), S.nus()[j]);
      r_minus(j, j) = std::pow(S.R(), -S.nus()[j]);
    }
    block1 = determinant(block2x2(L1.A, L1.B, r_plus, r_minus));
  }
  Complex value = std::pow(2.0 * kPi * S.R(), 0.5 * S.q()) / (a_j0 * b_alpha0);
  for (double nu : S.nus()) value *= std::pow(2.0, nu) / special::gamma(1.0 - nu);
  return value * log_power_factor(q0 - j0) * block0 * block1;
}

Complex det_oned(double lambda, double alpha, double beta, double R) {
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorCode::kInvalidInput, "R must be positive");
  if (!(lambda >= -0.25 && lambda < 0.75)) throw Error(ErrorCode::kInvalidInput, "lambda must lie in [-1/4, 3/4)");
  const double norm = std::hypot(alpha, beta);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorCode::kInvalidInput, "alpha = beta = 0");
  alpha /= norm;
  beta /= norm;
  const double root = std::sqrt(2.0 * kPi * R);
  double value = 0.0;
  if (lambda == -0.25) {
    value = alpha != 0.0 ? 2.0 * root * std::exp(special::kEulerGamma) * (beta / alpha - std::log(R)) : root;
  } else {
    const double nu = std::sqrt(lambda + 0.25);
    value = alpha != 0.0 ? std::pow(2.0, nu + 0.5) * std::sqrt(kPi * R) / special::gamma(1.0 - nu) *
                               (std::pow(R, -nu) - beta / alpha * std::pow(R, nu))
                         : std::pow(2.0, 0.5 - nu) * std::sqrt(kPi * R) / special::gamma(1.0 + nu) *
                               std::pow(R, nu);
  }
  if (value == 0.0) throw Error(ErrorCode::kKernel, "nontrivial kernel: the one-dimensional extension is not invertible");
  return value;
}

Complex det_full(const Lagrangian& L, const BaseSpectrum& S, const RegularPart& reg) {
  return det_general(L, S).value * reg.det_tilde;
}

}  // namespace conedet

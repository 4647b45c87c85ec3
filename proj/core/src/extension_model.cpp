#include "conedet/extension_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "conedet/errors.hpp"
#include "conedet/special_functions.hpp"

namespace conedet {
namespace {

constexpr double kRankThreshold = 1e-10;
constexpr double kHermiticityThreshold = 1e-10;

Lagrangian diagonal_pair(const std::vector<int>& b_diag, int q0) {
  const auto q = static_cast<Eigen::Index>(b_diag.size());
  Lagrangian L;
  L.q0 = q0;
  L.A = CMatrix::Zero(q, q);
  L.B = CMatrix::Zero(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    L.B(i, i) = static_cast<double>(b_diag[i]);
    L.A(i, i) = 1.0 - static_cast<double>(b_diag[i]);
  }
  return L;
}

void check_block_sizes(int q0, int q1) {
  if (q0 < 0 || q1 < 0 || q0 + q1 < 1) {
    throw Error(ErrorCode::kInvalidInput, "need q0, q1 >= 0 and q0 + q1 >= 1");
  }
}

}  // namespace

BaseSpectrum BaseSpectrum::create(double R, int q0, std::vector<double> nus) {
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorCode::kInvalidInput, "R must be positive");
  if (q0 < 0) throw Error(ErrorCode::kInvalidInput, "q0 must be nonnegative");
  if (q0 + static_cast<int>(nus.size()) < 1) throw Error(ErrorCode::kInvalidInput, "q must be at least 1");
  BaseSpectrum s;
  s.R_ = R;
  s.q0_ = q0;
  s.taus_.reserve(nus.size());
  for (double nu : nus) {
    if (!(nu > 0.0 && nu < 1.0)) throw Error(ErrorCode::kInvalidInput, "every nu must lie in (0, 1)");
    s.taus_.push_back(tau_from_nu(nu));
  }
  s.nus_ = std::move(nus);
  return s;
}

BaseSpectrum BaseSpectrum::from_lambdas(double R, int q0, const std::vector<double>& lambdas) {
  std::vector<double> nus;
  nus.reserve(lambdas.size());
  for (double lambda : lambdas) nus.push_back(nu_tau_from_lambda(lambda).first);
  return create(R, q0, std::move(nus));
}

double BaseSpectrum::nu_sum() const { return std::accumulate(nus_.begin(), nus_.end(), 0.0); }

double tau_from_nu(double nu) {
  return std::pow(2.0, 2.0 * nu) * special::gamma(1.0 + nu) / special::gamma(1.0 - nu);
}

std::pair<double, double> nu_tau_from_lambda(double lambda) {
  if (!std::isfinite(lambda)) throw Error(ErrorCode::kInvalidInput, "lambda must be finite");
  if (lambda == -0.25) {
    throw Error(ErrorCode::kLambdaInQ0Block, "lambda = -1/4 belongs to the q0 block");
  }
  if (lambda < -0.25) throw Error(ErrorCode::kInvalidInput, "lambda below -1/4");
  if (lambda >= 0.75) {
    throw Error(ErrorCode::kLambdaLimitPoint, "lambda >= 3/4 is limit point: no extension freedom");
  }
  const double nu = std::sqrt(lambda + 0.25);
  return {nu, tau_from_nu(nu)};
}

ValidationReport validate_lagrangian(const CMatrix& A, const CMatrix& B, int q0) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows()) {
    throw Error(ErrorCode::kInvalidInput, "A and B must be square of equal size");
  }
  const auto q = A.rows();
  if (q < 1) throw Error(ErrorCode::kInvalidInput, "q must be at least 1");
  if (q0 < 0 || q0 > q) throw Error(ErrorCode::kInvalidInput, "q0 must lie in [0, q]");

  ValidationReport report;
  CMatrix stacked(q, 2 * q);
  stacked << A, B;
  Eigen::JacobiSVD<CMatrix> svd(stacked);
  const auto& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv.maxCoeff() : 0.0;
  int kept = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sigma_max > 0.0 && sv(i) > kRankThreshold * sigma_max) ++kept;
  }
  report.rank_defect = static_cast<int>(q) - kept;

  CMatrix a_prime = A;
  a_prime.leftCols(q0) *= -1.0;
  const CMatrix product = a_prime * B.adjoint();
  report.hermiticity_residual = max_abs(product - product.adjoint());
  report.tolerance = kHermiticityThreshold * (1.0 + max_abs(A) * max_abs(B));

  if (report.rank_defect != 0) {
    std::ostringstream msg;
    msg << "[A B] has rank " << kept << ", expected " << q;
    report.messages.push_back(msg.str());
  }
  if (report.hermiticity_residual > report.tolerance) {
    std::ostringstream msg;
    msg << "A'B* is not Hermitian: residual " << report.hermiticity_residual << " exceeds "
        << report.tolerance;
    report.messages.push_back(msg.str());
  }
  report.is_lagrangian = report.messages.empty();
  return report;
}

ValidationReport validate_lagrangian(const Lagrangian& L) { return validate_lagrangian(L.A, L.B, L.q0); }

void require_valid(const Lagrangian& L, const BaseSpectrum& S) {
  if (L.A.rows() != S.q() || L.B.rows() != S.q() || L.q0 != S.q0()) {
    throw Error(ErrorCode::kInvalidInput, "Lagrangian size does not match the base spectrum");
  }
  const auto report = validate_lagrangian(L);
  if (!report.is_lagrangian) {
    throw Error(ErrorCode::kInvalidExtension, report.messages.front());
  }
}

Lagrangian make_friedrichs(int q0, int q1) {
  check_block_sizes(q0, q1);
  return diagonal_pair(std::vector<int>(q0 + q1, 1), q0);
}

Lagrangian make_neumann(int q0, int q1) {
  check_block_sizes(q0, q1);
  std::vector<int> mask(q0 + q1, 0);
  std::fill(mask.begin(), mask.begin() + q0, 1);
  return diagonal_pair(mask, q0);
}

Lagrangian make_scale_invariant(const std::vector<int>& mask, int q0) {
  const int q = static_cast<int>(mask.size());
  check_block_sizes(q0, q - q0);
  for (int i = 0; i < q; ++i) {
    if (mask[i] != 0 && mask[i] != 1) throw Error(ErrorCode::kInvalidInput, "mask entries must be 0 or 1");
    if (i < q0 && mask[i] != 1) {
      throw Error(ErrorCode::kInvalidInput, "the first q0 mask entries must be 1");
    }
  }
  return diagonal_pair(mask, q0);
}

}  // namespace conedet

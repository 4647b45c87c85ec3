#pragma once

#include <string>
#include <utility>
#include <vector>

#include "conedet/linalg.hpp"

namespace conedet {

/// Base eigenvalue data of the cone cross-section: radius R, the multiplicity
/// q0 of lambda = -1/4 and the orders nu_j in (0, 1) of the remaining
/// eigenvalues in (-1/4, 3/4).
class BaseSpectrum {
 public:
  static BaseSpectrum create(double R, int q0, std::vector<double> nus);
  static BaseSpectrum from_lambdas(double R, int q0, const std::vector<double>& lambdas);

  double R() const { return R_; }
  int q0() const { return q0_; }
  int q1() const { return static_cast<int>(nus_.size()); }
  int q() const { return q0_ + q1(); }
  const std::vector<double>& nus() const { return nus_; }
  const std::vector<double>& taus() const { return taus_; }
  double nu_sum() const;

 private:
  BaseSpectrum() = default;

  double R_ = 1.0;
  int q0_ = 0;
  std::vector<double> nus_;
  std::vector<double> taus_;
};

/// nu = sqrt(lambda + 1/4), tau = 2^{2 nu} Gamma(1 + nu) / Gamma(1 - nu).
std::pair<double, double> nu_tau_from_lambda(double lambda);

/// tau for a given order nu in (0, 1).
double tau_from_nu(double nu);

struct Lagrangian {
  CMatrix A;
  CMatrix B;
  int q0 = 0;

  int q() const { return static_cast<int>(A.rows()); }
};

struct ValidationReport {
  bool is_lagrangian = false;
  int rank_defect = 0;
  double hermiticity_residual = 0.0;
  double tolerance = 0.0;
  std::vector<std::string> messages;
};

ValidationReport validate_lagrangian(const CMatrix& A, const CMatrix& B, int q0);
ValidationReport validate_lagrangian(const Lagrangian& L);

/// Throws kInvalidInput on a size mismatch with S and kInvalidExtension when
/// (A, B) is not Lagrangian.
void require_valid(const Lagrangian& L, const BaseSpectrum& S);

Lagrangian make_friedrichs(int q0, int q1);
Lagrangian make_neumann(int q0, int q1);
Lagrangian make_scale_invariant(const std::vector<int>& mask, int q0);

}  // namespace conedet

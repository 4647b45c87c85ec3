#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace conedet {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Determinant by partial-pivot LU. The 0x0 determinant is 1.
Complex determinant(const CMatrix& m);

/// det [[A, B], [diag(left), diag(right)]] evaluated in long double. Used for the
/// closed-form boundary determinants, which are often close to singular.
Complex boundary_determinant(const CMatrix& A, const CMatrix& B, const std::vector<long double>& left,
                             const std::vector<long double>& right);

/// Product of the Euclidean row norms; bounds |det m| from above.
double hadamard_bound(const CMatrix& m);

/// Largest entry modulus, 0 for an empty matrix.
double max_abs(const CMatrix& m);

/// Stacks [[top_left, top_right], [bottom_left, bottom_right]].
CMatrix block2x2(const CMatrix& top_left, const CMatrix& top_right,
                 const CMatrix& bottom_left, const CMatrix& bottom_right);

}  // namespace conedet

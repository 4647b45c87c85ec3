#include "conedet/linalg.hpp"

#include <cassert>

namespace conedet {

Complex determinant(const CMatrix& m) {
  assert(m.rows() == m.cols());
  if (m.rows() == 0) return {1.0, 0.0};
  return m.partialPivLu().determinant();
}

Complex boundary_determinant(const CMatrix& A, const CMatrix& B, const std::vector<long double>& left,
                             const std::vector<long double>& right) {
  using Wide = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index q = A.rows();
  assert(A.cols() == q && B.rows() == q && B.cols() == q);
  assert(static_cast<Eigen::Index>(left.size()) == q && static_cast<Eigen::Index>(right.size()) == q);
  if (q == 0) return {1.0, 0.0};
  Wide m = Wide::Zero(2 * q, 2 * q);
  m.topLeftCorner(q, q) = A.cast<std::complex<long double>>();
  m.topRightCorner(q, q) = B.cast<std::complex<long double>>();
  for (Eigen::Index k = 0; k < q; ++k) {
    m(q + k, k) = left[k];
    m(q + k, q + k) = right[k];
  }
  const std::complex<long double> d = m.partialPivLu().determinant();
  return {static_cast<double>(d.real()), static_cast<double>(d.imag())};
}

double hadamard_bound(const CMatrix& m) {
  double bound = 1.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) bound *= m.row(i).norm();
  return bound;
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

CMatrix block2x2(const CMatrix& top_left, const CMatrix& top_right,
                 const CMatrix& bottom_left, const CMatrix& bottom_right) {
  const auto rows = top_left.rows() + bottom_left.rows();
  const auto cols = top_left.cols() + top_right.cols();
  CMatrix out(rows, cols);
  out.block(0, 0, top_left.rows(), top_left.cols()) = top_left;
  out.block(0, top_left.cols(), top_right.rows(), top_right.cols()) = top_right;
  out.block(top_left.rows(), 0, bottom_left.rows(), bottom_left.cols()) = bottom_left;
  out.block(top_left.rows(), top_left.cols(), bottom_right.rows(), bottom_right.cols()) =
      bottom_right;
  return out;
}

}  // namespace conedet

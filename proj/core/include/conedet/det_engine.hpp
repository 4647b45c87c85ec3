#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conedet/extension_model.hpp"
#include "conedet/linalg.hpp"

namespace conedet {

enum class DetMethod { kGeneral, kRatio, kNeumann, kRowCol, kDecomposable, kOneD, kContourOracle };

std::string_view to_string(DetMethod method);
std::optional<DetMethod> parse_det_method(std::string_view name);

struct DetResult {
  Complex value;
  DetMethod method = DetMethod::kGeneral;
  Complex F0;  // kernel witness
  std::string inputs_digest;
  std::map<std::string, double> cross_check_residuals;
  std::vector<std::string> notes;
};

struct RegularPart {
  Complex det_tilde{1.0, 0.0};
  double c_residue = 0.0;
};

/// FNV-1a over the bit patterns of R, q0, nu and the entries of A and B.
std::string inputs_digest(const Lagrangian& L, const BaseSpectrum& S);

/// Throws kKernel when F(0) vanishes to the kernel threshold.
void require_trivial_kernel(const Lagrangian& L, const BaseSpectrum& S);

/// (2 pi R)^{q/2} prod 2^{nu} R^{-nu} / Gamma(1 - nu).
Complex det_neumann(const BaseSpectrum& S);

/// Closed form built from F(0) and the leading coefficient of p(x, y).
/// The cross-check residual against det_ratio * det_neumann is attached.
DetResult det_general(const Lagrangian& L, const BaseSpectrum& S);

/// det(L) / det(Neumann) in the R^{2 nu} form.
Complex det_ratio(const Lagrangian& L, const BaseSpectrum& S);

/// Zero rows/columns layout of A: perm lists the r zero indices in increasing
/// order followed by the remaining indices (0-based).
struct RowColLayout {
  std::vector<int> perm;
  int r = 0;
};

/// Detects the zero rows/columns of A; empty when the condition fails.
std::optional<RowColLayout> detect_rowcol(const Lagrangian& L);

/// Ratio det(L) / det(Neumann) with the leading coefficient computed from the
/// row/column structure of A instead of from p(x, y).
Complex det_rowcol(const Lagrangian& L, const BaseSpectrum& S, const std::vector<int>& perm, int r);

/// Block-diagonal assembly of a q0-block Lagrangian and a q1-block Lagrangian.
Lagrangian assemble_decomposable(const Lagrangian& L0, const Lagrangian& L1);

/// Splits L into its q0 and q1 diagonal blocks; empty when the off-diagonal
/// blocks are not zero.
std::optional<std::pair<Lagrangian, Lagrangian>> split_decomposable(const Lagrangian& L);

/// det of the model operator for a block-diagonal Lagrangian. L0 is q0 x q0
/// (L0.q0 == q0), L1 is q1 x q1 (L1.q0 == 0); either may be empty.
Complex det_decomposable(const Lagrangian& L0, const Lagrangian& L1, const BaseSpectrum& S);

/// One-dimensional closed forms; (alpha, beta) are normalized to unit length.
Complex det_oned(double lambda, double alpha, double beta, double R);

/// det_general(L, S) * det_tilde.
Complex det_full(const Lagrangian& L, const BaseSpectrum& S, const RegularPart& reg);

}  // namespace conedet

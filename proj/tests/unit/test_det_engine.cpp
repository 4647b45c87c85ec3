#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "conedet/det_engine.hpp"
#include "conedet/errors.hpp"
#include "conedet/secular.hpp"
#include "conedet/special_functions.hpp"
#include "random_lagrangian.hpp"

namespace conedet {
namespace {

using testing::relative_error;
constexpr double kPi = std::numbers::pi;
const double kEg = std::exp(special::kEulerGamma);

Lagrangian one_by_one(double alpha, double beta, int q0) {
  return Lagrangian{CMatrix::Constant(1, 1, alpha), CMatrix::Constant(1, 1, beta), q0};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidInput;
}

// Independent evaluation of the one-dimensional formulas from p(x) = alpha - beta x
// and p(y) = alpha - beta tau y^{2 nu}.
double oned_oracle(double lambda, double alpha, double beta, double R) {
  const double root = std::sqrt(2 * kPi * R);
  if (lambda == -0.25) {
    const double a = alpha != 0 ? alpha : -beta;
    const int j0 = alpha != 0 ? 0 : 1;
    return root / a * std::pow(-2 * kEg, 1 - j0) * (alpha * std::log(R) - beta);
  }
  const double nu = std::sqrt(lambda + 0.25);
  const double tau = std::pow(2.0, 2 * nu) * std::tgamma(1 + nu) / std::tgamma(1 - nu);
  const double b = alpha != 0 ? alpha : -beta * tau;
  return root / b * std::pow(2.0, nu) / std::tgamma(1 - nu) * (alpha * std::pow(R, -nu) - beta * std::pow(R, nu));
}

TEST(DetNeumann, Examples) {
  EXPECT_NEAR(std::abs(det_neumann(BaseSpectrum::create(1.0, 0, {0.5})) - 2.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(det_neumann(BaseSpectrum::create(3.0, 1, {})) - std::sqrt(6 * kPi)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(det_neumann(BaseSpectrum::create(1.0, 0, {0.5, 0.5})) - 4.0), 0.0, 1e-13);
}

TEST(DetGeneral, NeumannEqualsCorollary) {
  std::mt19937_64 rng(1);
  for (int q0 = 0; q0 <= 2; ++q0) {
    for (int q1 = 0; q1 <= 2; ++q1) {
      if (q0 + q1 == 0) continue;
      const auto S = BaseSpectrum::create(0.7 + q0 + 0.3 * q1, q0, testing::random_nus(rng, q1));
      const auto r = det_general(make_neumann(q0, q1), S);
      EXPECT_LE(relative_error(r.value, det_neumann(S)), 1e-12);
      EXPECT_LE(relative_error(det_ratio(make_neumann(q0, q1), S), 1.0), 1e-12);
      EXPECT_LE(r.cross_check_residuals.at("ratio_times_neumann"), 1e-12);
      EXPECT_EQ(r.method, DetMethod::kGeneral);
      EXPECT_EQ(r.inputs_digest.size(), 16u);
    }
  }
}

TEST(DetGeneral, OneDimensionalFormulas) {
  for (double lambda : {-0.25, -0.2, 0.0, 0.5}) {
    for (auto [alpha, beta] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {0.6, 0.8}, {-0.28, 0.96}}) {
      for (double R : {0.5, 1.3, std::exp(1.0)}) {
        const int q0 = lambda == -0.25 ? 1 : 0;
        const auto S = q0 ? BaseSpectrum::create(R, 1, {}) : BaseSpectrum::from_lambdas(R, 0, {lambda});
        const auto L = one_by_one(alpha, beta, q0);
        if (has_kernel(L, S)) continue;
        const double expected = oned_oracle(lambda, alpha, beta, R);
        EXPECT_LE(relative_error(det_general(L, S).value, expected), 1e-11) << lambda << " " << alpha << " " << R;
        EXPECT_LE(relative_error(det_oned(lambda, alpha, beta, R), expected), 1e-11);
      }
    }
  }
}

TEST(DetOned, Examples) {
  EXPECT_NEAR(det_oned(-0.25, 0.0, 1.0, 2.0).real(), std::sqrt(4 * kPi), 1e-13);
  EXPECT_NEAR(det_oned(0.0, 0.0, 1.0, 1.0).real(), 2.0, 1e-14);
  EXPECT_NEAR(det_oned(-0.25, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 1.0).real(), 2 * std::sqrt(2 * kPi) * kEg, 1e-13);
  // Unnormalised input gives the same value.
  EXPECT_NEAR(det_oned(-0.25, 3.0, 3.0, 1.0).real(), 2 * std::sqrt(2 * kPi) * kEg, 1e-13);
  EXPECT_THROW(det_oned(0.75, 1, 0, 1), Error);
  EXPECT_THROW(det_oned(0.0, 0, 0, 1), Error);
  EXPECT_EQ(code_of([] { det_oned(-0.25, 1.0, 0.0, 1.0); }), ErrorCode::kKernel);
}

TEST(DetGeneral, RefusesKernel) {
  const auto S = BaseSpectrum::create(1.0, 1, {});
  EXPECT_EQ(code_of([&] { det_general(one_by_one(1.0, 0.0, 1), S); }), ErrorCode::kKernel);
  EXPECT_EQ(code_of([&] { det_ratio(one_by_one(1.0, 0.0, 1), S); }), ErrorCode::kKernel);
}

TEST(DetRatio, OneDimensionalExample) {
  const auto S = BaseSpectrum::create(std::exp(1.0), 1, {});
  EXPECT_LE(relative_error(det_ratio(one_by_one(1.0, 0.0, 1), S), -2 * kEg), 1e-13);
}

TEST(DetRatio, IdentityOnRandomLagrangians) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const int q = 1 + trial % 4;
    const int q0 = static_cast<int>(rng() % (q + 1));
    const auto S = BaseSpectrum::create(0.4 + 0.1 * trial, q0, testing::random_nus(rng, q - q0));
    const auto L = testing::random_lagrangian(rng, q0, q - q0);
    const auto r = det_general(L, S);
    EXPECT_LE(relative_error(r.value, det_ratio(L, S) * det_neumann(S)), 1e-12) << trial;
  }
}

TEST(DetRowCol, DetectsLayout) {
  const auto layout = detect_rowcol(make_neumann(2, 1));
  ASSERT_TRUE(layout);
  EXPECT_EQ(layout->r, 2);
  EXPECT_EQ(layout->perm, (std::vector<int>{0, 1, 2}));
  std::mt19937_64 rng(3);
  EXPECT_EQ(detect_rowcol(testing::random_lagrangian(rng, 1, 1))->r, 0);
  CMatrix A = CMatrix::Ones(2, 2);
  EXPECT_FALSE(detect_rowcol(Lagrangian{A, CMatrix::Identity(2, 2), 0}).has_value());
}

TEST(DetRowCol, MatchesRatioOnCanonicalExtensions) {
  for (int q0 = 0; q0 <= 2; ++q0) {
    for (int q1 = 0; q1 <= 2; ++q1) {
      if (q0 + q1 == 0) continue;
      const auto S = BaseSpectrum::create(1.7, q0, std::vector<double>(q1, 0.35));
      for (const auto& L : {make_friedrichs(q0, q1), make_neumann(q0, q1)}) {
        const auto layout = detect_rowcol(L);
        ASSERT_TRUE(layout);
        EXPECT_LE(relative_error(det_rowcol(L, S, layout->perm, layout->r), det_ratio(L, S)), 1e-12);
      }
      EXPECT_LE(relative_error(det_rowcol(make_neumann(q0, q1), S, detect_rowcol(make_neumann(q0, q1))->perm, q0), 1.0), 1e-12);
    }
  }
}

TEST(DetRowCol, ScaleInvariantMasksAndDressedBlocks) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const int q = 1 + trial % 4;
    std::vector<int> mask(q);
    int q0 = static_cast<int>(rng() % (q + 1));
    for (int i = 0; i < q; ++i) mask[i] = i < q0 ? 1 : static_cast<int>(rng() % 2);
    const auto S = BaseSpectrum::create(0.5 + 0.1 * trial, q0, testing::random_nus(rng, q - q0));
    auto L = make_scale_invariant(mask, q0);
    if (trial % 2) {
      // Mix rows: the zero rows of A stay zero only if U preserves them, so apply a
      // diagonal U, which keeps the row/column structure.
      CMatrix U = CMatrix::Zero(q, q);
      for (int i = 0; i < q; ++i) U(i, i) = Complex(1.0 + 0.5 * i, 0.3 * i);
      L.A = U * L.A;
      L.B = U * L.B;
    }
    if (has_kernel(L, S)) continue;
    const auto layout = detect_rowcol(L);
    ASSERT_TRUE(layout);
    EXPECT_LE(relative_error(det_rowcol(L, S, layout->perm, layout->r) * det_neumann(S), det_general(L, S).value), 1e-11);
  }
}

TEST(DetRowCol, RefusesViolatedPreconditions) {
  const auto S = BaseSpectrum::create(1.0, 1, {0.5});
  std::mt19937_64 rng(9);
  const auto L = testing::random_lagrangian(rng, 1, 1);
  EXPECT_EQ(code_of([&] { det_rowcol(L, S, {0, 1}, 1); }), ErrorCode::kInvalidInput);
  EXPECT_EQ(code_of([&] { det_rowcol(make_neumann(1, 1), S, {0, 0}, 1); }), ErrorCode::kInvalidInput);
  EXPECT_EQ(code_of([&] { det_rowcol(make_neumann(1, 1), S, {0, 1}, 0); }), ErrorCode::kInvalidInput);
}

TEST(DetDecomposable, Examples) {
  const double inv = 1 / std::sqrt(2.0);
  EXPECT_LE(relative_error(det_decomposable(one_by_one(inv, inv, 1), Lagrangian{CMatrix(0, 0), CMatrix(0, 0), 0},
                                            BaseSpectrum::create(1.0, 1, {})),
                           2 * std::sqrt(2 * kPi) * kEg),
            1e-13);
  EXPECT_LE(relative_error(det_decomposable(Lagrangian{CMatrix(0, 0), CMatrix(0, 0), 0}, one_by_one(0, 1, 0),
                                            BaseSpectrum::create(1.0, 0, {0.5})),
                           2.0),
            1e-13);
}

TEST(DetDecomposable, MatchesGeneralOnAssembledBlocks) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int q0 = 1 + trial % 2;
    const int q1 = 1 + (trial / 2) % 2;
    const auto S = BaseSpectrum::create(0.6 + 0.1 * trial, q0, testing::random_nus(rng, q1));
    const auto L0 = testing::random_lagrangian(rng, q0, 0);
    const auto L1 = testing::random_lagrangian(rng, 0, q1);
    const auto L = assemble_decomposable(L0, L1);
    if (has_kernel(L, S)) continue;
    EXPECT_LE(relative_error(det_decomposable(L0, L1, S), det_general(L, S).value), 1e-11) << trial;
    const auto split = split_decomposable(L);
    ASSERT_TRUE(split);
    EXPECT_TRUE(split->first.A.isApprox(L0.A));
  }
  const auto S = BaseSpectrum::create(1.0, 2, {0.5});
  EXPECT_LE(relative_error(det_decomposable(make_friedrichs(2, 0), make_friedrichs(0, 1), S),
                           det_general(make_friedrichs(2, 1), S).value),
            1e-12);
  EXPECT_FALSE(split_decomposable(testing::random_lagrangian(rng, 1, 1)).has_value());
  EXPECT_THROW(det_decomposable(make_friedrichs(1, 0), make_friedrichs(0, 1), S), Error);
}

TEST(DetFull, ComposesWithRegularPart) {
  const auto S = BaseSpectrum::create(2.0, 1, {});
  EXPECT_LE(relative_error(det_full(make_neumann(1, 0), S, RegularPart{1.0, 0.0}), det_general(make_neumann(1, 0), S).value), 1e-15);
  EXPECT_LE(relative_error(det_full(make_neumann(1, 0), S, RegularPart{2.0, 0.0}), 2 * std::sqrt(4 * kPi)), 1e-13);
  const auto S2 = BaseSpectrum::create(1.5, 0, {0.3});
  const Complex d{0.5, 1.5};
  EXPECT_LE(relative_error(det_full(make_neumann(0, 1), S2, RegularPart{d, 0.0}), det_neumann(S2) * d), 1e-12);
}

TEST(DetGeneral, RealInputsGiveRealValues) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int q = 1 + trial % 4;
    const int q0 = static_cast<int>(rng() % (q + 1));
    const auto S = BaseSpectrum::create(0.5 + 0.2 * trial, q0, testing::random_nus(rng, q - q0));
    const auto L = testing::random_real_lagrangian(rng, q0, q - q0);
    const Complex v = det_general(L, S).value;
    EXPECT_LE(std::abs(v.imag()), 1e-12 * std::abs(v)) << trial;
  }
}

TEST(DetGeneral, AgreesWithContourOracle) {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int trial = 0; trial < 12 && checked < 6; ++trial) {
    const int q = 1 + trial % 2;
    const int q0 = static_cast<int>(rng() % (q + 1));
    const auto S = BaseSpectrum::create(0.8 + 0.1 * trial, q0, testing::random_nus(rng, q - q0));
    const auto L = testing::random_lagrangian(rng, q0, q - q0);
    if (has_kernel(L, S)) continue;
    const auto ctx = SecularContext::create(L, S);
    try {
      const Complex oracle = contour_det_oracle(ctx, Complex(0, 0.1)).value;
      EXPECT_LE(relative_error(oracle, det_general(L, S).value), 1e-5) << trial;
      ++checked;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kContourHit);
    }
  }
  EXPECT_GE(checked, 5);
}

TEST(Methods, ParseRoundTrip) {
  for (auto m : {DetMethod::kGeneral, DetMethod::kRatio, DetMethod::kRowCol, DetMethod::kDecomposable,
                 DetMethod::kOneD, DetMethod::kContourOracle, DetMethod::kNeumann}) {
    EXPECT_EQ(parse_det_method(to_string(m)), m);
  }
  EXPECT_FALSE(parse_det_method("bogus"));
}

}  // namespace
}  // namespace conedet

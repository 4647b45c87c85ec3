#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "commands.hpp"
#include "conedet/det_engine.hpp"
#include "json_emit.hpp"
#include "oracles.hpp"
#include "problem_file.hpp"

namespace conedet::cli {
namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

std::string data(const std::string& name) { return std::string(CONEDET_TEST_DATA) + "/" + name; }

struct Outcome {
  int code;
  json report;
  std::string text;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  Outcome o{code, {}, out.str()};
  if (!o.text.empty() && o.text.front() == '{') o.report = json::parse(o.text);
  return o;
}

Complex as_complex(const json& j) { return {j["re"].get<double>(), j["im"].get<double>()}; }

const char* kMinimal = R"({"R": 1.0, "q0": 0, "nus": [0.5],
  "A": [[{"re": 0.0, "im": 0.0}]], "B": [[{"re": 1.0, "im": 0.0}]]})";

ErrorCode parse_code(const std::string& text) {
  try {
    parse_problem_text(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kNumericFailure;
}

TEST(ProblemFile, ParsesMinimalFile) {
  const auto p = parse_problem_text(kMinimal);
  EXPECT_EQ(p.spectrum.q(), 1);
  EXPECT_DOUBLE_EQ(p.spectrum.nus()[0], 0.5);
  EXPECT_EQ(p.lagrangian.B(0, 0), Complex(1.0, 0.0));
  EXPECT_EQ(p.regular.det_tilde, Complex(1.0, 0.0));
  EXPECT_FALSE(p.truncation.has_value());
}

TEST(ProblemFile, RejectsShapeProblems) {
  EXPECT_EQ(parse_code("{"), ErrorCode::kParse);
  EXPECT_EQ(parse_code("[]"), ErrorCode::kParse);
  EXPECT_EQ(parse_code(R"({"R": 1.0, "q0": 0, "nus": [0.5], "A": [[{"re": 0}]], "B": [[{"re": 1, "im": 0}]]})"),
            ErrorCode::kParse);
  EXPECT_EQ(parse_code(R"({"R": 1.0, "q0": 0, "nus": [0.5, 0.2], "A": [[{"re": 0, "im": 0}]],
                           "B": [[{"re": 1, "im": 0}]]})"),
            ErrorCode::kParse);
  EXPECT_EQ(parse_code(R"({"R": 1.0, "q0": 0, "A": [[{"re": 0, "im": 0}]], "B": [[{"re": 1, "im": 0}]]})"),
            ErrorCode::kParse);
  EXPECT_EQ(parse_code(R"({"R": 1.0, "q0": 0, "nus": [0.5], "A": [[{"re": 0, "im": 0}]],
                           "B": [[{"re": 1, "im": 0}]], "solver": {"K": 3, "tol": 1}})"),
            ErrorCode::kParse);
  EXPECT_EQ(parse_code(R"({"R": 1.0, "q0": 0.5, "nus": [0.5], "A": [[{"re": 0, "im": 0}]],
                           "B": [[{"re": 1, "im": 0}]]})"),
            ErrorCode::kParse);
}

TEST(ProblemFile, SpectralRangeErrorsKeepTheirCodes) {
  EXPECT_EQ(parse_code(R"({"R": 1.0, "q0": 0, "lambdas": [0.75], "A": [[{"re": 0, "im": 0}]],
                           "B": [[{"re": 1, "im": 0}]]})"),
            ErrorCode::kLambdaLimitPoint);
  EXPECT_EQ(parse_code(R"({"R": 1.0, "q0": 0, "lambdas": [-0.25], "A": [[{"re": 0, "im": 0}]],
                           "B": [[{"re": 1, "im": 0}]]})"),
            ErrorCode::kLambdaInQ0Block);
  EXPECT_EQ(parse_code(R"({"R": -1.0, "q0": 0, "nus": [0.5], "A": [[{"re": 0, "im": 0}]],
                           "B": [[{"re": 1, "im": 0}]]})"),
            ErrorCode::kInvalidInput);
}

TEST(ProblemFile, LambdasAndNusMustAgree) {
  const auto p = parse_problem_text(R"({"R": 1.0, "q0": 0, "nus": [0.5], "lambdas": [0.0],
    "A": [[{"re": 0, "im": 0}]], "B": [[{"re": 1, "im": 0}]]})");
  EXPECT_DOUBLE_EQ(p.spectrum.nus()[0], 0.5);
  EXPECT_EQ(parse_code(R"({"R": 1.0, "q0": 0, "nus": [0.5], "lambdas": [0.01],
    "A": [[{"re": 0, "im": 0}]], "B": [[{"re": 1, "im": 0}]]})"),
            ErrorCode::kInvalidInput);
}

TEST(ProblemFile, OptionalSections) {
  const auto p = load_problem(data("neumann.json"));
  EXPECT_EQ(p.regular.det_tilde, Complex(2.0, 0.0));
  ASSERT_TRUE(p.truncation);
  EXPECT_EQ(p.truncation->M, 8);
  ASSERT_TRUE(p.solver);
  EXPECT_EQ(p.solver->K, 4);
}

TEST(ExitCodes, AreDisjointPerCategory) {
  EXPECT_EQ(exit_code(ErrorCode::kInvalidExtension), 1);
  EXPECT_EQ(exit_code(ErrorCode::kParse), 2);
  EXPECT_EQ(exit_code(ErrorCode::kInvalidInput), 2);
  EXPECT_EQ(exit_code(ErrorCode::kKernel), 3);
  EXPECT_EQ(exit_code(ErrorCode::kDegenerateDeterminant), 4);
  EXPECT_EQ(exit_code(ErrorCode::kNumericFailure), 5);
  EXPECT_EQ(exit_code(ErrorCode::kContourHit), 5);
}

TEST(JsonEmit, RoundTripsBitExactly) {
  json j{{"a", 0.1}, {"b", 1.0 / 3.0}, {"c", 1e-300}, {"d", 2.0}, {"e", -123456.789e10}, {"n", 7}};
  const json back = json::parse(emit_json(j));
  for (const char* key : {"a", "b", "c", "d", "e"}) {
    EXPECT_EQ(back[key].get<double>(), j[key].get<double>()) << key;
    EXPECT_TRUE(back[key].is_number_float()) << key;
  }
  EXPECT_EQ(back["n"].get<int>(), 7);
  EXPECT_TRUE(json::parse(emit_json(json{{"x", std::nan("")}}))["x"].is_null());
}

TEST(Validate, ExitCodes) {
  EXPECT_EQ(invoke({"validate", data("friedrichs_half.json")}).code, 0);
  const auto bad = invoke({"validate", data("invalid_hermitian.json")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.report["results"]["messages"][0].get<std::string>().find("Hermitian"), std::string::npos);
  EXPECT_EQ(invoke({"validate", data("malformed.json")}).code, 2);
  EXPECT_EQ(invoke({"validate"}).code, 2);
  EXPECT_EQ(invoke({"explode", data("friedrichs_half.json")}).code, 2);
}

TEST(Det, NeumannFile) {
  const auto o = invoke({"det", data("neumann.json")});
  ASSERT_EQ(o.code, 0) << o.text;
  const auto p = load_problem(data("neumann.json"));
  const Complex value = as_complex(o.report["results"]["value"]);
  EXPECT_LE(std::abs(value - det_neumann(p.spectrum)), 1e-12 * std::abs(value));
  EXPECT_LE(o.report["results"]["residuals"]["ratio_times_neumann"].get<double>(), 1e-12);
  EXPECT_LE(std::abs(as_complex(o.report["results"]["det_full"]) - 2.0 * value), 1e-12 * std::abs(value));
  EXPECT_TRUE(o.report["results"].contains("F0_witness"));
}

TEST(Det, OneDimensionalAlphaZero) {
  for (const char* method : {"general", "oned", "ratio", "rowcol"}) {
    const auto o = invoke({"det", data("oned_alpha0.json"), "--method", method});
    ASSERT_EQ(o.code, 0) << method << o.text;
    EXPECT_NEAR(as_complex(o.report["results"]["det"]).real(), std::sqrt(4 * kPi), 1e-12) << method;
  }
}

TEST(Det, OracleMethod) {
  const auto o = invoke({"det", data("friedrichs_half.json"), "--method", "oracle", "--t", "0.1"});
  ASSERT_EQ(o.code, 0) << o.text;
  EXPECT_NEAR(as_complex(o.report["results"]["value"]).real(), 2.0, 1e-5);
  EXPECT_FALSE(o.report["results"].contains("residuals"));
}

TEST(Det, KernelAndPreconditions) {
  const auto k = invoke({"det", data("kernel.json")});
  EXPECT_EQ(k.code, 3);
  EXPECT_EQ(k.report["error"]["code"], "nontrivial_kernel");
  EXPECT_EQ(invoke({"det", data("kernel.json"), "--method", "oracle"}).code, 3);
  EXPECT_EQ(invoke({"det", data("robin_mixed.json"), "--method", "oned"}).code, 2);
  EXPECT_EQ(invoke({"det", data("rowcol_fail.json"), "--method", "rowcol"}).code, 2);
  EXPECT_EQ(invoke({"det", data("invalid_hermitian.json")}).code, 1);
}

TEST(Det, MethodsAgreeOnMixedFile) {
  const auto general = as_complex(invoke({"det", data("robin_mixed.json")}).report["results"]["det"]);
  const auto ratio = as_complex(invoke({"det", data("robin_mixed.json"), "--method", "ratio"}).report["results"]["det"]);
  const auto oracle =
      as_complex(invoke({"det", data("robin_mixed.json"), "--method", "oracle"}).report["results"]["det"]);
  EXPECT_LE(std::abs(general - ratio), 1e-12 * std::abs(general));
  EXPECT_LE(std::abs(general - oracle), 1e-5 * std::abs(general));
}

TEST(Singularities, Examples) {
  const auto f = invoke({"singularities", data("friedrichs_half.json")});
  ASSERT_EQ(f.code, 0);
  EXPECT_TRUE(f.report["results"]["poles"].empty());
  EXPECT_TRUE(f.report["results"]["logs"].empty());
  EXPECT_EQ(f.report["results"]["log_branch_coeff_at_0"], 0);

  const auto k = invoke({"singularities", data("kernel.json")});
  ASSERT_EQ(k.code, 0);
  EXPECT_EQ(k.report["results"]["log_branch_coeff_at_0"], -1);

  const auto n = invoke({"singularities", data("neumann.json")});
  EXPECT_TRUE(n.report["results"]["poles"].empty());
  EXPECT_TRUE(n.report["results"]["logs"].empty());
  EXPECT_EQ(n.report["results"]["N"], 4.0);
  EXPECT_EQ(invoke({"singularities", data("neumann.json"), "-N", "2"}).report["results"]["N"], 2.0);
}

TEST(Singularities, TextTable) {
  const auto o = invoke({"singularities", data("robin_mixed.json"), "--format", "text", "-N", "3", "-M", "4"});
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.text.find("xi"), std::string::npos);
  EXPECT_NE(o.text.find("log_branch_coeff_at_0"), std::string::npos);
}

TEST(Spectrum, FriedrichsHalfOrder) {
  const auto o = invoke({"spectrum", data("friedrichs_half.json"), "-k", "3"});
  ASSERT_EQ(o.code, 0);
  const auto& ev = o.report["results"]["eigenvalues"];
  ASSERT_EQ(ev.size(), 3u);
  for (int k = 1; k <= 3; ++k) {
    const double expected = k * k * kPi * kPi;
    EXPECT_NEAR(ev[k - 1]["eigenvalue"].get<double>(), expected, 1e-9 * expected);
  }
}

TEST(Spectrum, FriedrichsQ0MatchesBesselZeros) {
  const auto o = invoke({"spectrum", data("friedrichs_q0.json"), "-k", "2"});
  ASSERT_EQ(o.code, 0);
  const auto zeros = testing::j0_zeros(2);
  const auto& ev = o.report["results"]["eigenvalues"];
  ASSERT_EQ(ev.size(), 2u);
  for (int k = 0; k < 2; ++k) {
    EXPECT_NEAR(ev[k]["eigenvalue"].get<double>(), zeros[k] * zeros[k], 1e-8 * zeros[k] * zeros[k]);
  }
}

TEST(Spectrum, KernelListsZero) {
  const auto o = invoke({"spectrum", data("kernel.json"), "-k", "2"});
  ASSERT_EQ(o.code, 0);
  EXPECT_TRUE(o.report["results"]["kernel"]["present"].get<bool>());
  EXPECT_EQ(o.report["results"]["eigenvalues"][0]["eigenvalue"], 0.0);
  EXPECT_TRUE(o.report["results"]["eigenvalues"][0].contains("note"));
}

TEST(Verify, Batteries) {
  const auto n = invoke({"verify", data("neumann.json")});
  EXPECT_EQ(n.code, 0) << n.text;
  const auto m = invoke({"verify", data("robin_mixed.json")});
  EXPECT_EQ(m.code, 0) << m.text;
  const auto k = invoke({"verify", data("kernel.json")});
  EXPECT_EQ(k.code, 0) << k.text;
  EXPECT_EQ(k.report["results"]["checks"]["contour_oracle"]["status"], "skip");
  EXPECT_EQ(k.report["results"]["checks"]["evenness"]["status"], "pass");
}

TEST(Verify, SeedFromEnvironment) {
  ::setenv("CONEDET_SEED", "99", 1);
  EXPECT_EQ(seed_from_environment(), 99u);
  EXPECT_EQ(invoke({"verify", data("friedrichs_half.json")}).report["results"]["seed"], 99);
  ::setenv("CONEDET_SEED", "junk", 1);
  EXPECT_EQ(seed_from_environment(), 12345u);
  ::unsetenv("CONEDET_SEED");
  EXPECT_EQ(seed_from_environment(), 12345u);
}

TEST(Reports, DeterministicUnderReproducible) {
  const auto a = invoke({"det", data("robin_mixed.json"), "--reproducible"});
  const auto b = invoke({"det", data("robin_mixed.json"), "--reproducible"});
  EXPECT_EQ(a.text, b.text);
  EXPECT_FALSE(a.report.contains("timestamp"));
  EXPECT_TRUE(invoke({"det", data("robin_mixed.json")}).report.contains("timestamp"));
  EXPECT_EQ(a.report["input_digest"].get<std::string>().size(), 16u);
  EXPECT_EQ(a.report["command"]["name"], "det");
}

}  // namespace
}  // namespace conedet::cli

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "conedet/det_engine.hpp"
#include "conedet/extension_model.hpp"

namespace conedet::cli {

struct Truncation {
  double N = 5.0;
  int M = 10;
};

struct SolverSettings {
  int K = 10;
  double mu_max = 0.0;  // 0 selects the default window
};

struct Problem {
  BaseSpectrum spectrum;
  Lagrangian lagrangian;
  RegularPart regular;
  std::optional<Truncation> truncation;
  std::optional<SolverSettings> solver;
};

/// Parses a problem file. Malformed JSON, unknown keys and wrong shapes throw
/// Error(kParse); out-of-range spectral data keeps the code of BaseSpectrum.
Problem parse_problem(const nlohmann::json& doc);
Problem parse_problem_text(const std::string& text);
Problem load_problem(const std::string& path);

}  // namespace conedet::cli

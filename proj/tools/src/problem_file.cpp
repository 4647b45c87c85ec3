#include "problem_file.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "conedet/errors.hpp"

namespace conedet::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::kParse, what); }

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + " must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where + " must be an integer");
  const auto v = j.get<long long>();
  if (v < 0 || v > 1'000'000) fail(where + " is out of range");
  return static_cast<int>(v);
}

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) fail("unknown key '" + key + "' in " + where);
  }
}

Complex complex_value(const json& j, const std::string& where) {
  only_keys(j, {"re", "im"}, where);
  if (!j.contains("re") || !j.contains("im")) fail(where + " needs both re and im");
  return {number(j["re"], where + ".re"), number(j["im"], where + ".im")};
}

CMatrix matrix(const json& j, int q, const std::string& name) {
  if (!j.is_array() || static_cast<int>(j.size()) != q) fail(name + " must have q = " + std::to_string(q) + " rows");
  CMatrix m(q, q);
  for (int r = 0; r < q; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != q) {
      fail(name + " row " + std::to_string(r) + " must have " + std::to_string(q) + " entries");
    }
    for (int c = 0; c < q; ++c) {
      m(r, c) = complex_value(row[c], name + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

std::vector<double> number_list(const json& j, const std::string& name) {
  if (!j.is_array()) fail(name + " must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], name + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

Problem parse_problem(const json& doc) {
  only_keys(doc, {"R", "q0", "lambdas", "nus", "A", "B", "det_tilde", "c_residue", "truncation", "solver"},
            "problem file");
  for (const char* key : {"R", "q0", "A", "B"}) {
    if (!doc.contains(key)) fail(std::string("missing key '") + key + "'");
  }
  if (!doc.contains("lambdas") && !doc.contains("nus")) fail("one of 'lambdas' or 'nus' is required");

  const double R = number(doc["R"], "R");
  const int q0 = integer(doc["q0"], "q0");

  std::optional<BaseSpectrum> spectrum;
  if (doc.contains("nus")) spectrum = BaseSpectrum::create(R, q0, number_list(doc["nus"], "nus"));
  if (doc.contains("lambdas")) {
    const auto from_lambdas = BaseSpectrum::from_lambdas(R, q0, number_list(doc["lambdas"], "lambdas"));
    if (spectrum) {
      if (spectrum->nus().size() != from_lambdas.nus().size()) fail("'lambdas' and 'nus' differ in length");
      for (std::size_t i = 0; i < spectrum->nus().size(); ++i) {
        const double lambda_from_nu = spectrum->nus()[i] * spectrum->nus()[i] - 0.25;
        const double lambda = from_lambdas.nus()[i] * from_lambdas.nus()[i] - 0.25;
        if (std::abs(lambda_from_nu - lambda) > 1e-12) {
          throw Error(ErrorCode::kInvalidInput, "'lambdas' and 'nus' disagree at index " + std::to_string(i));
        }
      }
    } else {
      spectrum = from_lambdas;
    }
  }

  const int q = spectrum->q();
  Problem problem{*spectrum, Lagrangian{matrix(doc["A"], q, "A"), matrix(doc["B"], q, "B"), q0}, {}, {}, {}};
  if (doc.contains("det_tilde")) problem.regular.det_tilde = complex_value(doc["det_tilde"], "det_tilde");
  if (doc.contains("c_residue")) problem.regular.c_residue = number(doc["c_residue"], "c_residue");
  if (doc.contains("truncation")) {
    const auto& t = doc["truncation"];
    only_keys(t, {"N", "M"}, "truncation");
    Truncation trunc;
    if (t.contains("N")) trunc.N = number(t["N"], "truncation.N");
    if (t.contains("M")) trunc.M = integer(t["M"], "truncation.M");
    problem.truncation = trunc;
  }
  if (doc.contains("solver")) {
    const auto& s = doc["solver"];
    only_keys(s, {"K", "mu_max"}, "solver");
    SolverSettings solver;
    if (s.contains("K")) solver.K = integer(s["K"], "solver.K");
    if (s.contains("mu_max")) solver.mu_max = number(s["mu_max"], "solver.mu_max");
    problem.solver = solver;
  }
  return problem;
}

Problem parse_problem_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  return parse_problem(doc);
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem_text(buffer.str());
}

}  // namespace conedet::cli

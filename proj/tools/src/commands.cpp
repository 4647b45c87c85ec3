#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include "conedet/det_engine.hpp"
#include "conedet/secular.hpp"
#include "conedet/singularity.hpp"
#include "conedet/special_functions.hpp"
#include "json_emit.hpp"
#include "problem_file.hpp"

namespace conedet::cli {
namespace {

using nlohmann::json;

struct Options {
  std::string command;
  std::string file;
  std::string method = "general";
  double t = 0.1;
  std::optional<double> N;
  std::optional<int> M;
  std::optional<int> K;
  std::string format = "json";
  bool reproducible = false;
};

double relative_difference(Complex a, Complex b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

json versions() {
  json v;
  v["conedet"] = CONEDET_VERSION;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["boost"] = BOOST_LIB_VERSION;
  return v;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json key_json(const std::vector<int>& key) { return json(key); }

json f0_witness(const Problem& p) {
  json w;
  w["F0"] = complex_json(secular_F0_closed(p.lagrangian, p.spectrum));
  w["scale"] = F0_scale(p.lagrangian, p.spectrum);
  w["kernel"] = has_kernel(p.lagrangian, p.spectrum);
  return w;
}

// (alpha, beta) for a q = 1 problem, rotated to a common real phase.
std::optional<std::pair<double, double>> real_oned_pair(const Lagrangian& L) {
  if (L.q() != 1) return std::nullopt;
  const Complex a = L.A(0, 0);
  const Complex b = L.B(0, 0);
  const Complex ref = std::abs(a) >= std::abs(b) ? a : b;
  if (ref == Complex{}) return std::nullopt;
  const Complex phase = std::conj(ref) / std::abs(ref);
  const Complex ra = a * phase;
  const Complex rb = b * phase;
  const double norm = std::hypot(std::abs(a), std::abs(b));
  if (std::abs(ra.imag()) > 1e-12 * norm || std::abs(rb.imag()) > 1e-12 * norm) return std::nullopt;
  return std::pair{ra.real(), rb.real()};
}

double oned_lambda(const BaseSpectrum& S) {
  if (S.q0() == 1) return -0.25;
  const double nu = S.nus().at(0);
  return nu * nu - 0.25;
}

Complex full_from_method(DetMethod method, Complex value, const BaseSpectrum& S) {
  return (method == DetMethod::kRatio || method == DetMethod::kRowCol) ? value * det_neumann(S) : value;
}

json cmd_validate(const Problem& p, int& status) {
  const auto report = validate_lagrangian(p.lagrangian);
  json r;
  r["is_lagrangian"] = report.is_lagrangian;
  r["rank_defect"] = report.rank_defect;
  r["hermiticity_residual"] = report.hermiticity_residual;
  r["tolerance"] = report.tolerance;
  r["messages"] = report.messages;
  status = report.is_lagrangian ? kExitOk : kExitInvalidExtension;
  return r;
}

json cmd_det(const Problem& p, const Options& opt) {
  const auto& L = p.lagrangian;
  const auto& S = p.spectrum;
  require_valid(L, S);
  const DetMethod method = *parse_det_method(opt.method);
  json r;
  r["method"] = std::string(to_string(method));
  r["F0_witness"] = f0_witness(p);
  Complex value;
  switch (method) {
    case DetMethod::kGeneral: {
      const auto res = det_general(L, S);
      value = res.value;
      r["notes"] = res.notes;
      break;
    }
    case DetMethod::kRatio:
      value = det_ratio(L, S);
      break;
    case DetMethod::kRowCol: {
      const auto layout = detect_rowcol(L);
      if (!layout) {
        throw Error(ErrorCode::kInvalidInput, "rowcol: A does not have the zero rows/columns structure");
      }
      r["rowcol"] = {{"perm", layout->perm}, {"r", layout->r}};
      value = det_rowcol(L, S, layout->perm, layout->r);
      break;
    }
    case DetMethod::kDecomposable: {
      const auto blocks = split_decomposable(L);
      if (!blocks) throw Error(ErrorCode::kInvalidInput, "decomposable: off-diagonal blocks of A or B are nonzero");
      value = det_decomposable(blocks->first, blocks->second, S);
      break;
    }
    case DetMethod::kOneD: {
      const auto pair = real_oned_pair(L);
      if (!pair) throw Error(ErrorCode::kInvalidInput, "oned: needs q = 1 with real (alpha, beta) up to a common phase");
      const double norm = std::hypot(pair->first, pair->second);
      r["oned"] = {{"lambda", oned_lambda(S)}, {"alpha", pair->first / norm}, {"beta", pair->second / norm}};
      value = det_oned(oned_lambda(S), pair->first, pair->second, S.R());
      break;
    }
    case DetMethod::kContourOracle: {
      if (!(opt.t > 0.0)) throw Error(ErrorCode::kInvalidInput, "--t must be positive");
      const auto ctx = SecularContext::create(L, S);
      const auto res = contour_det_oracle(ctx, Complex(0.0, opt.t));
      value = res.value;
      r["oracle"] = {{"t", complex_json(Complex(0.0, opt.t))},
                     {"log_integral", complex_json(res.log_integral)},
                     {"F_t", complex_json(res.F_t)}};
      break;
    }
    case DetMethod::kNeumann:
      throw Error(ErrorCode::kInvalidInput, "unsupported method");
  }
  r["value"] = complex_json(value);
  const Complex det = full_from_method(method, value, S);
  r["det"] = complex_json(det);
  r["det_neumann"] = complex_json(det_neumann(S));
  r["det_full"] = complex_json(det * p.regular.det_tilde);
  r["det_tilde"] = complex_json(p.regular.det_tilde);
  r["c_residue"] = p.regular.c_residue;
  if (method != DetMethod::kContourOracle) {
    r["residuals"]["ratio_times_neumann"] = relative_difference(det, det_ratio(L, S) * det_neumann(S));
  }
  return r;
}

json cmd_singularities(const Problem& p, const Options& opt) {
  const double N = opt.N ? *opt.N : (p.truncation ? p.truncation->N : 5.0);
  const int M = opt.M ? *opt.M : (p.truncation ? p.truncation->M : 10);
  const auto rep = analyze(p.lagrangian, p.spectrum, N, M);
  json r;
  r["j0"] = rep.j0;
  r["q0"] = rep.q0;
  r["log_branch_coeff_at_0"] = rep.log_branch_coeff_at_0;
  r["alpha0"] = rep.alpha0;
  r["alpha0_key"] = key_json(rep.alpha0_key);
  r["a_j0alpha0"] = complex_json(rep.a_j0alpha0);
  r["gamma_tilde"] = rep.gamma_tilde;
  r["N"] = rep.N;
  r["M"] = rep.M;
  r["series_terms"] = rep.series_terms;
  r["poles"] = json::array();
  for (const auto& e : rep.poles) {
    r["poles"].push_back({{"xi", e.xi},
                          {"xi_key", key_json(e.xi_key)},
                          {"p_xi", e.p_xi},
                          {"order", e.order},
                          {"c", complex_json(e.c)},
                          {"f_at_minus_xi", complex_json(e.f_at_minus_xi)}});
  }
  r["logs"] = json::array();
  for (const auto& e : rep.logs) {
    r["logs"].push_back({{"xi", e.xi},
                         {"xi_key", key_json(e.xi_key)},
                         {"ell_xi", e.ell_xi},
                         {"c", complex_json(e.c)},
                         {"g_leading", complex_json(e.g_leading)}});
  }
  r["negligible"] = json::array();
  for (const auto& f : rep.negligible) {
    r["negligible"].push_back({{"j", f.key.j},
                               {"m", key_json(f.key.m)},
                               {"alpha", f.alpha_value},
                               {"coefficient", complex_json(f.coefficient)}});
  }
  return r;
}

json root_json(const Root& root, bool negative) {
  return {{"mu", root.mu},
          {"eigenvalue", negative ? -root.mu * root.mu : root.mu * root.mu},
          {"multiplicity", root.multiplicity},
          {"residual", root.residual},
          {"negative", negative},
          {"from_minimum", root.from_minimum}};
}

json cmd_spectrum(const Problem& p, const Options& opt) {
  const int K = opt.K ? *opt.K : (p.solver ? p.solver->K : 10);
  if (K < 1) throw Error(ErrorCode::kInvalidInput, "-k must be at least 1");
  const double mu_max = p.solver ? p.solver->mu_max : 0.0;
  const auto ctx = SecularContext::create(p.lagrangian, p.spectrum);
  const auto slice = find_eigenvalues(ctx, K, mu_max);

  json entries = json::array();
  std::vector<Root> negatives(slice.negative_roots.rbegin(), slice.negative_roots.rend());
  for (const auto& root : negatives) entries.push_back(root_json(root, true));
  if (slice.kernel) {
    entries.push_back({{"mu", 0.0},
                       {"eigenvalue", 0.0},
                       {"multiplicity", slice.kernel_multiplicity},
                       {"residual", 0.0},
                       {"negative", false},
                       {"from_minimum", false},
                       {"note", "F(0) = 0: zero is an eigenvalue, the closed-form determinant does not apply"}});
  }
  for (const auto& root : slice.positive_mus) entries.push_back(root_json(root, false));

  // First K eigenvalues counted with multiplicity.
  json listed = json::array();
  int count = 0;
  for (const auto& e : entries) {
    if (count >= K) break;
    listed.push_back(e);
    count += e["multiplicity"].get<int>();
  }
  json r;
  r["requested"] = K;
  r["eigenvalues"] = listed;
  r["kernel"] = {{"present", slice.kernel}, {"multiplicity", slice.kernel_multiplicity}};
  r["F0"] = complex_json(slice.F0);
  r["mu_max"] = slice.mu_max;
  r["x_max"] = slice.x_max;
  r["scan_step"] = slice.scan_step;
  r["shortfall"] = slice.shortfall || count < K;
  json warnings = slice.warnings;
  if (count < K) {
    warnings.push_back("found " + std::to_string(count) + " of " + std::to_string(K) +
                       " eigenvalues below mu_max; raise solver.mu_max");
  }
  r["warnings"] = warnings;
  return r;
}

json check(const std::string& status, double residual, double tolerance, const std::string& detail = {}) {
  json c{{"status", status}, {"residual", residual}, {"tolerance", tolerance}};
  if (!detail.empty()) c["detail"] = detail;
  return c;
}

json skip(const std::string& reason) { return {{"status", "skip"}, {"detail", reason}}; }

json pass_if(bool ok, double residual, double tolerance, const std::string& detail = {}) {
  return check(ok ? "pass" : "fail", residual, tolerance, detail);
}

json cmd_verify(const Problem& p, std::uint64_t seed, int& status) {
  const auto& L = p.lagrangian;
  const auto& S = p.spectrum;
  const auto ctx = SecularContext::create(L, S);
  const double R = S.R();
  json checks;

  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(0.05, 15.0);
    std::uniform_real_distribution<double> im(-7.5, 7.5);
    double worst = 0.0;
    bool ok = true;
    for (int i = 0; i < 8; ++i) {
      const Complex mu{re(rng) / R, im(rng) / R};
      const auto a = secular_F_scaled(ctx, mu);
      const auto b = secular_F_scaled(ctx, -mu);
      const double scale = std::max(std::abs(a.mantissa), 1e-3 * a.hadamard);
      const double residual = scale == 0.0 ? 0.0 : std::abs(a.mantissa - b.mantissa) / scale;
      ok = ok && std::abs(a.log_scale - b.log_scale) <= 1e-12 * (1.0 + std::abs(a.log_scale));
      worst = std::max(worst, residual);
    }
    checks["evenness"] = pass_if(ok && worst <= 1e-10, worst, 1e-10);
  }

  const Complex F0 = secular_F0_closed(L, S);
  const double F0_sc = F0_scale(L, S);
  const bool kernel = has_kernel(L, S);
  {
    const Complex extrapolated = secular_F0_extrapolated(ctx);
    const double residual = std::abs(extrapolated - F0) / std::max(std::abs(F0), F0_sc);
    checks["F0_consistency"] = pass_if(residual <= 1e-8, residual, 1e-8);
  }

  if (ctx.lead) {
    // The beta = 0 part of the remainder decays only like powers of 1/log x, so
    // it is divided out before looking at the trend.
    auto deviation = [&](double x) {
      const Complex X = 1.0 / (special::gamma_tilde() - std::log(x));
      Complex log_part = 1.0;
      for (const auto& term : ctx.lead->remainder) {
        if (std::abs(term.beta_value) <= 1e-12) log_part += term.b * std::pow(X, term.k);
      }
      return std::abs(asymptotic_ratio(ctx, x) / log_part - 1.0);
    };
    const double near = deviation(40.0 / R);
    const double far = deviation(4000.0 / R);
    checks["asymptotic_ratio"] = pass_if(far <= near + 1e-12 && far < 0.1, far, 0.1,
                                         "deviation at x = 40/R and 4000/R: " + std::to_string(near) + ", " +
                                             std::to_string(far));
  } else {
    checks["asymptotic_ratio"] = skip("p(x, y) vanishes identically");
  }

  if (kernel) {
    const std::string why = "nontrivial kernel: F(0) = 0";
    for (const char* name : {"det_ratio_identity", "det_oned", "det_rowcol", "det_decomposable", "contour_oracle"}) {
      checks[name] = skip(why);
    }
  } else {
    const auto general = det_general(L, S);
    const Complex reference = general.value;
    const double identity = general.cross_check_residuals.at("ratio_times_neumann");
    checks["det_ratio_identity"] = pass_if(identity <= 1e-12, identity, 1e-12);

    if (const auto pair = real_oned_pair(L)) {
      const double res = relative_difference(det_oned(oned_lambda(S), pair->first, pair->second, R), reference);
      checks["det_oned"] = pass_if(res <= 1e-11, res, 1e-11);
    } else {
      checks["det_oned"] = skip("q != 1");
    }
    if (const auto layout = detect_rowcol(L)) {
      const double res = relative_difference(det_rowcol(L, S, layout->perm, layout->r) * det_neumann(S), reference);
      checks["det_rowcol"] = pass_if(res <= 1e-11, res, 1e-11);
    } else {
      checks["det_rowcol"] = skip("A lacks the zero rows/columns structure");
    }
    const auto blocks = split_decomposable(L);
    if (blocks && S.q0() > 0 && S.q1() > 0) {
      const double res = relative_difference(det_decomposable(blocks->first, blocks->second, S), reference);
      checks["det_decomposable"] = pass_if(res <= 1e-11, res, 1e-11);
    } else {
      checks["det_decomposable"] = skip("L does not split into nonempty q0 and q1 blocks");
    }

    try {
      const Complex o1 = contour_det_oracle(ctx, Complex(0.0, 0.1)).value;
      const Complex o3 = contour_det_oracle(ctx, Complex(0.0, 0.3)).value;
      const double vs_general = relative_difference(o1, reference);
      const double vs_t = relative_difference(o1, o3);
      json c = pass_if(vs_general <= 1e-5 && vs_t <= 1e-6, vs_general, 1e-5);
      c["t_independence"] = vs_t;
      c["t_independence_tolerance"] = 1e-6;
      c["value_t01"] = complex_json(o1);
      c["value_t03"] = complex_json(o3);
      checks["contour_oracle"] = c;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kContourHit) throw;
      checks["contour_oracle"] = skip(std::string("contour refused: ") + e.what());
    }
  }

  bool all = true;
  for (const auto& [name, c] : checks.items()) all = all && c["status"] != "fail";
  status = all ? kExitOk : kExitNumeric;
  json r;
  r["checks"] = checks;
  r["seed"] = seed;
  r["all_passed"] = all;
  return r;
}

std::string render_value(const json& v) {
  if (v.is_object() && v.size() == 2 && v.contains("re") && v.contains("im")) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g %+.17gi", v["re"].get<double>(), v["im"].get<double>());
    return buf;
  }
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  return v.dump();
}

void render_flat(const json& v, const std::string& prefix, std::ostream& out) {
  const bool complex_leaf = v.is_object() && v.size() == 2 && v.contains("re") && v.contains("im");
  if (v.is_object() && !complex_leaf && !v.empty()) {
    for (const auto& [key, item] : v.items()) render_flat(item, prefix.empty() ? key : prefix + "." + key, out);
  } else if (v.is_array() && !v.empty() && (v[0].is_object() || v[0].is_array())) {
    for (std::size_t i = 0; i < v.size(); ++i) render_flat(v[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << " = " << render_value(v) << "\n";
  }
}

void render_singularity_table(const json& r, std::ostream& out) {
  out << "j0 = " << r["j0"] << "  q0 = " << r["q0"] << "  log_branch_coeff_at_0 = " << r["log_branch_coeff_at_0"]
      << "\n";
  out << "alpha0 = " << render_value(r["alpha0"]) << "  a_j0alpha0 = " << render_value(r["a_j0alpha0"]) << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %-6s %-6s %-48s %s\n", "xi", "kind", "order", "coefficient", "leading");
  out << line;
  struct Row {
    double xi;
    std::string text;
  };
  std::vector<Row> rows;
  for (const auto& e : r["poles"]) {
    std::snprintf(line, sizeof line, "%-22.17g %-6s %-6d %-48s %s\n", e["xi"].get<double>(), "pole",
                  e["order"].get<int>(), render_value(e["c"]).c_str(), render_value(e["f_at_minus_xi"]).c_str());
    rows.push_back({e["xi"].get<double>(), line});
  }
  for (const auto& e : r["logs"]) {
    std::snprintf(line, sizeof line, "%-22.17g %-6s %-6d %-48s %s\n", e["xi"].get<double>(), "log",
                  e["ell_xi"].get<int>(), render_value(e["c"]).c_str(), render_value(e["g_leading"]).c_str());
    rows.push_back({e["xi"].get<double>(), line});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.xi < b.xi; });
  for (const auto& row : rows) out << row.text;
  if (rows.empty()) out << "(no singularities with xi <= N)\n";
}

}  // namespace

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidExtension:
      return kExitInvalidExtension;
    case ErrorCode::kInvalidInput:
    case ErrorCode::kLambdaInQ0Block:
    case ErrorCode::kLambdaLimitPoint:
    case ErrorCode::kParse:
      return kExitParse;
    case ErrorCode::kKernel:
      return kExitKernel;
    case ErrorCode::kDegenerateDeterminant:
      return kExitDegenerate;
    case ErrorCode::kContourHit:
    case ErrorCode::kNumericFailure:
      return kExitNumeric;
  }
  return kExitNumeric;
}

std::uint64_t seed_from_environment() {
  const char* raw = std::getenv("CONEDET_SEED");
  if (!raw || !*raw) return 12345;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  return (end && *end == '\0') ? v : 12345;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Zeta-regularized determinants of self-adjoint extensions on a bounded cone", "conedet"};
  app.add_option("command", opt.command, "validate | det | singularities | spectrum | verify")
      ->required()
      ->check(CLI::IsMember({"validate", "det", "singularities", "spectrum", "verify"}));
  app.add_option("file", opt.file, "problem file (JSON)")->required();
  app.add_option("--method", opt.method, "determinant method")
      ->check(CLI::IsMember({"general", "ratio", "rowcol", "decomposable", "oned", "oracle"}));
  app.add_option("--t", opt.t, "imaginary part of the oracle point t");
  app.add_option("-N", opt.N, "xi cutoff of the singularity expansion (default 5)");
  app.add_option("-M", opt.M, "log-power cutoff of the singularity expansion (default 10)");
  app.add_option("-k", opt.K, "number of eigenvalues (default 10)");
  app.add_option("--format", opt.format, "json | text")->check(CLI::IsMember({"json", "text"}));
  app.add_flag("--reproducible", opt.reproducible, "omit the timestamp");
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e_out;
    const int code = app.exit(e, o, e_out);
    out << o.str();
    err << e_out.str();
    return code == 0 ? kExitOk : kExitParse;
  }

  json report;
  json flags{{"format", opt.format}, {"reproducible", opt.reproducible}};
  if (opt.command == "det") {
    flags["method"] = opt.method;
    if (opt.method == "oracle") flags["t"] = opt.t;
  }
  if (opt.N) flags["N"] = *opt.N;
  if (opt.M) flags["M"] = *opt.M;
  if (opt.K) flags["k"] = *opt.K;
  report["command"] = {{"name", opt.command}, {"file", opt.file}, {"flags", flags}};
  report["versions"] = versions();
  if (!opt.reproducible) report["timestamp"] = timestamp();

  int status = kExitOk;
  try {
    const Problem problem = load_problem(opt.file);
    report["input_digest"] = inputs_digest(problem.lagrangian, problem.spectrum);
    if (opt.command == "validate") {
      report["results"] = cmd_validate(problem, status);
    } else if (opt.command == "det") {
      report["results"] = cmd_det(problem, opt);
    } else if (opt.command == "singularities") {
      report["results"] = cmd_singularities(problem, opt);
    } else if (opt.command == "spectrum") {
      report["results"] = cmd_spectrum(problem, opt);
    } else {
      const std::uint64_t seed = seed_from_environment();
      report["results"] = cmd_verify(problem, seed, status);
    }
    if (status != kExitOk) err << "conedet: " << opt.command << " reported failure\n";
  } catch (const Error& e) {
    status = exit_code(e.code());
    report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    err << "conedet: " << to_string(e.code()) << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    status = kExitNumeric;
    report["error"] = {{"code", "internal"}, {"message", e.what()}};
    err << "conedet: " << e.what() << "\n";
  }
  report["exit_code"] = status;

  if (opt.format == "json") {
    out << emit_json(report);
  } else if (opt.command == "singularities" && report.contains("results")) {
    render_singularity_table(report["results"], out);
  } else {
    render_flat(report, "", out);
  }
  return status;
}

}  // namespace conedet::cli

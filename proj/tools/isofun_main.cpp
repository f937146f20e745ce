#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isofun/isofun.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitSuiteFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    isofun::write_text_file(out_path, text);
  }
}

/// Cone membership for a matrix loaded from the CLI. Symmetric input gets the
/// exact Jacobi spectrum; general input falls back to the trace-computable
/// test S_1, ..., S_k > 0 (equivalent for real spectra).
bool matrix_in_cone(const isofun::SquareMatrix& a, const isofun::DomainCone& cone) {
  using isofun::DomainCone;
  if (cone.kind == DomainCone::Kind::Full) return true;
  if (isofun::is_symmetric(a)) {
    const isofun::EigenSystem es = isofun::symmetric_eigen(a);
    return isofun::in_domain(cone, es.eigenvalues);
  }
  const int upto = cone.kind == DomainCone::Kind::GammaPlus ? a.dim() : cone.k;
  const std::vector<double> p = isofun::trace_powers(a, upto);
  const std::vector<double> s = isofun::newton_elementary(p);
  for (int k = 0; k < upto; ++k)
    if (s[static_cast<std::size_t>(k)] <= 0.0) return false;
  return true;
}

struct EvalOptions {
  std::string fn;
  std::string matrix_path;
  std::string direction_path;
  std::string direction2_path;
  std::string cone;
  std::string out_path;
  int dim = 0;
};

int cmd_eval(const EvalOptions& opt) {
  const isofun::SquareMatrix a = isofun::load_matrix_file(opt.matrix_path);
  if (opt.dim != 0 && opt.dim != a.dim()) {
    std::cerr << "error: --dim " << opt.dim << " does not match matrix dimension " << a.dim() << "\n";
    return kExitUsage;
  }
  const isofun::SymmetricFunctionSpec spec = isofun::parse_function_spec(opt.fn, a.dim());
  const isofun::DomainCone cone = opt.cone.empty() ? spec.cone() : isofun::parse_cone(opt.cone, a.dim());

  if (!matrix_in_cone(a, cone)) {
    std::cerr << "domain violation: spectrum of the input matrix is not in cone " << cone.to_string() << "\n";
    return kExitDomain;
  }

  const isofun::OperatorFunction fop(spec);
  nlohmann::json out;
  out["function"] = opt.fn;
  out["F"] = fop.value(a);
  out["F_prime"] = isofun::matrix_to_json(fop.derivative(a));
  if (!opt.direction_path.empty()) {
    const isofun::SquareMatrix b = isofun::load_matrix_file(opt.direction_path);
    a.require_same_dim(b);
    out["dF"] = fop.directional_derivative(a, b);
    if (!opt.direction2_path.empty()) {
      const isofun::SquareMatrix c = isofun::load_matrix_file(opt.direction2_path);
      a.require_same_dim(c);
      out["d2F"] = fop.second_derivative(a, b, c);
    }
  } else if (!opt.direction2_path.empty()) {
    std::cerr << "error: --direction2 requires --direction\n";
    return kExitUsage;
  }
  emit(out.dump(2) + "\n", opt.out_path);
  return kExitPass;
}

struct VerifyOptions {
  std::string fn;
  std::string suites;
  std::string cone;
  std::string out_path;
  std::string format = "json";
  int dim = 3;
  int samples = 100;
  std::uint64_t seed = 42;
};

int cmd_verify(const VerifyOptions& opt) {
  const isofun::SymmetricFunctionSpec spec = isofun::parse_function_spec(opt.fn, opt.dim);
  const isofun::DomainCone cone = opt.cone.empty() ? spec.cone() : isofun::parse_cone(opt.cone, opt.dim);

  std::vector<isofun::Suite> suites;
  std::stringstream ss(opt.suites);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    const auto suite = isofun::suite_from_name(name);
    if (!suite) {
      std::cerr << "error: unknown suite '" << name << "'\n";
      return kExitUsage;
    }
    suites.push_back(*suite);
  }
  if (suites.empty()) {
    std::cerr << "error: no suites requested\n";
    return kExitUsage;
  }

  isofun::SampleConfig cfg;
  cfg.dim = opt.dim;
  cfg.samples = opt.samples;
  cfg.seed = opt.seed;
  cfg.cone = cone;
  cfg.spectrum_range = cone.kind == isofun::DomainCone::Kind::Full ? std::pair{-2.0, 2.0} : std::pair{0.2, 3.0};

  const isofun::OperatorFunction fop(spec);
  std::vector<isofun::FunctionReport> rows;
  bool all_pass = true;
  for (const isofun::Suite suite : suites) {
    isofun::PropertyReport report = isofun::run_suite(suite, fop, cfg);
    all_pass = all_pass && report.pass;
    rows.push_back({opt.fn, std::move(report)});
  }

  emit(opt.format == "csv" ? isofun::reports_to_csv(rows) : isofun::reports_to_json(rows), opt.out_path);
  return all_pass ? kExitPass : kExitSuiteFailure;
}

struct ReportOptions {
  std::vector<std::string> inputs;
  std::string out_path;
  std::string format = "csv";
};

int cmd_report(const ReportOptions& opt) {
  std::vector<isofun::FunctionReport> rows;
  for (const std::string& path : opt.inputs) {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "error: cannot open report '" << path << "'\n";
      return kExitUsage;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    for (auto& row : isofun::reports_from_json_text(buf.str())) rows.push_back(std::move(row));
  }
  emit(opt.format == "csv" ? isofun::reports_to_csv(rows) : isofun::reports_to_json(rows), opt.out_path);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operator functions of symmetric eigenvalue functions: evaluation and property verification"};
  app.require_subcommand(1);

  EvalOptions eopt;
  CLI::App* eval = app.add_subcommand("eval", "evaluate F, F', and directional derivatives on a matrix");
  eval->add_option("--fn", eopt.fn, "function spec (p<k>, s<k>, q<k>, ratio:<k>:<l>, inv:<spec>, psi:<expr>)")
      ->required();
  eval->add_option("--matrix", eopt.matrix_path, "JSON matrix file (array of rows)")->required();
  eval->add_option("--direction", eopt.direction_path, "direction B for dF(A)B");
  eval->add_option("--direction2", eopt.direction2_path, "direction C for d2F(A)(B,C)");
  eval->add_option("--dim", eopt.dim, "expected dimension (validated against the matrix)");
  eval->add_option("--cone", eopt.cone, "override domain cone: full | gplus | gk:<k>");
  eval->add_option("--out", eopt.out_path, "output path (default stdout)");

  VerifyOptions vopt;
  CLI::App* verify = app.add_subcommand("verify", "run verification suites and write a report");
  verify->add_option("--fn", vopt.fn, "function spec")->required();
  verify->add_option("--suites", vopt.suites,
                     "comma-separated: grad,hess,similarity,monotone,homog,concave,"
                     "nonconvex-skew,invconc1,invconc2,regularity,eigen-consistency")
      ->required();
  verify->add_option("--dim", vopt.dim, "operator dimension (default 3)");
  verify->add_option("--samples", vopt.samples, "samples per suite (default 100)");
  verify->add_option("--seed", vopt.seed, "base RNG seed (default 42)");
  verify->add_option("--cone", vopt.cone, "override sampling cone: full | gplus | gk:<k>");
  verify->add_option("--out", vopt.out_path, "output path (default stdout)");
  verify->add_option("--format", vopt.format, "json | csv (default json)")
      ->check(CLI::IsMember({"json", "csv"}));

  ReportOptions ropt;
  CLI::App* report = app.add_subcommand("report", "merge verify reports into one summary table");
  report->add_option("inputs", ropt.inputs, "PropertyReport JSON files")->required();
  report->add_option("--out", ropt.out_path, "output path (default stdout)");
  report->add_option("--format", ropt.format, "json | csv (default csv)")->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (eval->parsed()) return cmd_eval(eopt);
    if (verify->parsed()) return cmd_verify(vopt);
    if (report->parsed()) return cmd_report(ropt);
  } catch (const isofun::DomainViolation& e) {
    std::cerr << "domain violation: " << e.what() << "\n";
    return kExitDomain;
  } catch (const isofun::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const isofun::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

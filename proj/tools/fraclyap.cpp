// fraclyap: constants, existence certificates, Lyapunov-type bounds and
// numerical solutions for  D^alpha y + q(t) f(y) = 0,  y(a) = y(b) = 0.
//
// Exit codes: 0 success, 1 negative verdict / failed selftest, 2 spec or
// usage error, 3 numerical failure, 4 solver non-convergence.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include <fraclyap/acceptance.hpp>
#include <fraclyap/errors.hpp>
#include <fraclyap/existence.hpp>
#include <fraclyap/green_kernel.hpp>
#include <fraclyap/io/problem_spec.hpp>
#include <fraclyap/io/report.hpp>
#include <fraclyap/lyapunov.hpp>
#include <fraclyap/solver.hpp>

namespace {

using fraclyap::io::json;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitSpec = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNoConvergence = 4;

struct Args {
  std::string spec_path;
  std::string r1_text;
  std::string r2_text;
  std::string eta_text;
  std::string csv_path;
  bool json_out = false;
  bool search = false;
  double r_min = 1e-3;
  double r_max = 10.0;
};

const json kNotes = {
    "G(t,s) uses the s <= t branch for s <= t and the separable branch for t <= s",
    "middle third is [(2a+b)/3, (a+2b)/3] = [a+(b-a)/3, b-(b-a)/3]"};

void emit(const json& report, const Args& args) {
  if (args.json_out) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << fraclyap::io::render_text(report);
  }
}

fraclyap::io::ProblemSpec load(const Args& args) {
  if (args.spec_path.empty()) {
    throw fraclyap::SpecError("--spec FILE is required for this command");
  }
  return fraclyap::io::load_problem_spec(args.spec_path);
}

std::optional<std::pair<double, double>> radii_from(const Args& args,
                                                    const fraclyap::io::ProblemSpec& spec) {
  if (args.r1_text.empty() != args.r2_text.empty()) {
    throw fraclyap::SpecError("--r1 and --r2 must be given together");
  }
  if (!args.r1_text.empty()) {
    const double r1 = fraclyap::io::parse_constant(args.r1_text);
    const double r2 = fraclyap::io::parse_constant(args.r2_text);
    if (!(r1 > 0.0 && r2 > r1)) {
      throw fraclyap::SpecError("radii must satisfy 0 < r1 < r2");
    }
    return std::pair{r1, r2};
  }
  return spec.radii;
}

json existence_settings(const fraclyap::ExistenceOptions& o) {
  return {{"quadrature", fraclyap::io::quadrature_settings(o.quadrature)},
          {"q_samples", o.q_samples},
          {"f_samples", o.f_samples},
          {"radii_per_decade", o.radii_per_decade}};
}

int cmd_constants(const Args& args) {
  const auto spec = load(args);
  const fraclyap::ExistenceOptions opts;
  const auto geom = fraclyap::solve_lambda(spec.problem);
  const auto constants = fraclyap::existence_constants(spec.problem, opts);
  const auto diag = fraclyap::green_diag_max(geom);
  json report = fraclyap::io::report_header("constants", &spec.problem);
  report["constants"] = fraclyap::io::constants_json(constants, geom, diag);
  report["settings"] = existence_settings(opts);
  report["notes"] = kNotes;
  if (!(constants.gamma_star > constants.gamma)) {
    report["warnings"] = json::array({"gamma_star does not exceed gamma"});
  }
  emit(report, args);
  return kExitOk;
}

int cmd_existence(const Args& args) {
  const auto spec = load(args);
  const fraclyap::ExistenceOptions opts;
  const auto constants = fraclyap::existence_constants(spec.problem, opts);
  json report = fraclyap::io::report_header("existence", &spec.problem);
  report["settings"] = existence_settings(opts);

  auto radii = radii_from(args, spec);
  if (!radii) {
    if (!args.search) {
      throw fraclyap::SpecError("existence needs radii (--r1/--r2 or spec.radii) or --search");
    }
    report["search"] = {{"r_min", args.r_min}, {"r_max", args.r_max}};
    radii = fraclyap::search_radii(spec.problem, constants, args.r_min, args.r_max, opts);
    report["search"]["found"] = radii.has_value();
  }
  fraclyap::ExistenceCertificate cert;
  if (radii) {
    cert = fraclyap::check_hypotheses(spec.problem, constants, radii->first, radii->second,
                                      opts);
  } else {
    // nothing on the grid: report the bare constants with a negative verdict
    cert.gamma = constants.gamma;
    cert.gamma_star = constants.gamma_star;
    cert.warnings.push_back("no admissible (r1, r2) on the search grid");
  }
  report["certificate"] = fraclyap::io::certificate_json(cert);
  emit(report, args);
  return cert.conclusion == fraclyap::Conclusion::Exists ? kExitOk : kExitNegative;
}

int cmd_lyapunov(const Args& args) {
  const auto spec = load(args);
  const fraclyap::LyapunovOptions opts;
  json report = fraclyap::io::report_header("lyapunov", &spec.problem);
  int code = kExitOk;
  fraclyap::LyapunovReport lyap;
  const auto radii = radii_from(args, spec);
  if (!args.eta_text.empty()) {
    lyap = fraclyap::verify_inequality(spec.problem, fraclyap::io::parse_constant(args.eta_text),
                                       opts);
    report["source"] = "eta";
  } else if (radii) {
    lyap = fraclyap::verify_corollary(spec.problem, radii->first, radii->second, opts);
    report["source"] = "radii";
    report["premise"] = fraclyap::io::certificate_json(
        fraclyap::check_hypotheses(spec.problem, radii->first, radii->second));
  } else {
    const auto sol = fraclyap::picard_solve(spec.problem, spec.solver);
    if (sol.status != fraclyap::SolveStatus::Converged) {
      code = kExitNoConvergence;
    }
    report["source"] = "solved";
    const auto gl = fraclyap::gl_residual(spec.problem, sol);
    report["solution"] = fraclyap::io::solution_json(sol, gl);
    report["settings"]["solver"] = fraclyap::io::solver_settings(spec.solver);
    lyap = fraclyap::verify_inequality(spec.problem, sol.eta, opts);
  }
  report["lyapunov"] = fraclyap::io::lyapunov_json(lyap);
  report["settings"]["quadrature"] = fraclyap::io::quadrature_settings(opts.quadrature);
  report["settings"]["indeterminate_rel"] = opts.indeterminate_rel;
  report["settings"]["shape_samples"] = opts.shape_samples;
  emit(report, args);
  return code;
}

int cmd_solve(const Args& args) {
  const auto spec = load(args);
  fraclyap::SolverOptions opts = spec.solver;
  opts.radii = radii_from(args, spec);
  const auto sol = fraclyap::picard_solve(spec.problem, opts);
  json report = fraclyap::io::report_header("solve", &spec.problem);
  report["settings"]["solver"] = fraclyap::io::solver_settings(opts);
  if (sol.intervals() >= 100) {
    report["solution"] = fraclyap::io::solution_json(sol, fraclyap::gl_residual(spec.problem, sol));
  } else {
    report["solution"] = fraclyap::io::solution_json(sol, {});
    report["solution"]["gl_residual"] = nullptr;
    report["solution"]["warnings"].push_back("grid too coarse for the GL residual (n < 100)");
  }
  if (!args.csv_path.empty()) {
    std::ofstream out(args.csv_path);
    if (!out) {
      throw fraclyap::SpecError("cannot write CSV file '" + args.csv_path + "'");
    }
    fraclyap::write_csv(out, sol);
    report["csv"] = args.csv_path;
  }
  emit(report, args);
  return sol.status == fraclyap::SolveStatus::Converged ? kExitOk : kExitNoConvergence;
}

int cmd_selftest(const Args& args) {
  const auto results = fraclyap::acceptance::run_all();
  bool all = true;
  const fraclyap::acceptance::CriterionResult* first_failure = nullptr;
  json criteria = json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    if (!r.passed && !first_failure) {
      first_failure = &r;
    }
    criteria.push_back({{"id", r.id},
                        {"name", r.name},
                        {"passed", r.passed},
                        {"detail", r.detail},
                        {"seconds", r.seconds}});
  }
  if (args.json_out) {
    json report = fraclyap::io::report_header("selftest", nullptr);
    report["criteria"] = criteria;
    report["passed"] = all;
    report["notes"] = kNotes;
    std::cout << report.dump(2) << '\n';
  } else {
    for (const auto& note : kNotes) {
      std::cout << "note: " << note.get<std::string>() << '\n';
    }
    for (const auto& r : results) {
      std::cout << fraclyap::acceptance::format_line(r) << '\n';
    }
    std::cout << (all ? "selftest: all criteria passed" : "selftest: FAILED") << '\n';
  }
  if (first_failure) {
    std::cerr << "first failing criterion: " << first_failure->id << ". " << first_failure->name
              << '\n';
    return kExitNegative;
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional boundary value problems: Green kernel constants, existence "
               "certificates, Lyapunov-type bounds and Picard solutions"};
  app.require_subcommand(1, 1);
  Args args;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", args.spec_path, "JSON problem file");
    sub->add_option("--r1", args.r1_text, "inner radius (number or constant expression)");
    sub->add_option("--r2", args.r2_text, "outer radius (number or constant expression)");
    sub->add_option("--eta", args.eta_text, "solution maximum for the Lyapunov bound");
    sub->add_option("--csv", args.csv_path, "write the solution grid as CSV");
    sub->add_flag("--json", args.json_out, "machine-readable JSON output");
  };
  auto* constants = app.add_subcommand("constants", "gamma, gamma_star, lambda, kernel maximum");
  auto* existence = app.add_subcommand("existence", "check (H1)/(H2) for given or searched radii");
  auto* lyapunov = app.add_subcommand("lyapunov", "generalized Lyapunov-type inequality");
  auto* solve = app.add_subcommand("solve", "Picard solution with GL residual check");
  auto* selftest = app.add_subcommand("selftest", "reproduce published values and properties");
  for (auto* sub : {constants, existence, lyapunov, solve, selftest}) {
    add_common(sub);
  }
  existence->add_flag("--search", args.search, "scan log-spaced radii for (H1)/(H2)");
  existence->add_option("--r-min", args.r_min, "search lower end")->capture_default_str();
  existence->add_option("--r-max", args.r_max, "search upper end")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitSpec;
  }

  try {
    if (*constants) {
      return cmd_constants(args);
    }
    if (*existence) {
      return cmd_existence(args);
    }
    if (*lyapunov) {
      return cmd_lyapunov(args);
    }
    if (*solve) {
      return cmd_solve(args);
    }
    return cmd_selftest(args);
  } catch (const fraclyap::SpecError& e) {
    std::cerr << "spec error: " << e.what() << "\n\n" << app.help();
    return kExitSpec;
  } catch (const fraclyap::ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << '\n';
    return kExitSpec;
  } catch (const fraclyap::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

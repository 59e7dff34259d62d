#include "lipc/pipeline.hpp"

#include "lipc/grid_io.hpp"
#include "lipc/io_util.hpp"
#include "lipc/studies.hpp"

#include <json.hpp>

#include <ostream>
#include <sstream>

namespace lipc {

namespace {

CsvMetadata metadata(const ParsedConfig& c, const std::string& command) {
  CsvMetadata m;
  m.add("config_hash", c.experiment.config_hash);
  m.add("seed", std::to_string(c.experiment.seed));
  m.add("grid", c.problem.grid().describe());
  m.add("command", command);
  return m;
}

void write(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  write_text_file((dir / name).string(), text);
}

std::string history_csv(const std::vector<HistoryRow>& rows, const CsvMetadata& meta) {
  std::ostringstream s;
  s << "eps,iter,J,natural_residual\n";
  for (const auto& r : rows)
    s << format_double(r.eps) << ',' << r.iter << ',' << format_double(r.objective) << ','
      << format_double(r.natural_residual) << '\n';
  s << meta.render();
  return s.str();
}

std::string levels_csv(const PathFollowResult& pf, const CsvMetadata& meta) {
  std::ostringstream s;
  s << "eps,iterations,natural_residual,J,increment\n";
  for (const auto& l : pf.levels)
    s << format_double(l.eps) << ',' << l.iterations << ',' << format_double(l.natural_residual) << ','
      << format_double(l.objective) << ',' << format_double(l.increment) << '\n';
  s << meta.render();
  return s.str();
}

struct Candidate {
  GridFunction u, y, zeta, p, mu_a, mu_b, y_eps;
  double eps_final = 0.0;
};

void write_fields(const std::filesystem::path& dir, const Grid& grid, const Candidate& c, const CsvMetadata& meta) {
  write(dir, "u.csv", grid_function_to_csv(grid, c.u, &meta));
  write(dir, "y.csv", grid_function_to_csv(grid, c.y, &meta));
  write(dir, "zeta.csv", grid_function_to_csv(grid, c.zeta, &meta));
  write(dir, "p.csv", grid_function_to_csv(grid, c.p, &meta));
  write(dir, "mu_a.csv", grid_function_to_csv(grid, c.mu_a, &meta));
  write(dir, "mu_b.csv", grid_function_to_csv(grid, c.mu_b, &meta));
}

Candidate optimize(const ParsedConfig& c, const std::filesystem::path& dir, const CsvMetadata& meta, bool verbose,
                   std::ostream& log) {
  const auto& problem = c.problem;
  const auto& o = c.experiment.optimize;
  const Vector u0 = realize(o.initial_control, problem.grid());
  PathFollowResult pf = path_follow(problem, o.smoothing, o.eps_schedule, u0, o.options);
  if (verbose)
    for (const auto& l : pf.levels)
      log << "{\"eps\": " << format_double(l.eps) << ", \"iterations\": " << l.iterations
          << ", \"natural_residual\": " << format_double(l.natural_residual)
          << ", \"increment\": " << format_double(l.increment) << "}\n";
  for (const auto& w : pf.warnings) log << "warning: " << w << '\n';
  write(dir, "history.csv", history_csv(pf.history, meta));
  write(dir, "path.csv", levels_csv(pf, meta));
  return {pf.u, pf.y, pf.zeta, pf.p, pf.mu_a, pf.mu_b, pf.y_eps, pf.epsilons.back()};
}

Candidate candidate_at(const ParsedConfig& c, const Vector& u) {
  const auto& problem = c.problem;
  const auto& o = c.experiment.optimize;
  Candidate out;
  out.u = u;
  const Smoothing s = o.smoothing.with_epsilon(o.eps_schedule.back());
  SmoothedGradient sg = smoothed_gradient(problem, s, u);
  out.y = solve_state(problem, u, &sg.y).y;
  out.y_eps = sg.y;
  out.zeta = sg.zeta.cwiseMax(0.0);
  out.p = solve_adjoint(problem, out.zeta, out.y - problem.target());
  out.eps_final = s.epsilon;
  if (problem.bounds()) {
    Multipliers m = extract_multipliers(out.u, out.p, problem.alpha(), *problem.bounds());
    out.mu_a = m.mu_a;
    out.mu_b = m.mu_b;
  } else {
    out.mu_a = out.mu_b = GridFunction::Zero(u.size());
  }
  return out;
}

int run(const ParsedConfig& c, const RunOptions& opt, std::ostream& log) {
  const auto& problem = c.problem;
  const auto& grid = problem.grid();
  const auto& dir = opt.out_dir;
  std::filesystem::create_directories(dir);
  const CsvMetadata meta = metadata(c, opt.command);

  if (opt.command == "solve") {
    const Vector u = realize(c.experiment.solve.control, grid);
    StateSolveResult r = solve_state(problem, u);
    write(dir, "y.csv", grid_function_to_csv(grid, r.y, &meta));
    nlohmann::ordered_json j;
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta.entries) j["meta"][k] = v;
    j["iterations"] = r.iterations;
    j["final_residual"] = r.final_residual;
    j["linf_bound_used"] = r.linf_bound_used;
    j["truncation_active"] = r.truncation_active;
    j["picard_fallback"] = r.picard_fallback;
    j["residual_trace"] = r.residual_trace;
    j["warnings"] = r.warnings;
    write(dir, "solve.json", j.dump(2) + "\n");
    if (opt.verbose) log << j.dump() << '\n';
    return exit_ok;
  }
  if (opt.command == "optimize") {
    write_fields(dir, grid, optimize(c, dir, meta, opt.verbose, log), meta);
    return exit_ok;
  }
  if (opt.command == "check") {
    const auto& chk = c.experiment.check;
    Candidate cand = chk.control ? candidate_at(c, realize(*chk.control, grid))
                                 : optimize(c, dir, meta, opt.verbose, log);
    write_fields(dir, grid, cand, meta);
    StationarityTolerances tol = chk.tol;
    if (chk.auto_kink_tol) tol.kink_tol = cand.eps_final + norm_linf(cand.y - cand.y_eps);
    StationarityReport report = check_all(problem, cand.u, cand.y, cand.zeta, cand.p, tol);
    report.notes.push_back("measure conditions are checked as node fractions, not Lebesgue measures");
    if (chk.auto_kink_tol) report.notes.push_back("kink_tol = final eps + ||y - y_eps||_inf");
    write(dir, "report.json", report.to_json(&meta));
    const int code = report.exit_code(chk.conditions);
    if (opt.verbose) log << "check exit code " << code << '\n';
    return code;
  }
  if (opt.command == "approx-study") {
    ApproxStudyResult r = run_approx_study(problem, c.experiment);
    write(dir, "approx_study.csv", r.csv(meta));
    return exit_ok;
  }
  if (opt.command == "mollifier-study") {
    MollifierStudyResult r = run_mollifier_study(problem.nonlinearity(), c.experiment.mollifier, c.experiment.seed);
    write(dir, "mollifier_study.csv", r.csv(meta));
    return exit_ok;
  }
  throw ParameterError("unknown command \"" + opt.command + "\"");
}

}  // namespace

int run_pipeline(const ParsedConfig& config, const RunOptions& options, std::ostream& log) {
  try {
    return run(config, options, log);
  } catch (const ConvergenceError& e) {
    log << "error: " << e.what() << '\n';
    if (options.verbose) {
      log << "residual trace:";
      for (double r : e.trace()) log << ' ' << format_double(r);
      log << '\n';
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
  }
  return exit_solver_failure;
}

int run_from_file(const std::filesystem::path& config_path, const RunOptions& options,
                  std::optional<std::uint64_t> seed_override, std::ostream& log) {
  std::optional<ParsedConfig> parsed;
  try {
    parsed.emplace(parse_config(config_path));
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_solver_failure;
  }
  if (seed_override) {
    parsed->experiment.seed = *seed_override;
    parsed->experiment.check.tol.seed = *seed_override;
  }
  RunOptions opt = options;
  if (opt.out_dir.empty()) opt.out_dir = parsed->experiment.out_dir;
  return run_pipeline(*parsed, opt, log);
}

}  // namespace lipc

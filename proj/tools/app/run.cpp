#include "run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>

#include "ovi/errors.hpp"
#include "ovi/field_io.hpp"

namespace ovi::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasibilitySlack = 1e-14;

json report_json(const SolveReport& r, bool with_trace) {
  json j{{"scheme", r.scheme},
         {"method", r.method},
         {"iterations", r.iterations},
         {"final_residual", r.final_residual},
         {"converged", r.converged}};
  if (with_trace) j["energy_trace"] = r.energy_trace;
  return j;
}

struct Outcome {
  json verification = json::object();
  bool verified = true;
  bool converged = true;

  void record(const std::string& name, json detail, bool pass) {
    detail["pass"] = pass;
    verification[name] = std::move(detail);
    verified = verified && pass;
  }
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setw(2) << j << '\n';
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

// Moves interior obstacle values by `shift`, leaving the boundary alone so
// that the shifted problem stays admissible.
Field shift_interior(const Field& u, double shift) {
  Field out = u;
  for (int node : u.grid()->interior_nodes()) out[node] += shift;
  return out;
}

Field finite_or(const Field& u, double fallback) {
  Field out = u;
  for (std::size_t k = 0; k < out.size(); ++k)
    if (!std::isfinite(out[k])) out[k] = fallback;
  return out;
}

double density_chain_violation(const DiscreteOperator& op, const Field& u, const Field& lo, const Field& hi) {
  const DualField au = op.apply(u);
  const auto nodes = op.grid()->interior_nodes();
  double worst = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    worst = std::max({worst, lo[nodes[k]] - au.values[k], au.values[k] - hi[nodes[k]]});
  return worst;
}

bool wants(const std::vector<std::string>& list, const std::string& name) {
  return std::find(list.begin(), list.end(), name) != list.end();
}

void check_names(const RunConfig& cfg) {
  const auto known = available_verifiers(cfg.kind);
  for (const auto& v : cfg.verify)
    if (!wants(known, v))
      throw InvalidArgument("unknown verifier '" + v + "' for a " + to_string(cfg.kind) + " problem");
}

Outcome run_obstacle(const RunConfig& cfg, std::ostream& out) {
  const DiscreteOperator op = cfg.make_operator();
  const ObstacleProblem& prob = cfg.obstacle;
  prob.validate();
  SolverOptions opts = cfg.solver;
  opts.record_energy = cfg.emit_energy_trace;
  const SolveResult r = solve_two_obstacle(op, prob, opts);

  Outcome oc;
  oc.converged = r.report.converged;
  const auto& names = cfg.verify;
  const double sol_tol = 10.0 * cfg.solver.tol;

  if (wants(names, "lewy_stampacchia")) {
    const LSReport ls = verify_lewy_stampacchia(op, r.u, prob, cfg.ls_tolerance());
    oc.record("lewy_stampacchia",
              {{"lower_violation", ls.lower_violation}, {"upper_violation", ls.upper_violation},
               {"worst_node", ls.worst_node}, {"tolerance", cfg.ls_tolerance()}},
              ls.pass);
  }
  if (wants(names, "feasibility")) {
    double excess = 0.0;
    for (std::size_t k = 0; k < r.u.size(); ++k) {
      excess = std::max({excess, prob.psi[k] - r.u[k], r.u[k] - prob.phi[k]});
      if (r.u.grid()->on_boundary(static_cast<int>(k))) excess = std::max(excess, std::abs(r.u[k]));
    }
    oc.record("feasibility", {{"max_excess", excess}}, excess <= kFeasibilitySlack);
  }
  if (wants(names, "uniqueness")) {
    const Field start = project_box(finite_or(prob.phi, sup_norm(finite_or(prob.psi, 0.0)) + 1.0), prob);
    const SolveResult second = solve_two_obstacle(op, prob, cfg.solver, start);
    const double gap = sup_distance(second.u, r.u);
    oc.record("uniqueness", {{"gap", gap}, {"tolerance", sol_tol}}, second.report.converged && gap <= sol_tol);
  }
  if (wants(names, "comparison")) {
    const ObstacleProblem lower{prob.f - 1.0, shift_interior(prob.psi, -0.1), shift_interior(prob.phi, -0.1)};
    const ComparisonReport c = verify_comparison(op, prob, lower, cfg.solver, sol_tol);
    oc.record("comparison", {{"min_gap", c.min_gap}, {"tolerance", sol_tol}}, c.pass);
  }
  if (wants(names, "linf_dependence")) {
    const ObstacleProblem moved{prob.f, shift_interior(prob.psi, 0.05), shift_interior(prob.phi, 0.05)};
    const LinfReport l = verify_linf_dependence(op, prob, moved, cfg.solver, sol_tol);
    oc.record("linf_dependence",
              {{"solution_gap", l.solution_gap}, {"data_gap", l.data_gap}, {"tolerance", sol_tol}}, l.pass);
  }

  prepare_dir(cfg.out_dir);
  write_field_csv(cfg.out_dir / "u.csv", r.u);
  json rep = report_json(r.report, cfg.emit_energy_trace);
  rep["problem"] = "obstacle";
  rep["verification"] = oc.verification;
  write_json(cfg.out_dir / "report.json", rep);
  out << "obstacle: " << r.report.iterations << " iterations, residual " << format_g17(r.report.final_residual)
      << (r.report.converged ? "" : " (not converged)") << '\n';
  return oc;
}

Outcome run_membranes(const RunConfig& cfg, std::ostream& out) {
  const DiscreteOperator op = cfg.make_operator();
  const MembraneSystem& sys = cfg.membranes;
  sys.validate(cfg.grid);
  SolverOptions opts = cfg.solver;
  opts.record_energy = cfg.emit_energy_trace;
  const MembraneResult r =
      cfg.epsilon ? solve_membranes_penalized(op, sys, *cfg.epsilon, opts) : solve_membranes_vi(op, sys, opts);

  Outcome oc;
  oc.converged = r.report.converged;
  const auto& names = cfg.verify;
  if (wants(names, "ls_chain")) {
    const MembraneLSReport ls = verify_ls_membranes(op, r.us, sys.fs, cfg.ls_tolerance());
    oc.record("ls_chain",
              {{"lower_violation", ls.lower_violation}, {"upper_violation", ls.upper_violation},
               {"tolerance", cfg.ls_tolerance()}},
              ls.pass);
  }
  if (wants(names, "ordering")) {
    const double excess = max_order_excess(r.us);
    const double allowed = cfg.epsilon ? *cfg.epsilon + 10.0 * cfg.solver.tol : kFeasibilitySlack;
    oc.record("ordering", {{"max_excess", excess}, {"allowed", allowed}}, excess <= allowed);
  }

  prepare_dir(cfg.out_dir);
  for (std::size_t i = 0; i < r.us.size(); ++i)
    write_field_csv(cfg.out_dir / ("u" + std::to_string(i + 1) + ".csv"), r.us[i]);
  json rep = report_json(r.report, cfg.emit_energy_trace);
  rep["problem"] = "membranes";
  rep["solver"] = cfg.epsilon ? "penalized" : "projection";
  if (cfg.epsilon) {
    rep["epsilon"] = *cfg.epsilon;
    rep["penalized_residual"] = penalized_residual(op, sys, r.us, *cfg.epsilon);
  }
  rep["verification"] = oc.verification;
  write_json(cfg.out_dir / "report.json", rep);
  out << "membranes (" << (cfg.epsilon ? "penalized" : "projection") << "): " << r.report.iterations
      << " iterations, residual " << format_g17(r.report.final_residual)
      << (r.report.converged ? "" : " (not converged)") << '\n';
  return oc;
}

Outcome run_qvi(const RunConfig& cfg, std::ostream& out) {
  const DiscreteOperator op = cfg.make_operator();
  SolverOptions seed_opts = cfg.solver;
  seed_opts.tol = cfg.qvi_options.tol / cfg.qvi_options.inner_ratio;
  const std::size_t N = cfg.qvi_fs.size();
  const auto c = cfg.qvi_constants;
  double lambda0 = 0.0;
  if (c.phi_relative || c.psi_relative) lambda0 = extremal_seeds(op, cfg.qvi_fs, seed_opts).lambda0;
  const auto resolve = [&](std::vector<std::vector<double>> m, bool rel) {
    if (rel)
      for (auto& row : m)
        for (double& v : row) v *= lambda0;
    return m;
  };
  const QviProblem prob{cfg.qvi_fs, resolve(c.phi, c.phi_relative), resolve(c.psi, c.psi_relative)};
  const QviReport rep = solve_qvi(op, prob, cfg.qvi_options);
  const double tol = cfg.qvi_options.tol;

  Outcome oc;
  oc.converged = rep.converged;
  const auto& names = cfg.verify;
  if (wants(names, "ordering")) oc.record("ordering", json::object(), rep.ordering_ok);
  if (wants(names, "monotone"))
    oc.record("monotone", {{"max_violation", rep.max_monotonicity_violation}, {"tolerance", tol}}, rep.monotone);
  if (wants(names, "fixed_point"))
    oc.record("fixed_point", {{"residual", rep.fixedpoint_residual}, {"tolerance", 10.0 * tol}},
              rep.fixedpoint_residual <= 10.0 * tol);
  if (wants(names, "band"))
    oc.record("band", {{"max_excursion", rep.band_violation}, {"tolerance", tol}}, rep.band_violation <= tol);
  if (wants(names, "ls_chain")) {
    Field mu = prob.fs.front(), nu = prob.fs.front();
    for (const Field& f : prob.fs) {
      mu = lattice_min(mu, f);
      nu = lattice_max(nu, f);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      worst = std::max({worst, density_chain_violation(op, rep.max_solution[i], mu, nu),
                        density_chain_violation(op, rep.min_solution[i], mu, nu)});
    const double allowed = cfg.verify_tol.value_or(op.scheme() == Scheme::edge ? 1e3 * tol : 1e-2);
    oc.record("ls_chain", {{"max_violation", worst}, {"tolerance", allowed}}, worst <= allowed);
  }

  prepare_dir(cfg.out_dir);
  for (std::size_t i = 0; i < N; ++i) {
    write_field_csv(cfg.out_dir / ("max_u" + std::to_string(i + 1) + ".csv"), rep.max_solution[i]);
    write_field_csv(cfg.out_dir / ("min_u" + std::to_string(i + 1) + ".csv"), rep.min_solution[i]);
  }
  double gap = 0.0;
  for (std::size_t i = 0; i < N; ++i) gap = std::max(gap, sup_distance(rep.max_solution[i], rep.min_solution[i]));
  const json j{{"problem", "qvi"},
               {"scheme", to_string(op.scheme())},
               {"lambda0", rep.lambda0},
               {"compatible", rep.compatible},
               {"phi", prob.phi},
               {"psi", prob.psi},
               {"iterations", rep.iterates},
               {"descending_deltas", rep.descending_deltas},
               {"ascending_deltas", rep.ascending_deltas},
               {"fixedpoint_residual", rep.fixedpoint_residual},
               {"max_min_gap", gap},
               {"converged", rep.converged},
               {"verification", oc.verification}};
  write_json(cfg.out_dir / "report.json", j);
  out << "qvi: lambda0 " << format_g17(rep.lambda0) << ", " << rep.descending_iterations << " descending / "
      << rep.ascending_iterations << " ascending iterations, fixed-point residual "
      << format_g17(rep.fixedpoint_residual) << (rep.converged ? "" : " (not converged)") << '\n';
  return oc;
}

int finish(const Outcome& oc, std::ostream& out) {
  for (const auto& [name, detail] : oc.verification.items())
    out << "  " << (detail.at("pass").get<bool>() ? "PASS " : "FAIL ") << name << '\n';
  if (!oc.converged) return kNotConverged;
  return oc.verified ? kOk : kVerificationFailed;
}

int run_loaded(RunConfig& cfg, ProblemKind expected, bool full_suite, std::ostream& out, std::ostream& err) {
  const std::string where = cfg.path.string() + ": ";
  try {
    if (cfg.kind == ProblemKind::none) throw InvalidArgument("config has no problem block");
    if (expected != ProblemKind::none && cfg.kind != expected)
      throw InvalidArgument("expected a " + to_string(expected) + " problem, found " + to_string(cfg.kind));
    if (full_suite || cfg.verify.empty()) cfg.verify = available_verifiers(cfg.kind);
    check_names(cfg);
    Outcome oc;
    switch (cfg.kind) {
      case ProblemKind::obstacle: oc = run_obstacle(cfg, out); break;
      case ProblemKind::membranes: oc = run_membranes(cfg, out); break;
      default: oc = run_qvi(cfg, out); break;
    }
    const int code = finish(oc, out);
    if (code == kNotConverged) err << where << "solver did not converge\n";
    if (code == kVerificationFailed) err << where << "verification failed\n";
    return code;
  } catch (const std::exception& e) {
    err << where << e.what() << '\n';
    return kConfigError;
  }
}

// Config errors dominate, then non-convergence, then failed verification.
int severity(int code) {
  switch (code) {
    case kConfigError: return 3;
    case kNotConverged: return 2;
    case kVerificationFailed: return 1;
    default: return 0;
  }
}

}  // namespace

std::vector<std::string> available_verifiers(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::obstacle: return {"lewy_stampacchia", "feasibility", "uniqueness", "comparison", "linf_dependence"};
    case ProblemKind::membranes: return {"ls_chain", "ordering"};
    case ProblemKind::qvi: return {"ordering", "monotone", "fixed_point", "band", "ls_chain"};
    default: return {};
  }
}

int run_check_operator(const fs::path& config, const Overrides& ov, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config, ov);
    const auto t_grid = log_spaced(1e-4, 1e4, 161);
    std::vector<Point> xs;
    const int count = cfg.grid->node_count();
    const int stride = std::max(1, count / 64);
    for (int k = 0; k < count; k += stride) xs.push_back(cfg.grid->position(k));
    // Parameter-domain violations surface as evaluation errors (exit 1).
    for (const Point& x : xs)
      for (double t : t_grid) eval_a(*cfg.function, x, t);
    const StructureReport r = check_structure(*cfg.function, t_grid, xs);

    out << std::setprecision(10);
    out << "function        " << cfg.function->id() << '\n';
    if (const auto& d = cfg.function->declared_bounds())
      out << "declared        [" << d->lower << ", " << d->upper << "]\n";
    out << "estimated       [" << r.lower_est << ", " << r.upper_est << "]\n";
    out << "t g / G         [" << r.young_ratio_min << ", " << r.young_ratio_max << "]"
        << (r.young_ratio_ok ? "" : "  outside [1 + lower, 1 + upper]") << '\n';
    out << "positive        " << (r.positive ? "yes" : "no") << '\n';
    out << "vanishing flux  " << (r.vanishing_flux ? "yes" : "no") << '\n';
    out << "increasing flux " << (r.increasing_flux ? "yes" : "no") << '\n';
    out << "declared ok     " << (r.declared_ok ? "yes" : "no") << '\n';
    constexpr std::size_t kShown = 10;
    for (std::size_t k = 0; k < std::min(kShown, r.failures.size()); ++k) {
      const auto& s = r.failures[k];
      out << "bad sample      x=(" << s.x.x << ", " << s.x.y << ") t=" << s.t << " ratio=" << s.ratio << '\n';
    }
    if (r.failures.size() > kShown) out << "bad sample      (" << r.failures.size() - kShown << " more)\n";
    out << (r.pass ? "PASS" : "FAIL") << '\n';
    return r.pass ? kOk : kVerificationFailed;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
  } catch (const std::exception& e) {
    err << config.string() << ": " << e.what() << '\n';
  }
  return kConfigError;
}

int run_problem(const fs::path& config, ProblemKind expected, const Overrides& ov, std::ostream& out,
                std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(config, ov);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }
  return run_loaded(cfg, expected, false, out, err);
}

int run_verify_dir(const fs::path& dir, const Overrides& ov, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(dir)) {
    err << dir.string() << ": not a directory\n";
    return kConfigError;
  }
  std::set<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") configs.insert(entry.path());
    if (entry.is_directory() && fs::exists(entry.path() / "config.json")) configs.insert(entry.path() / "config.json");
  }
  if (configs.empty()) {
    err << dir.string() << ": no fixture configs found\n";
    return kConfigError;
  }
  int worst = kOk;
  for (const auto& path : configs) {
    out << "== " << path.string() << '\n';
    Overrides local = ov;
    if (ov.out) local.out = *ov.out / fs::relative(path, dir).replace_extension();
    int code = kConfigError;
    try {
      RunConfig cfg = load_config(path, local);
      code = cfg.kind == ProblemKind::none ? run_check_operator(path, local, out, err)
                                           : run_loaded(cfg, ProblemKind::none, true, out, err);
    } catch (const ConfigError& e) {
      err << e.what() << '\n';
    }
    if (severity(code) > severity(worst)) worst = code;
  }
  out << (worst == kOk ? "all fixtures passed" : "some fixtures failed") << '\n';
  return worst;
}

}  // namespace ovi::app

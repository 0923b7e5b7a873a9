#include "hrqhd/run.hpp"

#include "hrqhd/error.hpp"
#include "hrqhd/group_fourier.hpp"
#include "hrqhd/parallel.hpp"
#include "hrqhd/snapshot.hpp"
#include "hrqhd/wave.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hrqhd::io {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string fmt(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::ofstream open_out(const std::string &path) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw Error("cannot write " + path);
  return f;
}

const char *status_name(solver::RunStatus s) {
  switch (s) {
  case solver::RunStatus::Converged: return "converged";
  case solver::RunStatus::NonContraction: return "non-contraction";
  case solver::RunStatus::Vacuum: return "vacuum";
  }
  return "?";
}

ScalarField field_or_zero(const Snapshot &s, const char *name, const Grid3 &g) {
  return s.find(name) ? s.real_field(name) : ScalarField(g);
}

} // namespace

Grid3 make_grid(const RunConfig &c) {
  return Grid3(c.grid.nx, c.grid.ny, c.grid.ntau, c.grid.Lx, c.grid.Ly, c.grid.Ltau);
}

solver::IterationConfig iteration_config(const RunConfig &c) {
  solver::IterationConfig it = c.iteration;
  it.nbar = c.physics.nbar;
  it.delta = c.physics.delta;
  return it;
}

solver::InitialData make_initial_data(const RunConfig &c, const Grid3 &g) {
  solver::InitialData d{ScalarField(g, c.physics.nbar), ScalarField(g), ScalarField(g), ScalarField(g)};
  switch (c.init.kind) {
  case InitKind::Constant:
    break;
  case InitKind::Gaussian: {
    const double w2 = c.init.width_xy * c.init.width_xy, wt2 = c.init.width_tau * c.init.width_tau;
    const double nbar = c.physics.nbar, A = c.init.amplitude, B = c.init.phase_amplitude;
    auto G = [=](double x, double y, double tau) { return std::exp(-(x * x + y * y) / w2 - tau * tau / wt2); };
    d.n0 = ScalarField::from_function(g, [&](double x, double y, double t) { return nbar * (1 + A * G(x, y, t)); });
    d.S0 = ScalarField::from_function(g, [&](double x, double y, double t) { return B * G(x, y, t); });
    break;
  }
  case InitKind::File: {
    const Snapshot s = read_snapshot(c.init.path);
    if (!(s.grid == g))
      throw ConfigError("init.path: snapshot grid does not match the [grid] section");
    d.n0 = s.real_field("n0");
    d.n1 = field_or_zero(s, "n1", g);
    d.S0 = field_or_zero(s, "S0", g);
    d.S1 = field_or_zero(s, "S1", g);
    break;
  }
  }
  return d;
}

void write_energy_csv(const std::string &path, const std::vector<solver::EnergyReport> &rows, int precision) {
  auto f = open_out(path);
  const auto names = solver::EnergyReport::column_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    f << (i ? "," : "") << names[i];
  f << "\n";
  for (const auto &r : rows) {
    const auto v = r.columns();
    for (std::size_t i = 0; i < v.size(); ++i)
      f << (i ? "," : "") << (i + 1 == v.size() ? std::to_string(int(v[i])) : fmt(v[i], precision));
    f << "\n";
  }
}

void write_contraction_csv(const std::string &path, const solver::ContractionLog &log, int precision) {
  auto f = open_out(path);
  f << "j,rho_W1,rho_t_L2,S_W1,S_t_L2,rho_tilde_L2,total,ratio\n";
  for (const auto &r : log.rows) {
    const auto &n = r.norm;
    f << r.j << "," << fmt(n.rho_W1, precision) << "," << fmt(n.rho_t_L2, precision) << "," << fmt(n.S_W1, precision)
      << "," << fmt(n.S_t_L2, precision) << "," << fmt(n.rho_tilde_L2, precision) << "," << fmt(n.total, precision)
      << "," << (std::isnan(r.ratio) ? std::string() : fmt(r.ratio, precision)) << "\n";
  }
}

void write_equivalence_csv(const std::string &path, const solver::EquivalenceReport &r, int precision) {
  auto f = open_out(path);
  f << "t,rho_defect_inf,S_defect_inf,lapS_defect_L2\n";
  for (const auto &row : r.rows)
    f << fmt(row.t, precision) << "," << fmt(row.rho_defect_inf, precision) << "," << fmt(row.S_defect_inf, precision)
      << "," << fmt(row.lap_S_defect_L2, precision) << "\n";
}

std::string csv_columns_help() {
  std::ostringstream os;
  os << "energy.csv columns (squared norms of deviations from the far field):\n  ";
  const auto names = solver::EnergyReport::column_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    os << (i ? ", " : "") << names[i];
  os << "\ncontraction.csv columns: j, rho_W1, rho_t_L2, S_W1, S_t_L2, rho_tilde_L2, total, ratio"
        " (ratio empty on the first row)\n"
        "equivalence.csv columns: t, rho_defect_inf, S_defect_inf, lapS_defect_L2\n";
  return os.str();
}

namespace {

PropagatorCrossCheck cross_check(const solver::RunResult &r, double nbar, const geom::HeisenbergCalculus &calc) {
  PropagatorCrossCheck c;
  if (r.trajectory.size() < 2 || r.sources.size() != r.trajectory.size())
    return c;
  const double sb = std::sqrt(nbar);
  const auto &U0 = r.trajectory.front();
  ScalarField u0 = U0.rho;
  u0 += -sb;
  const double T = r.trajectory.back().t;
  c.dt_bound = linear::leapfrog_dt_bound(calc);
  c.steps = std::max(1, int(std::ceil(T / (0.9 * c.dt_bound))));
  c.dt = T / c.steps;
  std::vector<double> times;
  for (const auto &U : r.trajectory)
    times.push_back(U.t);
  auto F2 = [&](double t) {
    std::size_t m = 1;
    while (m + 1 < times.size() && times[m] < t)
      ++m;
    const double a = std::clamp((t - times[m - 1]) / (times[m] - times[m - 1]), 0.0, 1.0);
    return (1 - a) * r.sources[m - 1].F2 + a * r.sources[m].F2;
  };
  const auto lf = linear::leapfrog_propagate(u0, U0.rho_t, F2, T, c.dt, calc);
  ScalarField ref = r.trajectory.back().rho;
  ref += -sb;
  const double den = l2_norm(ref);
  c.relative_difference = den > 0 ? l2_norm(lf.state.u - ref) / den : l2_norm(lf.state.u);
  c.done = true;
  return c;
}

void write_run_json(const std::string &path, const RunConfig &cfg, const SimulationOutput &out) {
  const auto &r = out.result;
  ordered_json j;
  j["format"] = "hrqhd-run";
  j["version"] = 1;
  j["status"] = status_name(r.status);
  j["exit_code"] = out.exit_code;
  j["message"] = r.message;
  j["iterations"] = r.iterations;
  j["M_star"] = num(r.M_star);
  j["M_star_absolute"] = num(r.M_star_absolute);
  j["T0"] = num(r.T0);
  j["T"] = num(r.T);
  j["dt"] = num(r.dt);
  j["a0"] = num(r.a0);
  j["frak_C"] = num(r.frak_C);
  j["final_low_norm"] = r.log.rows.empty() ? ordered_json(nullptr) : num(r.log.rows.back().norm.total);
  j["geometric_decay"] = r.log.geometric_decay();
  j["min_rho_tilde"] = num(r.min_rho_tilde);
  j["positivity_floor"] = num(r.positivity_floor);
  j["inherited_floor"] = num(r.inherited_floor);
  j["max_source_identity_defect"] = num(r.max_source_identity);
  j["membership"] = r.membership;
  if (r.status == solver::RunStatus::Vacuum)
    j["vacuum"] = {{"t", num(r.vac_t)}, {"x", num(r.vac_x)}, {"y", num(r.vac_y)}, {"tau", num(r.vac_tau)},
                   {"value", num(r.vac_value)}};
  if (r.status == solver::RunStatus::Converged) {
    const auto &e = r.equivalence;
    j["equivalence"] = {{"max_rho_defect_inf", num(e.max_rho)},
                        {"max_S_defect_inf", num(e.max_S)},
                        {"max_lapS_defect_L2", num(e.max_lap)},
                        {"tolerance", num(e.tolerance)},
                        {"pass", e.pass}};
    const auto &sb = r.source_bounds;
    ordered_json ratios = ordered_json::array();
    for (double v : sb.max_ratio)
      ratios.push_back(num(v));
    j["source_bounds"] = {{"M_eff", num(sb.M_eff)}, {"slack", num(sb.slack)}, {"max_ratio_F1_to_F5", ratios},
                          {"pass", sb.pass}};
    const auto &rr = r.reduced;
    j["reduced_residuals"] = {{"wave_rho", num(rr.wave_rho)},       {"wave_S", num(rr.wave_S)},
                              {"poisson", num(rr.poisson)},         {"wave_rho_hi", num(rr.wave_rho_hi)},
                              {"wave_S_hi", num(rr.wave_S_hi)},     {"poisson_hi", num(rr.poisson_hi)},
                              {"budget_rho", num(rr.budget_rho)},   {"budget_S", num(rr.budget_S)},
                              {"budget_poisson", num(rr.budget_poisson)}, {"floor", num(rr.floor)},
                              {"pass", rr.pass}};
  }
  if (out.cross_check.done)
    j["leapfrog_cross_check"] = {{"relative_difference", num(out.cross_check.relative_difference)},
                                 {"dt", num(out.cross_check.dt)},
                                 {"dt_bound", num(out.cross_check.dt_bound)},
                                 {"steps", out.cross_check.steps}};
  j["wall_seconds"] = num(out.seconds);
  j["threads"] = worker_count();
  j["config"] = render_config(cfg);
  auto f = open_out(path);
  f << j.dump(2) << "\n";
}

void write_snapshots(const std::string &dir, const solver::Trajectory &traj, int every) {
  if (every <= 0 || traj.empty())
    return;
  fs::create_directories(dir);
  for (std::size_t m = 0; m < traj.size(); ++m) {
    if (m % std::size_t(every) != 0 && m + 1 != traj.size())
      continue;
    const auto &U = traj[m];
    Snapshot s;
    s.grid = U.rho.grid();
    s.time = U.t;
    s.add("rho", U.rho);
    s.add("rho_t", U.rho_t);
    s.add("S", U.S);
    s.add("S_t", U.S_t);
    s.add("rho_tilde", U.rho_tilde);
    s.add("S_tilde", U.S_tilde);
    s.add("V", U.V);
    s.add("n", map(U.rho, [](double v) { return v * v; }));
    char name[64];
    std::snprintf(name, sizeof name, "step_%06zu.hrqhd", m);
    write_snapshot((fs::path(dir) / name).string(), s);
  }
}

} // namespace

SimulationOutput simulate(const RunConfig &c, const std::string &out_dir, std::ostream *log) {
  c.validate(true);
  const auto start = std::chrono::steady_clock::now();
  const Grid3 g = make_grid(c);
  const solver::IterationConfig it = iteration_config(c);
  const solver::InitialData d = make_initial_data(c, g);
  fs::create_directories(out_dir);

  spectral::FourierOptions fo;
  fo.cache_dir = c.solver.cache_dir;
  if (log)
    *log << "setting up group transform (N = " << c.solver.n_herm << ", grid " << g.nx << "x" << g.ny << "x" << g.ntau
         << ")\n";
  const spectral::GroupFourier gf(g, c.solver.n_herm, fo);
  const geom::HeisenbergCalculus calc(g, c.solver.fd_order);
  const solver::PicardSolver solver(gf, calc, it);

  solver::RunOptions opts;
  if (log)
    opts.on_iteration = [log](const solver::ContractionRow &row) {
      *log << "  j=" << row.j << "  low=" << row.norm.total;
      if (!std::isnan(row.ratio))
        *log << "  ratio=" << row.ratio;
      *log << "  (" << row.seconds << " s)\n";
    };
  SimulationOutput out;
  out.result = solver.run(d, opts);
  const auto &r = out.result;
  switch (r.status) {
  case solver::RunStatus::Converged: out.exit_code = ExitOk; break;
  case solver::RunStatus::NonContraction: out.exit_code = ExitNonContraction; break;
  case solver::RunStatus::Vacuum: out.exit_code = ExitVacuum; break;
  }
  if (r.status == solver::RunStatus::Converged && c.solver.propagator == Propagator::Both)
    out.cross_check = cross_check(r, c.physics.nbar, calc);

  const int p = c.output.precision;
  const fs::path dir(out_dir);
  write_contraction_csv((dir / "contraction.csv").string(), r.log, p);
  if (r.status == solver::RunStatus::Converged) {
    write_energy_csv((dir / "energy.csv").string(), r.energy, p);
    write_equivalence_csv((dir / "equivalence.csv").string(), r.equivalence, p);
    write_snapshots((dir / "snapshots").string(), r.trajectory, c.output.snapshot_every);
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run_json((dir / "run.json").string(), c, out);
  if (log)
    *log << status_name(r.status) << ": " << r.message << "\n";
  return out;
}

} // namespace hrqhd::io

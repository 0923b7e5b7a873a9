#pragma once

#include "hrqhd/config.hpp"
#include "hrqhd/solver.hpp"

#include <ostream>
#include <string>

namespace hrqhd::io {

enum ExitCode : int { ExitOk = 0, ExitConfig = 1, ExitNonContraction = 2, ExitVacuum = 3 };

Grid3 make_grid(const RunConfig &c);
solver::IterationConfig iteration_config(const RunConfig &c);
solver::InitialData make_initial_data(const RunConfig &c, const Grid3 &g);

struct PropagatorCrossCheck {
  bool done = false;
  /// Relative L2 difference of rho - sqrt(nbar) at T between the trajectory
  /// and a leapfrog solve driven by the same F2 trace.
  double relative_difference = 0.0;
  double dt = 0.0, dt_bound = 0.0;
  int steps = 0;
};

struct SimulationOutput {
  int exit_code = ExitOk;
  solver::RunResult result;
  PropagatorCrossCheck cross_check;
  double seconds = 0.0;
};

/// Runs the Picard solver for a validated config and writes energy.csv,
/// contraction.csv, equivalence.csv, run.json and snapshots into out_dir
/// (created if needed). Progress goes to `log` when given. Config and data
/// problems throw ConfigError, PreconditionError or DecodeError.
SimulationOutput simulate(const RunConfig &c, const std::string &out_dir, std::ostream *log = nullptr);

void write_energy_csv(const std::string &path, const std::vector<solver::EnergyReport> &rows, int precision);
void write_contraction_csv(const std::string &path, const solver::ContractionLog &log, int precision);
void write_equivalence_csv(const std::string &path, const solver::EquivalenceReport &r, int precision);

/// Column documentation for --help.
std::string csv_columns_help();

} // namespace hrqhd::io

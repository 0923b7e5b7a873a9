#pragma once

#include "hrqhd/solver.hpp"

#include <map>
#include <string>

namespace hrqhd::io {

struct GridConfig {
  int nx = 48, ny = 48, ntau = 48;
  double Lx = 8.0, Ly = 8.0, Ltau = 8.0;
};

struct PhysicsConfig {
  double nbar = 1.0;
  double delta = 0.25;
  double epsilon = 1.0;
  double upsilon = 1.0;
};

enum class InitKind { Constant, Gaussian, File };

/// gaussian: n0 = nbar (1 + amplitude G), S0 = phase_amplitude G, n1 = S1 = 0
/// with G = exp(-(x^2 + y^2)/width_xy^2 - tau^2/width_tau^2).
/// file: a snapshot holding n0 and optionally n1, S0, S1 (missing fields are zero).
struct InitConfig {
  InitKind kind = InitKind::Gaussian;
  double amplitude = 0.01;
  double phase_amplitude = 0.0;
  double width_xy = 1.0;
  double width_tau = 1.0;
  std::string path;
};

enum class Propagator { Spectral, Fd, Both };

struct SolverConfig {
  Propagator propagator = Propagator::Spectral;
  int fd_order = 4;
  int n_herm = 24;
  double cg_tol = 1e-10;
  std::string cache_dir;
};

struct OutputConfig {
  std::string dir = "out";
  /// Write a snapshot every this many substeps of the converged trajectory; 0 disables.
  int snapshot_every = 0;
  int precision = 17;
};

struct RunConfig {
  GridConfig grid;
  PhysicsConfig physics;
  InitConfig init;
  solver::IterationConfig iteration;
  SolverConfig solver;
  OutputConfig output;

  /// Cross-field checks. With `iterating`, epsilon and upsilon must be 1.
  void validate(bool iterating) const;
};

/// Flat "section.key" -> raw value map of a config text. Lines are
/// `key = value`, `[section]` headers prefix later keys, `#` and `;` start
/// comments. Duplicate keys are rejected.
std::map<std::string, std::string> parse_key_values(const std::string &text);

/// Parses and validates the structure (unknown keys and malformed values
/// throw ConfigError naming the key path). Physics checks are left to validate().
RunConfig parse_config(const std::string &text);
RunConfig load_config(const std::string &path);

/// Canonical key = value rendering of every setting.
std::string render_config(const RunConfig &c);

const char *to_string(InitKind k);
const char *to_string(Propagator p);
const char *to_string(linear::Quadrature q);

} // namespace hrqhd::io

#pragma once

#include <string>
#include <vector>

namespace hrqhd::verify {

enum class Relation { AtMost, AtLeast, Info };

struct CheckRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Relation relation = Relation::Info;
  bool pass = true;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckRow> rows;
  double seconds = 0.0;
  bool pass() const;
  /// Fixed-width pass/fail table.
  std::string table() const;
};

const std::vector<std::string> &suite_names();

/// Runs a named invariant suite at its pinned resolution. Throws
/// ConfigError for an unknown name.
SuiteReport run_suite(const std::string &name);

} // namespace hrqhd::verify

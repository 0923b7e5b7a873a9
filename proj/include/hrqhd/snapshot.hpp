#pragma once

#include "hrqhd/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hrqhd::io {

/// Layout: magic "HRQHD1\0\0", u32 version = 1, u32 nx, ny, ntau, f64 Lx, Ly,
/// Ltau, f64 time, u32 field count, then per field u16 name length, UTF-8
/// name, u8 dtype (0 real f64, 1 complex f64 interleaved) and the payload in
/// grid order (tau fastest, then y, then x). All little-endian.
struct SnapshotField {
  std::string name;
  bool complex = false;
  /// Real samples, or interleaved (re, im) pairs.
  std::vector<double> data;
};

struct Snapshot {
  static constexpr std::uint32_t version = 1;

  Grid3 grid;
  double time = 0.0;
  std::vector<SnapshotField> fields;

  void add(const std::string &name, const ScalarField &u);
  void add(const std::string &name, const ComplexField &u);
  /// nullptr when absent.
  const SnapshotField *find(const std::string &name) const;
  /// Throws DecodeError when absent or complex.
  ScalarField real_field(const std::string &name) const;
  ComplexField complex_field(const std::string &name) const;

  bool operator==(const Snapshot &o) const;
};

std::vector<unsigned char> encode_snapshot(const Snapshot &s);
/// Throws DecodeError on a bad magic, version or size.
Snapshot decode_snapshot(const std::vector<unsigned char> &bytes);

void write_snapshot(const std::string &path, const Snapshot &s);
Snapshot read_snapshot(const std::string &path);

} // namespace hrqhd::io

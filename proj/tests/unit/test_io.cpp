#include "hrqhd/config.hpp"
#include "hrqhd/error.hpp"
#include "hrqhd/run.hpp"
#include "hrqhd/snapshot.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace hrqhd;

namespace {

std::string error_of(const std::string &text) {
  try {
    io::parse_config(text).validate(true);
  } catch (const ConfigError &e) {
    return e.what();
  }
  return "";
}

io::Snapshot sample_snapshot() {
  const Grid3 g(3, 4, 8, 1.5, 2.0, 2.5);
  std::mt19937 rng(5);
  std::normal_distribution<double> N01;
  ScalarField a(g);
  ComplexField b(g);
  for (std::size_t n = 0; n < g.size(); ++n)
    a[n] = N01(rng), b[n] = cplx(N01(rng), N01(rng));
  io::Snapshot s;
  s.grid = g;
  s.time = 0.125;
  s.add("rho", a);
  s.add("Phi", b);
  return s;
}

} // namespace

TEST_CASE("config: sections, comments, quoting and defaults") {
  const auto c = io::parse_config("# comment\n[grid]\nnx = 32 ; trailing\nLx = 5.5\n[init]\nkind = \"constant\"\n"
                                  "[solver]\nquadrature = linear\n[iteration]\nbase = constant\n");
  CHECK(c.grid.nx == 32);
  CHECK(c.grid.ny == 48);
  CHECK(c.grid.Lx == 5.5);
  CHECK(c.init.kind == io::InitKind::Constant);
  CHECK(c.iteration.quadrature == linear::Quadrature::Linear);
  CHECK_FALSE(c.iteration.taylor_base);
}

TEST_CASE("config: render then parse is a fixed point") {
  auto c = io::parse_config("[physics]\ndelta = 0.3\n[iteration]\ndt = 0.0125\nT_final = 0.75\n");
  const std::string text = io::render_config(c);
  const auto d = io::parse_config(text);
  CHECK(io::render_config(d) == text);
  CHECK(d.physics.delta == 0.3);
  CHECK(d.iteration.dt == 0.0125);
}

TEST_CASE("config: errors name the offending key") {
  CHECK(error_of("[grid]\nbogus = 1\n").find("grid.bogus") != std::string::npos);
  CHECK(error_of("[grid]\nnx = many\n").find("grid.nx") != std::string::npos);
  CHECK(error_of("[grid]\nnx = 4\nnx = 5\n").find("grid.nx") != std::string::npos);
  CHECK(error_of("[physics]\ndelta = -1\n").find("delta") != std::string::npos);
  CHECK(error_of("[solver]\nfd_order = 5\n").find("solver.fd_order") != std::string::npos);
  CHECK(error_of("[solver]\npropagator = fd\n").find("solver.propagator") != std::string::npos);
  CHECK(error_of("[solver]\nquadrature = simpson\n").find("solver.quadrature") != std::string::npos);
  CHECK(error_of("[physics]\nepsilon = 0.5\n").find("epsilon") != std::string::npos);
  CHECK(error_of("[iteration]\nm_exp = 3\n").find("iteration.m_exp") != std::string::npos);
  CHECK(error_of("[output]\nprecision = 40\n").find("output.precision") != std::string::npos);
  CHECK(error_of("just text\n") != "");
  CHECK(error_of("") == "");
}

TEST_CASE("snapshot: encode/decode round trip is bitwise") {
  const auto s = sample_snapshot();
  const auto bytes = io::encode_snapshot(s);
  const auto d = io::decode_snapshot(bytes);
  CHECK(d == s);
  CHECK(d.real_field("rho").values() == s.real_field("rho").values());
  CHECK(d.complex_field("Phi").values() == s.complex_field("Phi").values());
  CHECK(io::encode_snapshot(d) == bytes);
  CHECK(d.find("missing") == nullptr);
  CHECK_THROWS_AS(d.real_field("Phi"), DecodeError);
}

TEST_CASE("snapshot: header layout is little-endian with the documented fields") {
  const auto bytes = io::encode_snapshot(sample_snapshot());
  REQUIRE(bytes.size() > 64);
  CHECK(std::memcmp(bytes.data(), "HRQHD1\0\0", 8) == 0);
  auto u32 = [&](std::size_t at) {
    return std::uint32_t(bytes[at]) | std::uint32_t(bytes[at + 1]) << 8 | std::uint32_t(bytes[at + 2]) << 16 |
           std::uint32_t(bytes[at + 3]) << 24;
  };
  CHECK(u32(8) == 1);
  CHECK(u32(12) == 3);
  CHECK(u32(16) == 4);
  CHECK(u32(20) == 8);
  double time;
  std::memcpy(&time, bytes.data() + 48, 8);
  CHECK(time == 0.125);
  CHECK(u32(56) == 2);
}

TEST_CASE("snapshot: corrupt input is a decode error") {
  const auto good = io::encode_snapshot(sample_snapshot());
  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(io::decode_snapshot(bad_magic), DecodeError);
  auto bad_version = good;
  bad_version[8] = 9;
  CHECK_THROWS_AS(io::decode_snapshot(bad_version), DecodeError);
  auto truncated = good;
  truncated.resize(good.size() - 3);
  CHECK_THROWS_AS(io::decode_snapshot(truncated), DecodeError);
  auto trailing = good;
  trailing.push_back(0);
  CHECK_THROWS_AS(io::decode_snapshot(trailing), DecodeError);
  CHECK_THROWS_AS(io::decode_snapshot({}), DecodeError);
}

TEST_CASE("contraction.csv: header, empty first ratio, round-trip precision") {
  solver::ContractionLog log;
  solver::ContractionRow r1;
  r1.j = 1;
  r1.norm.total = 0.1;
  solver::ContractionRow r2 = r1;
  r2.j = 2;
  r2.norm.total = 1.0 / 3.0;
  r2.ratio = 0.1 / 3.0;
  log.rows = {r1, r2};
  const auto path = (std::filesystem::temp_directory_path() / "hrqhd_unit_contraction.csv").string();
  io::write_contraction_csv(path, log, 17);
  std::ifstream f(path);
  std::string header, l1, l2;
  std::getline(f, header);
  std::getline(f, l1);
  std::getline(f, l2);
  CHECK(header == "j,rho_W1,rho_t_L2,S_W1,S_t_L2,rho_tilde_L2,total,ratio");
  CHECK(l1.back() == ',');
  const double total = std::stod(l2.substr(l2.rfind(',', l2.rfind(',') - 1) + 1));
  CHECK(total == 1.0 / 3.0);
  std::filesystem::remove(path);
}

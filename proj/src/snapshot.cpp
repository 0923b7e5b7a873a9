#include "hrqhd/snapshot.hpp"

#include "hrqhd/error.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace hrqhd::io {

namespace {

constexpr unsigned char kMagic[8] = {'H', 'R', 'Q', 'H', 'D', '1', 0, 0};

class Writer {
public:
  explicit Writer(std::vector<unsigned char> &out) : m_out(out) {}
  template <class T> void put(T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
      std::reverse(b, b + sizeof(T));
    m_out.insert(m_out.end(), b, b + sizeof(T));
  }
  void bytes(const void *p, std::size_t n) {
    const auto *c = static_cast<const unsigned char *>(p);
    m_out.insert(m_out.end(), c, c + n);
  }

private:
  std::vector<unsigned char> &m_out;
};

class Reader {
public:
  explicit Reader(const std::vector<unsigned char> &in) : m_in(in) {}
  template <class T> T get() {
    need(sizeof(T));
    unsigned char b[sizeof(T)];
    std::memcpy(b, m_in.data() + m_pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
      std::reverse(b, b + sizeof(T));
    m_pos += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
  std::string string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char *>(m_in.data() + m_pos), n);
    m_pos += n;
    return s;
  }
  void need(std::size_t n) const {
    if (m_in.size() - m_pos < n)
      throw DecodeError("snapshot: truncated at byte " + std::to_string(m_pos));
  }
  std::size_t remaining() const { return m_in.size() - m_pos; }

private:
  const std::vector<unsigned char> &m_in;
  std::size_t m_pos = 0;
};

} // namespace

void Snapshot::add(const std::string &name, const ScalarField &u) {
  if (!(u.grid() == grid))
    throw PreconditionError("snapshot: field " + name + " is on a different grid");
  fields.push_back({name, false, u.values()});
}

void Snapshot::add(const std::string &name, const ComplexField &u) {
  if (!(u.grid() == grid))
    throw PreconditionError("snapshot: field " + name + " is on a different grid");
  SnapshotField f{name, true, {}};
  f.data.reserve(2 * u.size());
  for (const cplx &z : u.values()) {
    f.data.push_back(z.real());
    f.data.push_back(z.imag());
  }
  fields.push_back(std::move(f));
}

const SnapshotField *Snapshot::find(const std::string &name) const {
  for (const auto &f : fields)
    if (f.name == name)
      return &f;
  return nullptr;
}

ScalarField Snapshot::real_field(const std::string &name) const {
  const SnapshotField *f = find(name);
  if (!f)
    throw DecodeError("snapshot: no field named " + name);
  if (f->complex)
    throw DecodeError("snapshot: field " + name + " is complex");
  return ScalarField(grid, f->data);
}

ComplexField Snapshot::complex_field(const std::string &name) const {
  const SnapshotField *f = find(name);
  if (!f)
    throw DecodeError("snapshot: no field named " + name);
  ComplexField u(grid);
  for (std::size_t n = 0; n < u.size(); ++n)
    u[n] = f->complex ? cplx(f->data[2 * n], f->data[2 * n + 1]) : cplx(f->data[n], 0.0);
  return u;
}

bool Snapshot::operator==(const Snapshot &o) const {
  if (!(grid == o.grid) || std::memcmp(&time, &o.time, sizeof time) != 0 || fields.size() != o.fields.size())
    return false;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto &a = fields[i], &b = o.fields[i];
    if (a.name != b.name || a.complex != b.complex || a.data.size() != b.data.size() ||
        std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) != 0)
      return false;
  }
  return true;
}

std::vector<unsigned char> encode_snapshot(const Snapshot &s) {
  std::vector<unsigned char> out;
  Writer w(out);
  w.bytes(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(Snapshot::version);
  w.put<std::uint32_t>(std::uint32_t(s.grid.nx));
  w.put<std::uint32_t>(std::uint32_t(s.grid.ny));
  w.put<std::uint32_t>(std::uint32_t(s.grid.ntau));
  w.put<double>(s.grid.Lx);
  w.put<double>(s.grid.Ly);
  w.put<double>(s.grid.Ltau);
  w.put<double>(s.time);
  w.put<std::uint32_t>(std::uint32_t(s.fields.size()));
  for (const auto &f : s.fields) {
    if (f.name.size() > 0xffff)
      throw PreconditionError("snapshot: field name too long");
    const std::size_t expect = s.grid.size() * (f.complex ? 2 : 1);
    if (f.data.size() != expect)
      throw PreconditionError("snapshot: field " + f.name + " has the wrong sample count");
    w.put<std::uint16_t>(std::uint16_t(f.name.size()));
    w.bytes(f.name.data(), f.name.size());
    w.put<std::uint8_t>(f.complex ? 1 : 0);
    for (double v : f.data)
      w.put<double>(v);
  }
  return out;
}

Snapshot decode_snapshot(const std::vector<unsigned char> &bytes) {
  Reader r(bytes);
  r.need(sizeof kMagic);
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw DecodeError("snapshot: bad magic");
  r.string(sizeof kMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != Snapshot::version)
    throw DecodeError("snapshot: unsupported version " + std::to_string(version));
  const auto nx = r.get<std::uint32_t>(), ny = r.get<std::uint32_t>(), ntau = r.get<std::uint32_t>();
  const double Lx = r.get<double>(), Ly = r.get<double>(), Ltau = r.get<double>();
  Snapshot s;
  try {
    if (nx > (1u << 20) || ny > (1u << 20) || ntau > (1u << 20))
      throw DecodeError("snapshot: implausible grid size");
    s.grid = Grid3(int(nx), int(ny), int(ntau), Lx, Ly, Ltau);
  } catch (const ConfigError &e) {
    throw DecodeError(std::string("snapshot: bad grid header: ") + e.what());
  }
  s.time = r.get<double>();
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    SnapshotField f;
    f.name = r.string(r.get<std::uint16_t>());
    const auto dtype = r.get<std::uint8_t>();
    if (dtype > 1)
      throw DecodeError("snapshot: field " + f.name + " has unknown dtype " + std::to_string(dtype));
    f.complex = dtype == 1;
    const std::size_t n = s.grid.size() * (f.complex ? 2 : 1);
    if (r.remaining() / sizeof(double) < n)
      throw DecodeError("snapshot: payload of " + f.name + " is truncated");
    f.data.resize(n);
    for (double &v : f.data)
      v = r.get<double>();
    s.fields.push_back(std::move(f));
  }
  if (r.remaining() != 0)
    throw DecodeError("snapshot: " + std::to_string(r.remaining()) + " trailing bytes");
  return s;
}

void write_snapshot(const std::string &path, const Snapshot &s) {
  const auto bytes = encode_snapshot(s);
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw Error("cannot write " + path);
  f.write(reinterpret_cast<const char *>(bytes.data()), std::streamsize(bytes.size()));
  if (!f)
    throw Error("write failed: " + path);
}

Snapshot read_snapshot(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw DecodeError("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

} // namespace hrqhd::io

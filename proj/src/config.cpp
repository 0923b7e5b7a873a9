#include "hrqhd/config.hpp"

#include "hrqhd/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace hrqhd::io {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string &line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"')
      quoted = !quoted;
    else if (!quoted && (line[i] == '#' || line[i] == ';'))
      return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string &v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
    return v.substr(1, v.size() - 2);
  return v;
}

double as_double(const std::string &key, const std::string &v) {
  double r = 0;
  const char *end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, r);
  if (ec != std::errc() || p != end || !std::isfinite(r))
    throw ConfigError(key + ": expected a finite number, got '" + v + "'");
  return r;
}

int as_int(const std::string &key, const std::string &v) {
  int r = 0;
  const char *end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, r);
  if (ec != std::errc() || p != end)
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return r;
}

bool as_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1")
    return true;
  if (v == "false" || v == "no" || v == "off" || v == "0")
    return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

template <class E> E as_enum(const std::string &key, const std::string &v, std::initializer_list<std::pair<const char *, E>> opts) {
  std::string list;
  for (const auto &[name, value] : opts) {
    if (v == name)
      return value;
    list += list.empty() ? name : std::string("|") + name;
  }
  throw ConfigError(key + ": expected one of " + list + ", got '" + v + "'");
}

} // namespace

std::map<std::string, std::string> parse_key_values(const std::string &text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": missing key");
    if (!section.empty())
      key = section + "." + key;
    if (!kv.emplace(key, value).second)
      throw ConfigError(key + ": duplicate key");
  }
  return kv;
}

RunConfig parse_config(const std::string &text) {
  RunConfig c;
  using Setter = std::function<void(const std::string &, const std::string &)>;
  auto d = [](double &t) -> Setter { return [&t](const std::string &k, const std::string &v) { t = as_double(k, v); }; };
  auto i = [](int &t) -> Setter { return [&t](const std::string &k, const std::string &v) { t = as_int(k, v); }; };
  auto b = [](bool &t) -> Setter { return [&t](const std::string &k, const std::string &v) { t = as_bool(k, v); }; };
  auto s = [](std::string &t) -> Setter { return [&t](const std::string &, const std::string &v) { t = v; }; };

  solver::IterationConfig &it = c.iteration;
  const std::map<std::string, Setter> table = {
      {"grid.nx", i(c.grid.nx)},
      {"grid.ny", i(c.grid.ny)},
      {"grid.ntau", i(c.grid.ntau)},
      {"grid.Lx", d(c.grid.Lx)},
      {"grid.Ly", d(c.grid.Ly)},
      {"grid.Ltau", d(c.grid.Ltau)},
      {"physics.nbar", d(c.physics.nbar)},
      {"physics.delta", d(c.physics.delta)},
      {"physics.epsilon", d(c.physics.epsilon)},
      {"physics.upsilon", d(c.physics.upsilon)},
      {"init.kind",
       [&](const std::string &k, const std::string &v) {
         c.init.kind = as_enum<InitKind>(
             k, v, {{"constant", InitKind::Constant}, {"gaussian", InitKind::Gaussian}, {"file", InitKind::File}});
       }},
      {"init.amplitude", d(c.init.amplitude)},
      {"init.phase_amplitude", d(c.init.phase_amplitude)},
      {"init.width_xy", d(c.init.width_xy)},
      {"init.width_tau", d(c.init.width_tau)},
      {"init.path", s(c.init.path)},
      {"iteration.dt", d(it.dt)},
      {"iteration.picard_max", i(it.picard_max)},
      {"iteration.tol_low", d(it.tol_low)},
      {"iteration.C_const", d(it.C_const)},
      {"iteration.C_m", d(it.C_m)},
      {"iteration.m_exp", i(it.m_exp)},
      {"iteration.use_paper_T0", b(it.use_paper_T0)},
      {"iteration.T_final", d(it.T_final)},
      {"iteration.equivalence_tol", d(it.equivalence_tol)},
      {"iteration.source_slack", d(it.source_slack)},
      {"iteration.base",
       [&](const std::string &k, const std::string &v) {
         it.taylor_base = as_enum<bool>(k, v, {{"taylor", true}, {"constant", false}});
       }},
      {"solver.propagator",
       [&](const std::string &k, const std::string &v) {
         c.solver.propagator = as_enum<Propagator>(
             k, v, {{"spectral", Propagator::Spectral}, {"fd", Propagator::Fd}, {"both", Propagator::Both}});
       }},
      {"solver.fd_order", i(c.solver.fd_order)},
      {"solver.n_herm", i(c.solver.n_herm)},
      {"solver.cg_tol", d(c.solver.cg_tol)},
      {"solver.cache_dir", s(c.solver.cache_dir)},
      {"solver.quadrature",
       [&](const std::string &k, const std::string &v) {
         it.quadrature = as_enum<linear::Quadrature>(k, v,
                                                     {{"trapezoid", linear::Quadrature::Trapezoid},
                                                      {"simpson", linear::Quadrature::Simpson},
                                                      {"linear", linear::Quadrature::Linear}});
       }},
      {"output.dir", s(c.output.dir)},
      {"output.snapshot_every", i(c.output.snapshot_every)},
      {"output.precision", i(c.output.precision)},
  };

  for (const auto &[key, value] : parse_key_values(text)) {
    auto f = table.find(key);
    if (f == table.end())
      throw ConfigError(key + ": unknown key");
    f->second(key, value);
  }
  return c;
}

RunConfig load_config(const std::string &path) {
  std::ifstream f(path);
  if (!f)
    throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void RunConfig::validate(bool iterating) const {
  Grid3(grid.nx, grid.ny, grid.ntau, grid.Lx, grid.Ly, grid.Ltau);
  auto positive = [](double v, const char *key) {
    if (!(v > 0))
      throw ConfigError(std::string(key) + ": must be positive");
  };
  positive(physics.nbar, "physics.nbar");
  positive(physics.delta, "physics.delta");
  positive(physics.epsilon, "physics.epsilon");
  positive(physics.upsilon, "physics.upsilon");
  positive(init.width_xy, "init.width_xy");
  positive(init.width_tau, "init.width_tau");
  positive(solver.cg_tol, "solver.cg_tol");
  if (init.kind == InitKind::File && init.path.empty())
    throw ConfigError("init.path: required when init.kind = file");
  if (solver.fd_order < 2 || solver.fd_order > 8 || solver.fd_order % 2 != 0)
    throw ConfigError("solver.fd_order: must be one of 2, 4, 6, 8");
  if (solver.n_herm < 2)
    throw ConfigError("solver.n_herm: must be >= 2");
  if (output.snapshot_every < 0)
    throw ConfigError("output.snapshot_every: must be >= 0");
  if (output.precision < 1 || output.precision > 17)
    throw ConfigError("output.precision: must lie in 1..17");
  if (iterating) {
    if (physics.epsilon != 1.0)
      throw ConfigError("physics.epsilon: the Picard solver runs with epsilon = 1");
    if (physics.upsilon != 1.0)
      throw ConfigError("physics.upsilon: the Picard solver runs with upsilon = 1");
    if (solver.propagator == Propagator::Fd)
      throw ConfigError("solver.propagator: fd is a cross-check only; use spectral or both");
    solver::IterationConfig it = iteration;
    it.nbar = physics.nbar;
    it.delta = physics.delta;
    it.validate();
  }
}

const char *to_string(InitKind k) {
  switch (k) {
  case InitKind::Constant: return "constant";
  case InitKind::Gaussian: return "gaussian";
  case InitKind::File: return "file";
  }
  return "?";
}

const char *to_string(Propagator p) {
  switch (p) {
  case Propagator::Spectral: return "spectral";
  case Propagator::Fd: return "fd";
  case Propagator::Both: return "both";
  }
  return "?";
}

const char *to_string(linear::Quadrature q) {
  switch (q) {
  case linear::Quadrature::Trapezoid: return "trapezoid";
  case linear::Quadrature::Simpson: return "simpson";
  case linear::Quadrature::Linear: return "linear";
  }
  return "?";
}

std::string render_config(const RunConfig &c) {
  std::ostringstream os;
  os.precision(17);
  const auto &it = c.iteration;
  os << "[grid]\nnx = " << c.grid.nx << "\nny = " << c.grid.ny << "\nntau = " << c.grid.ntau << "\nLx = " << c.grid.Lx
     << "\nLy = " << c.grid.Ly << "\nLtau = " << c.grid.Ltau << "\n\n";
  os << "[physics]\nnbar = " << c.physics.nbar << "\ndelta = " << c.physics.delta << "\nepsilon = " << c.physics.epsilon
     << "\nupsilon = " << c.physics.upsilon << "\n\n";
  os << "[init]\nkind = " << to_string(c.init.kind) << "\namplitude = " << c.init.amplitude
     << "\nphase_amplitude = " << c.init.phase_amplitude << "\nwidth_xy = " << c.init.width_xy
     << "\nwidth_tau = " << c.init.width_tau << "\npath = \"" << c.init.path << "\"\n\n";
  os << "[iteration]\ndt = " << it.dt << "\npicard_max = " << it.picard_max << "\ntol_low = " << it.tol_low
     << "\nC_const = " << it.C_const << "\nC_m = " << it.C_m << "\nm_exp = " << it.m_exp
     << "\nuse_paper_T0 = " << (it.use_paper_T0 ? "true" : "false") << "\nT_final = " << it.T_final
     << "\nequivalence_tol = " << it.equivalence_tol << "\nsource_slack = " << it.source_slack
     << "\nbase = " << (it.taylor_base ? "taylor" : "constant") << "\n\n";
  os << "[solver]\npropagator = " << to_string(c.solver.propagator) << "\nfd_order = " << c.solver.fd_order
     << "\nn_herm = " << c.solver.n_herm << "\ncg_tol = " << c.solver.cg_tol << "\nquadrature = "
     << to_string(it.quadrature) << "\ncache_dir = \"" << c.solver.cache_dir << "\"\n\n";
  os << "[output]\ndir = \"" << c.output.dir << "\"\nsnapshot_every = " << c.output.snapshot_every
     << "\nprecision = " << c.output.precision << "\n";
  return os.str();
}

} // namespace hrqhd::io

#pragma once

#include <stdexcept>
#include <string>

namespace hrqhd {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

class DecodeError : public Error {
public:
  using Error::Error;
};

class IncompatibleSourceError : public Error {
public:
  IncompatibleSourceError(const std::string &what, double residual_mean)
      : Error(what), m_residual_mean(residual_mean) {}
  double residual_mean() const { return m_residual_mean; }

private:
  double m_residual_mean;
};

class UnstableStepError : public Error {
public:
  UnstableStepError(const std::string &what, double bound) : Error(what), m_bound(bound) {}
  double bound() const { return m_bound; }

private:
  double m_bound;
};

/// Density at or below the vacuum floor. Location is in grid coordinates.
class VacuumError : public Error {
public:
  VacuumError(const std::string &what, double t, double x, double y, double tau, double value)
      : Error(what), m_t(t), m_x(x), m_y(y), m_tau(tau), m_value(value) {}
  double t() const { return m_t; }
  double x() const { return m_x; }
  double y() const { return m_y; }
  double tau() const { return m_tau; }
  double value() const { return m_value; }

private:
  double m_t, m_x, m_y, m_tau, m_value;
};

} // namespace hrqhd

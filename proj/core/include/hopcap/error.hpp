#pragma once

#include <stdexcept>
#include <string>

namespace hopcap {

// All library failures derive from Error so callers can map them onto exit
// codes without caring which module raised them.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid call arguments (counts, budgets).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration: parameters that make an experiment ill-posed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Degenerate geometry (coincident or antipodal points).
class GeometryError : public Error {
 public:
  using Error::Error;
};

class RoutingError : public Error {
 public:
  RoutingError(const std::string& what, long cell = -1)
      : Error(what), cell_(cell) {}
  // Offending cell id, or -1 when the failure is not tied to one cell.
  long cell() const noexcept { return cell_; }

 private:
  long cell_;
};

// A cell queue exceeded its configured capacity.
class QueueOverflowError : public Error {
 public:
  using Error::Error;
};

// A run-time invariant of the simulator was violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace hopcap

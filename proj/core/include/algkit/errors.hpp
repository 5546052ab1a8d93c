#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace algkit {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation outside an expression's domain (ln of non-positive argument,
// division by zero).
struct DomainError : Error {
  using Error::Error;
};

// A point or coordinate index shorter than an expression requires.
struct DimensionError : Error {
  using Error::Error;
};

// Section / form / matrix shapes inconsistent with the owning object.
struct ShapeError : Error {
  using Error::Error;
};

struct RankMismatch : ShapeError {
  using ShapeError::ShapeError;
};

struct DegreeError : ShapeError {
  using ShapeError::ShapeError;
};

struct LevelError : ShapeError {
  using ShapeError::ShapeError;
};

struct ParseError : Error {
  using Error::Error;
};

// Prolonged element fails the fiber constraint rho(b) = T nu(v).
struct ConstraintViolation : Error {
  using Error::Error;
};

struct NotProjectable : Error {
  using Error::Error;
};

struct NotFibered : Error {
  using Error::Error;
};

struct NotAdmissible : Error {
  using Error::Error;
};

struct IncompatibleFamily : Error {
  using Error::Error;
};

// Trajectory left the Hamiltonian's domain; carries the last valid sample.
struct DomainExit : Error {
  DomainExit(std::string msg, double t, std::vector<double> state)
      : Error(std::move(msg)), last_time(t), last_state(std::move(state)) {}
  double last_time;
  std::vector<double> last_state;
};

struct NonFinite : Error {
  using Error::Error;
};

}  // namespace algkit

#pragma once

#include <stdexcept>
#include <string>

namespace asq {

/// Invalid arguments, incompatible lattices, violated preconditions.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Raised by the time steppers. `step()` is the index of the step that failed.
class SolverError : public Error {
public:
  enum class Kind { cfl, blowup };

  SolverError(Kind kind, int step, const std::string& message)
      : Error(message), kind_(kind), step_(step) {}
  Kind kind() const noexcept { return kind_; }
  int step() const noexcept { return step_; }

private:
  Kind kind_;
  int step_;
};

} // namespace asq

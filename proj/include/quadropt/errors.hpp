#pragma once

#include <stdexcept>
#include <string>

namespace quadropt {

// Input outside the physical or structural domain of a model quantity.
class ParameterError : public std::invalid_argument {
public:
  explicit ParameterError(const std::string &what) : std::invalid_argument(what) {}
};

// A truncated basis dropped more weight than the requested tolerance.
class TruncationError : public std::runtime_error {
public:
  TruncationError(const std::string &what, double deficit, int required_n_fock = 0)
      : std::runtime_error(what), deficit_(deficit), required_n_fock_(required_n_fock) {}

  double deficit() const { return deficit_; }
  // Basis size estimated to bring the deficit under threshold (0 if unknown).
  int required_n_fock() const { return required_n_fock_; }

private:
  double deficit_;
  int required_n_fock_;
};

// A numerical procedure (quadrature, time stepping) missed its tolerance.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string &what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

private:
  double achieved_;
};

// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string &what) : std::runtime_error(what) {}
};

} // namespace quadropt

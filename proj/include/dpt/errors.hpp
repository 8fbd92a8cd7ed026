#pragma once

#include <stdexcept>
#include <string>

namespace dpt {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
  using Error::Error;
};

// Bad configuration file or command-line value.
class ConfigError : public InvalidParameter {
public:
  using InvalidParameter::InvalidParameter;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class SizeError : public Error {
public:
  using Error::Error;
};

class BasisMismatch : public Error {
public:
  using Error::Error;
};

// Input lies on a set where the requested quantity is zero or divergent.
class DegenerateInput : public Error {
public:
  using Error::Error;
};

// No (stable) fixed point exists for the requested parameters.
class NoFixedPoint : public Error {
public:
  using Error::Error;
};

// Gaussian fluctuations diverge (critical point or unstable sector).
class CriticalDivergence : public Error {
public:
  using Error::Error;
};

// |<J>| vanishes, so the Wineland parameter is undefined.
class UndefinedSqueezing : public Error {
public:
  using Error::Error;
};

class ConsistencyError : public Error {
public:
  using Error::Error;
};

// Adaptive step size underflow.
class StiffnessError : public Error {
public:
  StiffnessError(const std::string& what, double t_reached)
      : Error(what), t_reached_(t_reached) {}
  double time_reached() const noexcept { return t_reached_; }

private:
  double t_reached_;
};

// Steady-state search hit its time cap.
class NonConvergence : public Error {
public:
  NonConvergence(const std::string& what, double t_reached, double residual)
      : Error(what), t_reached_(t_reached), residual_(residual) {}
  double time_reached() const noexcept { return t_reached_; }
  double residual() const noexcept { return residual_; }

private:
  double t_reached_;
  double residual_;
};

}  // namespace dpt

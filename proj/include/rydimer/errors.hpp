#pragma once

#include <stdexcept>
#include <string>

namespace rydimer {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
  public:
    using Error::Error;
};

/// Raised when a blockade window collapses (r_min >= r_max).
class InfeasibleWindowError : public GeometryError {
  public:
    InfeasibleWindowError(double r_min, double r_max)
        : GeometryError("infeasible blockade window: r_min=" + std::to_string(r_min) +
                        " >= r_max=" + std::to_string(r_max)),
          r_min_(r_min), r_max_(r_max) {}

    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }

  private:
    double r_min_;
    double r_max_;
};

class ConstraintError : public Error {
  public:
    using Error::Error;
};

class CapacityError : public Error {
  public:
    CapacityError(std::size_t cap, const std::string& what)
        : Error("dimension cap " + std::to_string(cap) + " exceeded: " + what), cap_(cap) {}
    std::size_t cap() const { return cap_; }

  private:
    std::size_t cap_;
};

class NotInBasisError : public Error {
  public:
    using Error::Error;
};

class CacheInvalidError : public Error {
  public:
    using Error::Error;
};

class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Iterative solver failed to converge; carries the last residual.
class NumericalError : public Error {
  public:
    NumericalError(const std::string& what, double residual = 0.0)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

  private:
    double residual_;
};

/// Quantity below resolvable precision (e.g. a gap lost in round-off).
class PrecisionError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace rydimer

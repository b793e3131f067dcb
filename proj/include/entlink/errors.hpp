#pragma once

#include <stdexcept>
#include <string>

namespace entlink {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A scenario field holds a value outside its admissible range.
class RangeError : public Error {
 public:
  RangeError(std::string field, const std::string& detail)
      : Error("out of range: " + field + " (" + detail + ")"),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// A required scenario field is absent and has no default.
class MissingFieldError : public Error {
 public:
  explicit MissingFieldError(std::string field)
      : Error("missing required field: " + field), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// The delivered fidelity is already below threshold; no storage budget exists.
class InfeasibleLinkError : public Error {
 public:
  InfeasibleLinkError(double f0_prime, double f_th)
      : Error("infeasible link: initial fidelity " + std::to_string(f0_prime) +
              " below threshold " + std::to_string(f_th)),
        f0_prime_(f0_prime),
        f_th_(f_th) {}
  double f0_prime() const { return f0_prime_; }
  double f_th() const { return f_th_; }

 private:
  double f0_prime_;
  double f_th_;
};

// The requested maximum-distance solve has no positive real solution.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& reason)
      : Error("infeasible: " + reason) {}
};

// The residual does not change sign over the bisection bracket.
class NoRootInBracketError : public Error {
 public:
  NoRootInBracketError(double lo, double hi)
      : Error("no sign change in bracket [" + std::to_string(lo) + ", " +
              std::to_string(hi) + "]") {}
};

// Iterative solver exhausted its budget without meeting tolerance.
class NotConvergedError : public Error {
 public:
  NotConvergedError(long iterations, double residual)
      : Error("not converged after " + std::to_string(iterations) +
              " iterations, residual " + std::to_string(residual)),
        iterations_(iterations),
        residual_(residual) {}
  long iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  long iterations_;
  double residual_;
};

class DimensionMismatchError : public Error {
 public:
  DimensionMismatchError(std::size_t a, std::size_t b)
      : Error("dimension mismatch: " + std::to_string(a) +
              " != " + std::to_string(b)) {}
};

class UnknownDistanceError : public Error {
 public:
  explicit UnknownDistanceError(double d)
      : Error("distance " + std::to_string(d) +
              " m is not in the scenario distance set") {}
};

class EmptySpaceError : public Error {
 public:
  EmptySpaceError() : Error("state space has no distances") {}
};

// p' = 0: link generation can never succeed, so waits are unbounded.
class DegenerateGenerationError : public Error {
 public:
  DegenerateGenerationError() : Error("generation probability p' is zero") {}
};

class NotAchievableError : public Error {
 public:
  explicit NotAchievableError(const std::string& detail)
      : Error("not achievable: " + detail) {}
};

class MissingFixtureError : public Error {
 public:
  explicit MissingFixtureError(const std::string& name)
      : Error("missing fixture: " + name) {}
};

}  // namespace entlink

#pragma once

#include <stdexcept>
#include <string>

namespace kslab {

// Operand shapes do not match the operation (e.g. X is not d x d).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter lies outside the domain where the construction is defined,
// e.g. a >= d for the reduction family or k > d for Schmidt-rank searches.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A structural hypothesis on an input map failed (unitality, trace
// preservation, hermiticity preservation, unitarity of a sandwich factor).
class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A matrix expected to be Hermitian is not, beyond tolerance.
class NonHermitianError : public std::domain_error {
 public:
  NonHermitianError(const std::string& what, double residual)
      : std::domain_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// An internal inequality of a constructive recipe failed.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed serialized input. The message names the offending field path.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace kslab

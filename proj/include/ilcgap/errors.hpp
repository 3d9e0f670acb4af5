#pragma once

#include <stdexcept>
#include <string>

namespace ilcgap {

/// Shapes, definiteness or declared parameters do not satisfy a precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization that must succeed for valid inputs did not.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The ILC cost-to-go lost convexity (B R^-1 B̂ᵀ has an eigenvalue with
/// negative real part) or a correction subproblem Hessian is not PD.
class NonconvexSubproblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The ILC normal matrix R + B̂ᵀ P B is singular.
class SynthesisFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration or rollout produced a non-finite value.
class NumericBlowup : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ilcgap

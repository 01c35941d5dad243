#pragma once

#include <stdexcept>
#include <string>

namespace feynhyper {

/// Base of every evaluation failure raised by the library.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Gamma-function argument sits on (or within tolerance of) a pole.
class PoleError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

/// The requested point lies outside every implemented route.
class DomainError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

/// A series hit its term cap before the stopping rule fired.
class NonConvergence : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

/// Quadrature refinement cap reached without level-to-level agreement.
class QuadFailure : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

class UnknownIdentity : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Root bracketing failed while pinning an argument.
class NoBracket : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

}  // namespace feynhyper

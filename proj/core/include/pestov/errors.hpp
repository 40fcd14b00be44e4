#pragma once

#include <stdexcept>
#include <string>

namespace pestov {

/// Chart point outside the domain of its model, or a flow left the domain.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a stated precondition (degenerate plane, non-tangent
/// vector, unsupported chain length, ...).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation not defined for this model (e.g. Liouville sampling on a
/// non-closed model).
class UnsupportedModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite value produced during sampling/integration.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pestov

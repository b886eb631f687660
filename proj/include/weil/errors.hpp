#pragma once

#include <stdexcept>
#include <string>

namespace weil {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Special-function and numeric layer.
class DomainError : public Error { using Error::Error; };
class PoleError : public Error { using Error::Error; };
class NonConvergence : public Error { using Error::Error; };

// Weil matrix assembly.
class StructureError : public Error { using Error::Error; };

// Spectral layer.
class EvenSimpleViolation : public Error { using Error::Error; };
class DegenerateNormalization : public Error { using Error::Error; };

// Perturbed operator.
class RootCountMismatch : public Error { using Error::Error; };
class IdentityViolation : public Error { using Error::Error; };

// Xi oracle.
class OscillationBudgetExceeded : public Error { using Error::Error; };
class MissedZeroSuspected : public Error { using Error::Error; };

// Files and cache.
class FormatError : public Error { using Error::Error; };
class CacheMismatch : public Error { using Error::Error; };

}  // namespace weil

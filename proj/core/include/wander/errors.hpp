#pragma once

#include <stdexcept>
#include <string>

namespace wander {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Skeleton / synthesis
struct OutOfConfiguredRange : Error { using Error::Error; };
struct IncompletePlan : Error { using Error::Error; };
struct HorizonExceeded : Error { using Error::Error; };
struct InconsistentPlan : Error { using Error::Error; };

// p-adic arithmetic
struct ContextMismatch : Error { using Error::Error; };
struct DivisionByIndistinguishableZero : Error { using Error::Error; };
struct IndistinguishableFromZero : Error { using Error::Error; };
struct HenselConditionFailed : Error { using Error::Error; };
struct PrecisionExhausted : Error { using Error::Error; };
struct UnsupportedExtension : Error { using Error::Error; };
struct ValueGroupMismatch : Error { using Error::Error; };

// Family
struct TailBoundUnavailable : Error { using Error::Error; };
struct UndecidableAtPrecision : Error { using Error::Error; };
struct DegreeCapExceeded : Error { using Error::Error; };

}  // namespace wander

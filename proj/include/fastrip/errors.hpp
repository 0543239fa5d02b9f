#pragma once

#include <stdexcept>
#include <string>

namespace fastrip {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LengthMismatch : Error { using Error::Error; };
struct NotPowerOfTwo : Error { using Error::Error; };
struct FieldMismatch : Error { using Error::Error; };
struct SizeGuard : Error { using Error::Error; };
struct BadSupport : Error { using Error::Error; };
struct KappaTooLarge : Error { using Error::Error; };
struct RegimeViolation : Error { using Error::Error; };
struct BaseNotScaledOrthonormal : Error { using Error::Error; };
struct TooManySupports : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct NotUnitNorm : Error { using Error::Error; };
struct SingularSubproblem : Error { using Error::Error; };
struct ConfigParse : Error { using Error::Error; };

}  // namespace fastrip

#pragma once

#include <stdexcept>
#include <string>

namespace weakctl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivisionAtZero : Error { using Error::Error; };
struct UnstableSystem : Error { using Error::Error; };
struct ImproperSystem : Error { using Error::Error; };

struct NonMinimumPhaseModel : Error { using Error::Error; };
struct ImproperQ : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct ZeroBudget : Error { using Error::Error; };
struct InvalidWeights : Error { using Error::Error; };

struct InfeasibleBox : Error { using Error::Error; };

struct NonZeroReference : Error { using Error::Error; };
struct ConfigMismatch : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace weakctl

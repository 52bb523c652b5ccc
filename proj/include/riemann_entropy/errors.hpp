#pragma once

#include <stdexcept>
#include <string>

namespace riemann_entropy {

// Base class of every failure this library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RIEMANN_ENTROPY_ERROR_TYPE(Name)          \
  class Name : public Error {                     \
   public:                                        \
    using Error::Error;                           \
  };

// problem definition
RIEMANN_ENTROPY_ERROR_TYPE(NonIncreasingBreakpoints)
RIEMANN_ENTROPY_ERROR_TYPE(NegativeDiffusion)
RIEMANN_ENTROPY_ERROR_TYPE(LengthMismatch)
RIEMANN_ENTROPY_ERROR_TYPE(OutOfRange)
RIEMANN_ENTROPY_ERROR_TYPE(ParseError)

// special functions
RIEMANN_ENTROPY_ERROR_TYPE(ProbabilityOutOfRange)
RIEMANN_ENTROPY_ERROR_TYPE(EmptyGap)

// entropy and cone geometry
RIEMANN_ENTROPY_ERROR_TYPE(DimensionMismatch)
RIEMANN_ENTROPY_ERROR_TYPE(DegenerateGap)
RIEMANN_ENTROPY_ERROR_TYPE(NonMonotoneSamples)
RIEMANN_ENTROPY_ERROR_TYPE(NegativeLevel)

// optimization
RIEMANN_ENTROPY_ERROR_TYPE(NonPositiveWeight)
RIEMANN_ENTROPY_ERROR_TYPE(InfeasiblePoint)

// verification
RIEMANN_ENTROPY_ERROR_TYPE(WrongConfiguration)
RIEMANN_ENTROPY_ERROR_TYPE(BadWindow)

// finite-difference oracle
RIEMANN_ENTROPY_ERROR_TYPE(UnstableParameters)
RIEMANN_ENTROPY_ERROR_TYPE(GridMismatch)

#undef RIEMANN_ENTROPY_ERROR_TYPE

}  // namespace riemann_entropy

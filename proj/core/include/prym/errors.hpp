#pragma once

#include <stdexcept>
#include <string>

namespace prym {

// Every failure raised by the library derives from Error so callers can catch
// the whole family at a tool boundary.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define PRYM_DECLARE_ERROR(Name)                                                                   \
  class Name : public Error {                                                                      \
  public:                                                                                          \
    explicit Name(const std::string& what) : Error(std::string(#Name ": ") + what) {}              \
  }

// qfield
PRYM_DECLARE_ERROR(InvalidField);
PRYM_DECLARE_ERROR(FieldMismatch);
PRYM_DECLARE_ERROR(DivisionByZero);

// surface
PRYM_DECLARE_ERROR(InvalidPolygon);
PRYM_DECLARE_ERROR(NonInvolutiveGluing);
PRYM_DECLARE_ERROR(HolonomyMismatch);
PRYM_DECLARE_ERROR(BadConeAngle);
PRYM_DECLARE_ERROR(DisconnectedSurface);
PRYM_DECLARE_ERROR(SingularMatrix);
PRYM_DECLARE_ERROR(MalformedMap);

// flow
PRYM_DECLARE_ERROR(StartsOnVertexAmbiguous);
PRYM_DECLARE_ERROR(InvalidDirection);

// models
PRYM_DECLARE_ERROR(WrongStratum);
PRYM_DECLARE_ERROR(InvolutionFailure);
PRYM_DECLARE_ERROR(SegmentOverflow);
PRYM_DECLARE_ERROR(ParseError);
PRYM_DECLARE_ERROR(UnknownModel);
PRYM_DECLARE_ERROR(NonTable1Parameters);
PRYM_DECLARE_ERROR(NotPeriodic);
PRYM_DECLARE_ERROR(NotTransverse);
PRYM_DECLARE_ERROR(InvalidDiagram);

// veech
PRYM_DECLARE_ERROR(NonPositiveModulus);

#undef PRYM_DECLARE_ERROR

} // namespace prym

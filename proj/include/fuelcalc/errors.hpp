#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fuelcalc {

// Error taxonomy shared by the library and the CLI. code() is the stable
// machine-readable identifier the CLI prints as "code=<...>". kind()
// separates bad-input failures (exit 1) from internal failures (exit 2).
class Error : public std::runtime_error {
public:
  enum class Kind { input, internal };

  Error(std::string code, const std::string& message, Kind kind = Kind::input)
      : std::runtime_error(code + ": " + message),
        code_(std::move(code)),
        kind_(kind) {}

  const std::string& code() const noexcept { return code_; }
  Kind kind() const noexcept { return kind_; }

private:
  std::string code_;
  Kind kind_;
};

#define FUELCALC_ERROR(NAME, KIND)                              \
  struct NAME : Error {                                         \
    explicit NAME(const std::string& message)                   \
        : Error(#NAME, message, Error::Kind::KIND) {}           \
  };

FUELCALC_ERROR(InvalidArgument, input)
FUELCALC_ERROR(MalformedRecord, input)
FUELCALC_ERROR(EmptyTrack, input)
FUELCALC_ERROR(TooSparse, input)
FUELCALC_ERROR(EmptySlice, input)
FUELCALC_ERROR(SpanExceedsTM, input)
FUELCALC_ERROR(UnknownAircraftType, input)
FUELCALC_ERROR(ShapeMismatch, input)
FUELCALC_ERROR(TargetOutOfRange, input)
FUELCALC_ERROR(Diverged, internal)
FUELCALC_ERROR(VersionMismatch, input)
FUELCALC_ERROR(CorruptModel, input)
FUELCALC_ERROR(NonMonotonicConstruction, internal)
FUELCALC_ERROR(OutOfDomain, input)
FUELCALC_ERROR(NonMonotoneModelOutput, internal)
FUELCALC_ERROR(ZeroTruth, input)
FUELCALC_ERROR(ZeroReference, input)
FUELCALC_ERROR(DegenerateFit, input)
FUELCALC_ERROR(SpanMismatch, input)
FUELCALC_ERROR(SpecMismatch, input)

#undef FUELCALC_ERROR

}  // namespace fuelcalc

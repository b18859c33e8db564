#pragma once

#include <stdexcept>
#include <string>

namespace morsekit {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input fails a structural invariant (not SPD, bad pattern, ...).
struct InvalidInput : Error {
  explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

// A segment lacks the eigenvalue gaps needed for a flag to exist.
struct DegenerateSegment : Error {
  explicit DegenerateSegment(const std::string& msg) : Error(msg) {}
};

// Iterative solver ran out of its iteration budget.
struct NoConvergence : Error {
  explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

// No calibration entry for the requested datum.
struct CalibrationMissing : Error {
  explicit CalibrationMissing(const std::string& msg) : Error(msg) {}
};

// A promoted certificate failed re-verification.  Always surfaced, never
// swallowed: it means the calibration table is wrong for this datum.
struct CalibrationContradiction : Error {
  explicit CalibrationContradiction(const std::string& msg) : Error(msg) {}
};

// Combinatorial enumeration would exceed the configured budget.
struct ResourceExhausted : Error {
  explicit ResourceExhausted(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace morsekit

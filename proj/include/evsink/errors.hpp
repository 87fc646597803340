#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evsink {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// -------- event window validation --------

struct OutOfBoundsError : Error {
  std::size_t index;
  OutOfBoundsError(std::size_t i, const std::string& what) : Error(what), index(i) {}
};

struct UnsortedError : Error {
  std::size_t index;
  UnsortedError(std::size_t i, const std::string& what) : Error(what), index(i) {}
};

struct TooFewEventsError : Error {
  std::size_t count;
  TooFewEventsError(std::size_t n, const std::string& what) : Error(what), count(n) {}
};

// -------- geometry --------

struct BehindCameraError : Error {
  using Error::Error;
};

struct DegenerateSpanError : Error {
  using Error::Error;
};

// -------- motion compensation --------

struct NonPlanarTwistError : Error {
  using Error::Error;
};

// -------- clustering / fitting --------

struct EmptyInputError : Error {
  using Error::Error;
};

struct TooFewPointsError : Error {
  using Error::Error;
};

struct DegenerateAnnulusError : Error {
  using Error::Error;
};

// -------- inspection --------

struct InvalidAngleError : Error {
  using Error::Error;
};

struct InvertedRadiiError : Error {
  using Error::Error;
};

struct InsufficientTrialsError : Error {
  using Error::Error;
};

// -------- simulation --------

struct SubsamplingTooCoarseError : Error {
  using Error::Error;
};

// -------- file I/O --------

struct BadMagicError : Error {
  using Error::Error;
};

struct TruncatedFileError : Error {
  using Error::Error;
};

struct CountMismatchError : Error {
  using Error::Error;
};

struct BadPolarityError : Error {
  std::size_t offset;  // byte offset of the offending record
  BadPolarityError(std::size_t off, const std::string& what) : Error(what), offset(off) {}
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace evsink

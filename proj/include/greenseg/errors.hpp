#pragma once

#include <stdexcept>
#include <string>

namespace greenseg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file; message carries the path and 1-based line number.
struct ParseError : Error {
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what) {}
};

struct EmptyCloudError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

/// Invalid configuration value or unknown configuration key.
struct ConfigError : Error {
  using Error::Error;
};

/// Plane fit input has covariance rank < 2 (collinear or coincident points).
struct DegenerateInput : Error {
  using Error::Error;
};

/// Region-growing seed selection on an empty candidate set; callers treat
/// this as the frame-level fail-safe (no ground emitted).
struct EmptyCandidates : Error {
  using Error::Error;
};

/// Prediction and ground truth share no evaluable keys.
struct DisjointDomains : Error {
  using Error::Error;
};

}  // namespace greenseg

#pragma once

#include <stdexcept>
#include <string>

namespace dascof {

// Typed failures so callers can distinguish recoverable conditions
// (rank-deficient system matrix -> scheduling fallback / outage) from misuse.

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotInConstellation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateBasis : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptySphere : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularChannel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidBackhaul : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InstanceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dascof

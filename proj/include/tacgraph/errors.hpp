#pragma once

#include <stdexcept>
#include <string>

namespace tacgraph {

// Base class for all library errors; the CLI catches this at its boundary.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mesh loading
struct ParseError : Error {
  using Error::Error;
};
struct NonWatertight : Error {
  using Error::Error;
};
struct DegenerateFace : Error {
  using Error::Error;
};

// Lie algebra
struct LogNearPi : Error {
  using Error::Error;
};

// Factor graph / solver
struct MissingVariable : Error {
  using Error::Error;
};
struct SingularSystem : Error {
  using Error::Error;
};

// Simulation
struct NoConvergence : Error {
  using Error::Error;
};
struct InitialPenetration : Error {
  using Error::Error;
};
struct EmptyPatch : Error {
  using Error::Error;
};

// Inference
struct AllParticlesFailed : Error {
  using Error::Error;
};

// CLI / config files; message carries the path to the offending field.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace tacgraph

#pragma once

#include <stdexcept>
#include <string>

namespace polwire {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration or parameters that violate a type invariant.
struct ConfigError : Error {
  using Error::Error;
};

// A drawn spacing or excitation energy came out non-positive. Signals
// pathological sampling parameters; the draw is never silently repeated.
struct SamplingError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  using Error::Error;
};

// Fewer than 3 sites fall inside the +-3 sigma_x support of the packet.
struct DegenerateWavepacketError : Error {
  using Error::Error;
};

struct NoMatterContentError : Error {
  using Error::Error;
};

struct GridMismatchError : Error {
  using Error::Error;
};

struct InsufficientSamplesError : Error {
  using Error::Error;
};

// No spectral peak above the detection threshold: oscillations damped out.
struct NoOscillationError : Error {
  using Error::Error;
};

struct IncompatibleVersionError : Error {
  using Error::Error;
};

struct CorruptPayloadError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace polwire

#pragma once

#include <stdexcept>
#include <string>

namespace ol2r {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input files, label/dimension violations.
struct DataError : Error {
  using Error::Error;
};

// Invalid or unknown configuration keys/values.
struct ConfigError : Error {
  using Error::Error;
};

// Non-finite loss during gradient descent; carries the offending epoch.
struct TrainError : Error {
  TrainError(const std::string& msg, int epoch_)
      : Error(msg), epoch(epoch_) {}
  int epoch = -1;
};

// Covariance matrix lost positive definiteness (lambda too small).
struct CovarianceError : Error {
  using Error::Error;
};

// Checkpoint refusal: corrupt file, version or config mismatch.
struct CheckpointError : Error {
  using Error::Error;
};

// Refused operation, e.g. full covariance beyond the parameter gate.
struct GateError : Error {
  using Error::Error;
};

}  // namespace ol2r

#pragma once

#include <stdexcept>
#include <string>

namespace hmmvae {

// invalid or inconsistent experiment configuration
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// filesystem trouble while reading inputs or writing outputs
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// training produced a non-finite loss and was halted
struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hmmvae

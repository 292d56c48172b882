#pragma once

#include <stdexcept>

namespace fcorr {

// Error taxonomy mirrors the CLI exit-code contract:
// invalid_input -> 1 (usage), io_error -> 2 (input), numerical_error -> 3.
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fcorr

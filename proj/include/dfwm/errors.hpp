#pragma once

#include <stdexcept>
#include <string>

namespace dfwm {

// Error taxonomy mirrors the CLI exit codes:
//   config_error -> 2, numeric_error -> 3, design_error -> 4.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : error {
    using error::error;
};

struct numeric_error : error {
    using error::error;
};

struct design_error : error {
    using error::error;
};

}  // namespace dfwm

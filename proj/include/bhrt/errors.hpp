#pragma once

#include <stdexcept>
#include <string>

namespace bhrt {

// Error categories map one-to-one onto CLI exit codes:
//   UsageError -> 1, IoError -> 2, NumericalError -> 3, ProtocolError -> 4.

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace bhrt

#pragma once

#include <stdexcept>
#include <string>

namespace readlab {

// Error taxonomy mapped to CLI exit codes: UsageError -> 1, DataError -> 2,
// GatewayError -> 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GatewayError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace readlab

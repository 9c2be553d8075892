#pragma once

#include <stdexcept>
#include <string>

namespace cdxsem {

// Bad flags, missing required options, unusable configuration. Exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable files, malformed data files, broken invariants in inputs. Exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cdxsem

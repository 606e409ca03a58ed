// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace pedflow {

/// Bad configuration (malformed config file, invalid parameter values).
/// The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad input data (malformed graph/log/corpus files, schema mismatches).
/// The CLI maps this to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pedflow

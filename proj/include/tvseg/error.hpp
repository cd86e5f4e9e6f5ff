#pragma once

#include <stdexcept>
#include <string>

namespace tvseg {

/// Malformed input or parameters. The CLI maps this to exit code 2.
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A solver refused the instance because it exceeds an enumeration cap.
/// The CLI maps this to exit code 3.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tvseg

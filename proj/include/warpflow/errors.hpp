#pragma once

#include <stdexcept>
#include <string>

namespace warpflow {

// Bad user input: node counts, signs of tau/rho, cfl, config keys. CLI exit 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Array shapes, parity violations, corrupt files.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite values or a division that the profile's parity should have
// prevented. Carries the offending node when there is one.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, int node = -1)
        : std::runtime_error(node >= 0 ? what + " (node " + std::to_string(node) + ")" : what),
          node_(node) {}
    int node() const { return node_; }

private:
    int node_;
};

}  // namespace warpflow

#pragma once

#include <stdexcept>
#include <string>

namespace avcbf {

// Bad user input: malformed config, out-of-range parameter, unknown key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite values, singular systems, violated physical assumptions.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, long step = -1)
        : std::runtime_error(what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace avcbf

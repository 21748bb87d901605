#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace waferbench {

// Base for every error this library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DatasetError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class CheckpointError : public Error {
public:
    using Error::Error;
};

// Raised when training produces a non-finite loss or gradient.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t epoch, const std::string& what)
        : Error("diverged in epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

// Raised by sgd_step when a gradient entry is NaN or infinite.
class NonFiniteGradient : public Error {
public:
    using Error::Error;
};

}  // namespace waferbench

#pragma once

#include <stdexcept>
#include <string>

namespace mage {

/// Invalid or inconsistent run/environment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller violated an operation precondition (stepping a terminal state,
/// mismatched shapes, ...). Always a programming error, never user input.
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

/// NaN/Inf reached the training pipeline (CLI exit code 3).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Remote policy endpoint unreachable or persistently failing (CLI exit code 4).
class TransportError : public std::runtime_error {
public:
    explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Sokoban generator ran out of attempts for the requested parameters.
class GenerationError : public std::runtime_error {
public:
    explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

#define MAGE_REQUIRE(cond, msg)                  \
    do {                                         \
        if (!(cond)) throw ::mage::ContractError(msg); \
    } while (0)

}  // namespace mage

// Error types shared across modules; the CLI maps them to exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace ria {

// Invalid configuration or malformed input file. CLI exit code 1.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// A construction or enumeration would exceed its cap. CLI exit code 2.
struct CapError : std::runtime_error {
    explicit CapError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ria

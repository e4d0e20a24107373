#pragma once

#include <stdexcept>
#include <string>

namespace treelog {

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t off)
        : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

// Raised when an operation guarded by a size cap is asked to exceed it
// (oracles never approximate; they refuse instead).
struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace treelog

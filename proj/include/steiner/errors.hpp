#pragma once

#include <stdexcept>
#include <string>

namespace steiner {

// Demand cannot be met (terminal pair split across components, etc.).
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Instance exceeds the documented size cap of an exponential routine.
struct TooLargeError : std::runtime_error {
    explicit TooLargeError(const std::string& what) : std::runtime_error(what) {}
};

// Graph failed series-parallel (treewidth <= 2) recognition.
struct NotTw2Error : std::runtime_error {
    explicit NotTw2Error(const std::string& what) : std::runtime_error(what) {}
};

// Graph still fails recognition after the seeded-wedge rewrite.
struct NotTw2AfterTransformError : NotTw2Error {
    explicit NotTw2AfterTransformError(const std::string& what) : NotTw2Error(what) {}
};

// Structure handed to a solver is not the decomposition it claims to be.
struct NotALemonError : std::runtime_error {
    explicit NotALemonError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file or descriptor string.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Disconnected pattern that no classification rule covers.
struct OutOfDichotomyError : std::runtime_error {
    explicit OutOfDichotomyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace steiner

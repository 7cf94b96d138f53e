#ifndef SAGL_ERRORS_HPP
#define SAGL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sagl {

// Family-spec text could not be parsed or failed validation.
struct ParseError : std::runtime_error {
    std::size_t line;    // 1-based
    std::size_t column;  // 1-based, 0 when the error is not positional
    ParseError(std::string msg, std::size_t ln = 0, std::size_t col = 0)
        : std::runtime_error(std::move(msg)), line(ln), column(col) {}
};

// Instance rejected by the general-position gate (some pair has f(x,y) = 0).
struct GateError : std::runtime_error {
    int vertex_a;
    int vertex_b;
    GateError(std::string msg, int a, int b)
        : std::runtime_error(std::move(msg)), vertex_a(a), vertex_b(b) {}
};

// Partition provider ran out of retries on some node.
struct ProviderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent serialized labels.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sagl

#endif

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace topotext {

// Malformed input data (bad header, unparseable number, wrong field count).
// line is 1-based; 0 means "no line information".
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Structurally well-formed input that violates a documented invariant
// (asymmetric matrix, negative distance, out-of-range parameter, ...).
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace topotext

#pragma once

#include <stdexcept>
#include <string>

namespace dmatch {

struct ConstraintViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotProper : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnstableModel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GainInconsistency : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QueryOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario file syntax or schema problem; carries the offending line.
struct ParseError : std::runtime_error {
    int line;
    ParseError(const std::string& msg, int line_no)
        : std::runtime_error(msg), line(line_no) {}
};

} // namespace dmatch

#pragma once

#include <stdexcept>
#include <string>

namespace rankcurve {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// Thrown by lu_solve when a pivot falls below the relative threshold;
// callers in the tracer treat it as a tube-exit signal, not a crash.
struct SingularMatrix : Error {
    using Error::Error;
};

struct NotSymmetric : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    using Error::Error;
};

struct DivergedToInfinity : Error {
    using Error::Error;
};

struct InvalidStart : Error {
    using Error::Error;
};

struct DirectionAmbiguousError : Error {
    using Error::Error;
};

struct ParseError : Error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& msg, int line_, int col_)
        : Error("parse error at line " + std::to_string(line_) + ", column " +
                std::to_string(col_) + ": " + msg),
          line(line_), column(col_) {}
};

} // namespace rankcurve

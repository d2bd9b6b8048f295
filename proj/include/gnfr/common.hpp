#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <stdexcept>
#include <string>

namespace gnfr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Shortest round-trippable decimal form; keeps emitted CSVs byte-stable
/// across runs.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Objects of different kinds (or incompatible grids/dimensions) were combined.
struct IncompatibleObjectsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An object violates its validity invariants.
struct InvalidObjectError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A sample is degenerate for the requested operation (e.g. all points coincide).
struct DegenerateSampleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical routine that cannot occur for valid inputs failed anyway.
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative solver did not converge; carries iteration diagnostics.
struct ConvergenceError : std::runtime_error {
    int iterations;
    double residual;
    ConvergenceError(const std::string& what, int iters, double resid)
        : std::runtime_error(what + " (iterations=" + std::to_string(iters) +
                             ", residual=" + std::to_string(resid) + ")"),
          iterations(iters),
          residual(resid) {}
};

/// Malformed input file; carries the 1-based line number.
struct ParseError : std::runtime_error {
    long line;
    ParseError(const std::string& what, long line_no)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

}  // namespace gnfr

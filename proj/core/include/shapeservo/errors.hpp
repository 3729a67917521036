#pragma once

#include <stdexcept>
#include <string>

namespace shapeservo {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Grasp target outside the rod's reachable disk.
struct UnreachableError : Error {
    using Error::Error;
};

// Equilibrium solve hit the iteration cap with residual above tolerance.
struct NoConvergenceError : Error {
    using Error::Error;
};

// Rod (inflated by its draw width) does not fit in the requested image.
struct OutOfFrameError : Error {
    using Error::Error;
};

// Malformed input file (PGM, dataset, model, config).
struct ParseError : Error {
    using Error::Error;
};

// Mask contains no set pixels.
struct EmptyMaskError : Error {
    using Error::Error;
};

// Greedy chain sort hit a gap larger than 3x the median spacing.
struct DegenerateChainError : Error {
    using Error::Error;
};

// Vector/matrix sizes inconsistent with the model or estimate.
struct DimensionMismatchError : Error {
    using Error::Error;
};

// Normalization record has a zero-width range on some axis.
struct ZeroRangeError : Error {
    using Error::Error;
};

// Training loss became non-finite.
struct DivergedError : Error {
    using Error::Error;
};

// Probe increments nearly collinear; secant system ill conditioned.
struct CollinearProbesError : Error {
    using Error::Error;
};

// Controller configuration violates the validity conditions (a > 0, b - c > 0, ...).
struct ConfigInvalidError : Error {
    using Error::Error;
};

// Command solve produced a non-finite result.
struct SolveFailureError : Error {
    using Error::Error;
};

// Closed-loop error grew past 10x its initial value.
struct DivergenceDetectedError : Error {
    using Error::Error;
};

// Bad experiment spec or config file.
struct ConfigError : Error {
    using Error::Error;
};

// Failed file-system operation.
struct IoError : Error {
    using Error::Error;
};

}  // namespace shapeservo

#pragma once

#include <stdexcept>
#include <string>

namespace defectscan {

/// 2x2 defect system determinant |GU - FV| fell below the guard; the
/// (s, j, k) combination is pathological and should be skipped (the
/// objective maps this to +inf rather than aborting an inversion).
class NearSingularDeterminant : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Direct linear solve hit a zero pivot.
class SingularMatrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Time integration produced samples beyond the blow-up guard, usually a
/// step-size violation or an unstable configuration.
class UnstableStep : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Laplace truncation tail bound exceeds the requested tolerance; the
/// time trace is too short for this s.
class TailTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Config file / experiment spec problem, carrying the offending key path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Measurement file could not be parsed or violates its invariants.
class FileFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace defectscan

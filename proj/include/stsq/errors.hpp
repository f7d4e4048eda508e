#pragma once

#include <stdexcept>
#include <string>

namespace stsq {

// Base class for all library errors so callers can catch the whole family.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numeric input is out of domain (non-finite, negative where positivity is
// required, malformed ranges, ...).
struct InvalidInput final : Error {
    explicit InvalidInput(const std::string& msg) : Error("invalid input: " + msg) {}
};

// The requested squeezing-factor denominator vanishes (mean vector parallel to
// the probe axis, or zero mean), so the factor is undefined on that axis.
struct DegenerateAxis final : Error {
    explicit DegenerateAxis(const std::string& msg) : Error("degenerate axis: " + msg) {}
};

// A phase-locked decomposition was requested exactly on a zero crossing of its
// denominator, where the ratio diverges.
struct SingularBoundary final : Error {
    explicit SingularBoundary(const std::string& msg) : Error("singular boundary: " + msg) {}
};

// A Fock-space construction cannot represent the requested state within the
// allowed truncation (dimension too small for the target leakage).
struct TruncationError final : Error {
    explicit TruncationError(const std::string& msg) : Error("truncation error: " + msg) {}
};

// An iterative refinement (dimension doubling, tail certification) hit its
// resource cap before reaching the requested drift tolerance.
struct NonConverged final : Error {
    explicit NonConverged(const std::string& msg) : Error("not converged: " + msg) {}
};

// The operation is outside the supported closed-form range (e.g. moment order
// above the implemented degree).
struct Unsupported final : Error {
    explicit Unsupported(const std::string& msg) : Error("unsupported: " + msg) {}
};

// An optimizer found no admissible evaluation point (every candidate hit a
// degenerate denominator or invalid region).
struct NoValidPoint final : Error {
    explicit NoValidPoint(const std::string& msg) : Error("no valid point: " + msg) {}
};

}  // namespace stsq

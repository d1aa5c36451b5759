#pragma once

#include <stdexcept>
#include <string>

namespace bsq {

// Error taxonomy.  Hard errors are exceptions; the CLI maps them to exit
// codes (config 2, blowup 3, property failure 4, io 5).

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A diffeomorphism left the admissible regime: det(I + grad d) <= 0 somewhere.
struct DegenerateDiffeo : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed-point inversion failed to reach tolerance within the iteration cap.
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trajectory guard tripped: ||grad d||_inf >= 0.9 or det(I + grad d) <= 0.
struct BlowupDetected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CFL guard: max|v| * dt exceeded half a grid cell.
struct CflViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested bump radius falls below two grid cells.
struct UnresolvableBump : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Normalization of an (numerically) identically-zero field was requested.
struct ZeroField : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Probe direction produced no measurable derivative at the probe point.
struct DegenerateDirection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A structural identity that must hold by construction was violated
// (e.g. a divergence-free projection failing to be divergence-free).
struct SymmetryViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bsq

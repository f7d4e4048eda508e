#pragma once

#include <optional>
#include <string>

#include "stsq/fock.hpp"

namespace stsq {

// Everything a subcommand run needs, filled from parsed flags.
struct RunConfig {
    std::string subcommand;
    double intensity_x = 0.0;
    double intensity_y = 0.0;
    double phase_x = kPi / 4.0;
    double phase_y = kPi / 4.0;
    double kt = 0.0;
    double kt_max = 1.0;
    int steps = 401;
    std::string axis = "s2";  // s1 | s2 | s3 | free
    std::string format;       // csv | json | text (per-command default)
    std::string out_path;     // empty = stdout
    bool oracle = false;
    bool deterministic = true;
    int which_figure = 1;
    int resolution = 64;
    double ix_max = 10.0;
    double iy_max = 10.0;
    int phi_x_points = 64;
    int phi_y_points = 64;
    int kt_points = 128;
    double sweep_kt_max = 1.5;
    int refine_iters = 60;
    int lattice_points = 256;
    double tolerance = 1e-8;
    TruncationPolicy policy;
};

// Parses argv, dispatches, writes output, and maps exceptions to exit codes:
// 0 success, 1 verification/truncation failure, 2 invalid input, 3 degenerate
// criterion (no admissible axis/point).
int run_cli(int argc, const char* const* argv);

}  // namespace stsq

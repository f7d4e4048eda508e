#pragma once

// Numerical exploration layer: grid-then-refine minimization of squeezing
// factors over phases and interaction time, axis scans over a deterministic
// sphere lattice, and region maps over the intensity plane. All routines are
// deterministic given their grid parameters.

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stsq/types.hpp"

namespace stsq {

struct SweepGrid {
    int phi_x_points = 64;
    int phi_y_points = 64;
    int kt_points = 128;
    double kt_max = 1.5;
    int refine_iters = 60;
};

SweepGrid validate_grid(SweepGrid g);

struct MinimumPoint {
    double phi_x = 0.0;
    double phi_y = 0.0;
    double kt = 0.0;
    Axis axis = Axis::e2();
    double factor = 0.0;
};

struct MinimaReport {
    std::vector<MinimumPoint> minima;  // refined local minima, lexicographic order
    MinimumPoint global;
};

// Scans squeezing_factor_axis over (phi_x, phi_y, kt), refines each detected
// local minimum by coordinate descent, and reports them with the global best.
// Ties are broken toward the smallest (phi_x, phi_y, kt) lexicographically.
MinimaReport minimize_phase_time(double intensity_x, double intensity_y, const Axis& axis,
                                 const SweepGrid& grid);

// Deterministic Fibonacci sphere lattice of unit axes.
std::vector<Axis> fibonacci_sphere(int n);

struct AxisScanRow {
    double kt = 0.0;
    Axis best_axis = Axis::e2();
    double best_factor = 0.0;
    int best_coord = 2;  // 1..3
    double best_coord_factor = 0.0;
};

// For each kt: the lattice axis (plus the three coordinate axes) minimizing
// the squeezing factor, and the best coordinate axis separately.
std::vector<AxisScanRow> scan_axes(const InputBeam& beam, const std::vector<double>& kts,
                                   int lattice_points = 256);

struct RegionMap {
    std::vector<double> ix_centers;
    std::vector<double> iy_centers;
    Eigen::MatrixXd values;  // values(iy index, ix index)
};

// Minimum squeezing factor over kt for phase-locked beams on an inclusive
// intensity grid. Values are obtained by numerical minimization (grid + local
// refinement) of the kernel-derived factor; entries whose numerical minimum
// stays above 1 are reported as the asymptotic infimum 1.
RegionMap region_map(std::pair<double, double> alpha_sq_range,
                     std::pair<double, double> beta_sq_range, int resolution);

struct Min1D {
    double arg = 0.0;
    double value = 0.0;
};

// Dense-grid + golden-section + derivative-sign-bisection minimizer for a
// scalar function on [lo, hi]; evaluation failures count as +infinity.
Min1D minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                      int grid_points, int refine_iters);

// Numerical reference minimization of the S2 squeezing factor over kt for a
// phase-locked beam (objective built from the full moment kernel).
Min1D minimize_phase_locked_kt(double intensity_x, double intensity_y, double kt_max,
                               int grid_points = 256, int refine_iters = 80);

}  // namespace stsq

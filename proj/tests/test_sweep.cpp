#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "stsq/analytic.hpp"
#include "stsq/errors.hpp"
#include "stsq/fock.hpp"
#include "stsq/sweep.hpp"
#include "stsq/types.hpp"

namespace {

using stsq::kPi;

void requireCloseAbsOrRel(double actual, double expected, double tol) {
    const double scale = std::max({1.0, std::fabs(actual), std::fabs(expected)});
    REQUIRE(std::fabs(actual - expected) <= tol * scale);
}

double circle_dist(double a, double b) {
    double d = std::fabs(a - b);
    while (d > 2.0 * kPi) d -= 2.0 * kPi;
    return std::min(d, 2.0 * kPi - d);
}

}  // namespace

TEST_CASE("scalar minimization nails a smooth interior minimum") {
    const double target = 0.321751234;
    const stsq::Min1D r = stsq::minimize_scalar(
        [&](double x) { return (x - target) * (x - target) + 0.25; }, 0.0, 1.0, 64, 60);
    requireCloseAbsOrRel(r.arg, target, 1e-10);
    requireCloseAbsOrRel(r.value, 0.25, 1e-12);
}

TEST_CASE("scalar minimization handles boundary minima and hostile objectives") {
    // Monotone increasing: the minimum sits on the lower endpoint.
    const stsq::Min1D lo = stsq::minimize_scalar([](double x) { return x; }, 0.0, 2.0, 32, 40);
    requireCloseAbsOrRel(lo.arg, 0.0, 1e-9);
    requireCloseAbsOrRel(lo.value, 0.0, 1e-9);
    // Monotone decreasing: the minimum sits on the upper endpoint.
    const stsq::Min1D hi = stsq::minimize_scalar([](double x) { return -x; }, 0.0, 2.0, 32, 40);
    requireCloseAbsOrRel(hi.arg, 2.0, 1e-9);
    // An objective that always throws leaves no valid point.
    REQUIRE_THROWS_AS(stsq::minimize_scalar(
                          [](double) -> double { throw stsq::InvalidInput("nope"); }, 0.0, 1.0,
                          32, 10),
                      stsq::NoValidPoint);
}

TEST_CASE("kt minimization of the exact factor reproduces the closed-form minimum") {
    for (auto [ix, iy] : std::vector<std::pair<double, double>>{{0.0, 9.0}, {10.0, 10.0}}) {
        const stsq::InputBeam beam =
            stsq::InputBeam::from_intensities(ix, iy, kPi / 4.0, kPi / 4.0);
        const stsq::MinimumResult closed = stsq::s2_min(beam);
        REQUIRE(closed.squeezed);
        const stsq::Min1D numeric = stsq::minimize_phase_locked_kt(ix, iy, 1.5);
        requireCloseAbsOrRel(numeric.arg, *closed.kt_min, 1e-8);
        requireCloseAbsOrRel(numeric.value, closed.s2_min, 1e-10);
    }
}

TEST_CASE("the full phase-and-time sweep finds four minima beside the locked stationary points") {
    stsq::SweepGrid grid;
    const stsq::MinimaReport rep = stsq::minimize_phase_time(10.0, 10.0, stsq::Axis::e2(), grid);
    REQUIRE(rep.minima.size() == 4);
    const stsq::MinimumResult closed = stsq::s2_min(
        stsq::InputBeam::from_intensities(10.0, 10.0, kPi / 4.0, kPi / 4.0));
    const double cell_phi = 2.0 * kPi / grid.phi_x_points;
    for (const stsq::MinimumPoint& p : rep.minima) {
        const bool x_near = circle_dist(p.phi_x, kPi / 4.0) < 2.0 * cell_phi ||
                            circle_dist(p.phi_x, 5.0 * kPi / 4.0) < 2.0 * cell_phi;
        const bool y_near = circle_dist(p.phi_y, kPi / 4.0) < 2.0 * cell_phi ||
                            circle_dist(p.phi_y, 5.0 * kPi / 4.0) < 2.0 * cell_phi;
        REQUIRE(x_near);
        REQUIRE(y_near);
        // Freeing the phases improves on the locked-family optimum: the true
        // minima sit at roughly (pi/4 + 0.057, pi/4 - 0.010) mod pi, where
        // the transverse mean grows faster than the variance.  The improved
        // value is certified against the brute-force oracle below.
        REQUIRE(p.factor < closed.s2_min - 5e-4);
        requireCloseAbsOrRel(p.factor, 0.557356132818, 1e-9);
        requireCloseAbsOrRel(p.kt, *closed.kt_min, 2e-3);
    }
    requireCloseAbsOrRel(rep.global.factor, 0.557356132818, 1e-9);
    const stsq::InputBeam at(std::polar(std::sqrt(10.0), rep.global.phi_x),
                             std::polar(std::sqrt(10.0), rep.global.phi_y));
    const stsq::OracleResult oracle = stsq::oracle_stokes_moments(at, rep.global.kt);
    REQUIRE(oracle.convergence.passed);
    requireCloseAbsOrRel(stsq::squeezing_factor_axis(oracle.moments, stsq::Axis::e2()).factor,
                         rep.global.factor, 1e-8);
}

TEST_CASE("unlocked phases squeeze a beam whose locked family never does") {
    // Within the locked family, intensities (10, 2) lie outside the
    // squeezing parabola: the locked factor stays above 1 for all times.
    const stsq::MinimumResult locked = stsq::s2_min(
        stsq::InputBeam::from_intensities(10.0, 2.0, kPi / 4.0, kPi / 4.0));
    REQUIRE_FALSE(locked.squeezed);
    REQUIRE(locked.s2_min == 1.0);

    // The free sweep escapes the locked family: minima near
    // |phi_x - phi_y| ~ 0.4 reach a factor of ~0.9196 at kt ~ 0.47.  The
    // valley floor is flat, so the refined global varies in the fourth digit
    // with the seeding grid; pin it loosely and certify the reported point
    // against the brute-force oracle.
    stsq::SweepGrid grid;
    grid.phi_x_points = 32;
    grid.phi_y_points = 32;
    grid.kt_points = 64;
    const stsq::MinimaReport rep = stsq::minimize_phase_time(10.0, 2.0, stsq::Axis::e2(), grid);
    REQUIRE(rep.global.factor < 1.0 - 0.07);
    requireCloseAbsOrRel(rep.global.factor, 0.9196, 1e-3);
    REQUIRE(rep.global.kt > 0.40);
    REQUIRE(rep.global.kt < 0.55);
    const stsq::InputBeam at(std::polar(std::sqrt(10.0), rep.global.phi_x),
                             std::polar(std::sqrt(2.0), rep.global.phi_y));
    const stsq::OracleResult oracle = stsq::oracle_stokes_moments(at, rep.global.kt);
    REQUIRE(oracle.convergence.passed);
    requireCloseAbsOrRel(stsq::squeezing_factor_axis(oracle.moments, stsq::Axis::e2()).factor,
                         rep.global.factor, 1e-8);
}

TEST_CASE("sweep results are deterministic and stable across grid resolutions") {
    stsq::SweepGrid grid;
    grid.phi_x_points = 48;
    grid.phi_y_points = 48;
    grid.kt_points = 96;
    const stsq::MinimaReport a = stsq::minimize_phase_time(0.0, 9.0, stsq::Axis::e2(), grid);
    const stsq::MinimaReport b = stsq::minimize_phase_time(0.0, 9.0, stsq::Axis::e2(), grid);
    REQUIRE(a.minima.size() == b.minima.size());
    REQUIRE(a.global.factor == b.global.factor);  // bitwise: same grid, same path
    REQUIRE(a.global.kt == b.global.kt);

    stsq::SweepGrid finer;
    const stsq::MinimaReport c = stsq::minimize_phase_time(0.0, 9.0, stsq::Axis::e2(), finer);
    requireCloseAbsOrRel(a.global.factor, c.global.factor, 1e-5);
    // A dark x mode leaves only the y phase meaningful; the optimum factor is
    // the closed-form partition optimum.
    requireCloseAbsOrRel(c.global.factor, 1.0 / std::sqrt(10.0), 1e-4);
}

TEST_CASE("grid validation rejects unusable sweep settings") {
    stsq::SweepGrid g;
    g.phi_x_points = 4;
    REQUIRE_THROWS_AS(stsq::minimize_phase_time(1.0, 1.0, stsq::Axis::e2(), g),
                      stsq::InvalidInput);
    g = stsq::SweepGrid{};
    g.kt_max = 0.0;
    REQUIRE_THROWS_AS(stsq::minimize_phase_time(1.0, 1.0, stsq::Axis::e2(), g),
                      stsq::InvalidInput);
    g = stsq::SweepGrid{};
    g.refine_iters = -1;
    REQUIRE_THROWS_AS(stsq::minimize_phase_time(1.0, 1.0, stsq::Axis::e2(), g),
                      stsq::InvalidInput);
    REQUIRE_THROWS_AS(stsq::minimize_phase_time(-1.0, 1.0, stsq::Axis::e2(), stsq::SweepGrid{}),
                      stsq::InvalidInput);
}

TEST_CASE("fibonacci lattice points are unit vectors and deterministic") {
    const std::vector<stsq::Axis> pts = stsq::fibonacci_sphere(128);
    REQUIRE(pts.size() == 128);
    for (const stsq::Axis& ax : pts) requireCloseAbsOrRel(ax.n().norm(), 1.0, 1e-12);
    const std::vector<stsq::Axis> again = stsq::fibonacci_sphere(128);
    for (size_t i = 0; i < pts.size(); ++i) {
        REQUIRE(pts[i].n() == again[i].n());
    }
    // Spread: no two consecutive points collapse onto each other.
    for (size_t i = 1; i < pts.size(); ++i) {
        REQUIRE((pts[i].n() - pts[i - 1].n()).norm() > 1e-3);
    }
}

TEST_CASE("axis scans rank the second coordinate best at the phase-locked optimum") {
    const stsq::InputBeam beam =
        stsq::InputBeam::from_intensities(0.0, 9.0, kPi / 4.0, kPi / 4.0);
    const stsq::MinimumResult m = stsq::s2_min(beam);
    const std::vector<stsq::AxisScanRow> rows =
        stsq::scan_axes(beam, {0.0, *m.kt_min}, 512);
    REQUIRE(rows.size() == 2);

    // Unevolved coherent light is squeezed along no direction.
    REQUIRE(rows[0].best_factor >= 1.0 - 1e-9);

    // At the optimum the best coordinate axis is the second one and a free
    // axis can only match or improve on it.
    const stsq::AxisScanRow& opt = rows[1];
    requireCloseAbsOrRel(opt.best_coord_factor, m.s2_min, 1e-9);
    REQUIRE(opt.best_coord == 2);
    REQUIRE(opt.best_factor <= opt.best_coord_factor + 1e-12);
    REQUIRE(opt.best_factor < 1.0);

    REQUIRE_THROWS_AS(stsq::scan_axes(beam, {0.1}, 8), stsq::InvalidInput);
}

TEST_CASE("the region map classifies squeezability by the parabola in intensity space") {
    const stsq::RegionMap map = stsq::region_map({0.0, 10.0}, {0.0, 10.0}, 64);
    REQUIRE(map.ix_centers.size() == 64);
    REQUIRE(map.iy_centers.size() == 64);
    REQUIRE(map.ix_centers.front() == 0.0);
    requireCloseAbsOrRel(map.ix_centers.back(), 10.0, 1e-12);
    const double step = map.ix_centers[1] - map.ix_centers[0];
    // One grid step moves iy^2 - 4 ix by at most ~2*10*step + 4*step.
    const double band = (2.0 * 10.0 + 4.0) * step;
    int squeezed_cells = 0, flat_cells = 0;
    for (int bi = 0; bi < 64; ++bi) {
        for (int ai = 0; ai < 64; ++ai) {
            const double ix = map.ix_centers[ai];
            const double iy = map.iy_centers[bi];
            const double margin = iy * iy - 4.0 * ix;
            const double value = map.values(bi, ai);
            REQUIRE(value <= 1.0 + 1e-12);
            if (margin > band) {
                REQUIRE(value < 1.0 - 1e-9);
                ++squeezed_cells;
            } else if (margin < -band) {
                REQUIRE(value >= 1.0 - 1e-9);
                ++flat_cells;
            }
        }
    }
    // Both regions are well represented on this range (the flat region
    // covers ~42% of the square minus the parabola band).
    REQUIRE(squeezed_cells > 500);
    REQUIRE(flat_cells > 1200);
    REQUIRE_THROWS_AS(stsq::region_map({5.0, 1.0}, {0.0, 10.0}, 64), stsq::InvalidInput);
    REQUIRE_THROWS_AS(stsq::region_map({0.0, 10.0}, {0.0, 10.0}, 8), stsq::InvalidInput);
}

TEST_CASE("region map cells containing reference beams carry their closed-form minima") {
    // Steps of 0.5 place (0,9) and (10,2) exactly on cell centers.
    const stsq::RegionMap map = stsq::region_map({0.0, 10.0}, {0.0, 10.0}, 21);
    requireCloseAbsOrRel(map.ix_centers[1] - map.ix_centers[0], 0.5, 1e-14);
    requireCloseAbsOrRel(map.values(18, 0), 1.0 / std::sqrt(10.0), 1e-8);
    requireCloseAbsOrRel(map.values(4, 20), 1.0, 1e-12);
}

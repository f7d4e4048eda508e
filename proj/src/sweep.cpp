#include "stsq/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stsq/analytic.hpp"
#include "stsq/errors.hpp"

namespace stsq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double guarded(const std::function<double(double)>& f, double x) {
    try {
        const double v = f(x);
        return std::isfinite(v) ? v : kInf;
    } catch (const Error&) {
        return kInf;
    }
}

// Wrap-around distance on the phase circle.
double circle_dist(double a, double b) {
    double d = std::fabs(canonical_phase(a) - canonical_phase(b));
    return std::min(d, 2.0 * kPi - d);
}

}  // namespace

SweepGrid validate_grid(SweepGrid g) {
    if (g.phi_x_points < 8 || g.phi_y_points < 8 || g.kt_points < 8)
        throw InvalidInput("grid counts must be >= 8");
    if (!(g.kt_max > 0.0) || !std::isfinite(g.kt_max)) throw InvalidInput("kt_max must be > 0");
    if (g.refine_iters < 0) throw InvalidInput("refine_iters must be >= 0");
    return g;
}

Min1D minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                      int grid_points, int refine_iters) {
    if (!(hi > lo) || grid_points < 3) throw InvalidInput("minimizer needs hi > lo, >= 3 points");
    int best = -1;
    double bestv = kInf;
    std::vector<double> xs(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        xs[i] = lo + (hi - lo) * double(i) / double(grid_points - 1);
        const double v = guarded(f, xs[i]);
        if (v < bestv) {
            bestv = v;
            best = i;
        }
    }
    if (best < 0) throw NoValidPoint("objective failed at every grid point");

    // Golden-section contraction of the bracketing interval.
    double a = xs[std::max(best - 1, 0)];
    double b = xs[std::min(best + 1, grid_points - 1)];
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = guarded(f, x1), f2 = guarded(f, x2);
    for (int it = 0; it < refine_iters && (b - a) > 1e-13 * std::max(1.0, std::fabs(b)); ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = guarded(f, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = guarded(f, x2);
        }
    }
    double xg = f1 <= f2 ? x1 : x2;
    double vg = std::min(f1, f2);
    if (bestv < vg) {
        xg = xs[best];
        vg = bestv;
    }

    // Function-value comparisons flatten out at sqrt(eps); a sign-bisection on
    // the central-difference derivative recovers the argmin to ~1e-11.
    const double scale = std::max(1.0, std::fabs(xg));
    const double delta = 1e-7 * scale;
    auto deriv = [&](double t) { return guarded(f, t + delta) - guarded(f, t - delta); };
    double pa = std::max(lo + delta, xg - 1e-5 * scale);
    double pb = std::min(hi - delta, xg + 1e-5 * scale);
    if (pa < pb) {
        double ga = deriv(pa), gb = deriv(pb);
        if (std::isfinite(ga) && std::isfinite(gb) && ga < 0.0 && gb > 0.0) {
            for (int it = 0; it < 60 && (pb - pa) > 1e-13 * scale; ++it) {
                const double mid = 0.5 * (pa + pb);
                const double gm = deriv(mid);
                if (!std::isfinite(gm)) break;
                if (gm < 0.0)
                    pa = mid;
                else
                    pb = mid;
            }
            const double xp = 0.5 * (pa + pb);
            const double vp = guarded(f, xp);
            if (std::isfinite(vp)) return Min1D{xp, std::min(vp, vg)};
        }
    }
    return Min1D{xg, vg};
}

Min1D minimize_phase_locked_kt(double intensity_x, double intensity_y, double kt_max,
                               int grid_points, int refine_iters) {
    const InputBeam beam =
        InputBeam::from_intensities(intensity_x, intensity_y, kPi / 4.0, kPi / 4.0);
    const Axis axis = Axis::e2();
    auto objective = [&](double kt) {
        return squeezing_factor_axis(stokes_moments(beam, kt), axis).factor;
    };
    return minimize_scalar(objective, 0.0, kt_max, grid_points, refine_iters);
}

MinimaReport minimize_phase_time(double intensity_x, double intensity_y, const Axis& axis,
                                 const SweepGrid& grid_in) {
    if (!std::isfinite(intensity_x) || !std::isfinite(intensity_y) || intensity_x < 0.0 ||
        intensity_y < 0.0)
        throw InvalidInput("intensities must be finite and >= 0");
    const SweepGrid grid = validate_grid(grid_in);
    // A dark mode carries no phase: with zero amplitude the factor cannot
    // depend on it.  Collapse that grid dimension to a single sample and pin
    // the reported phase to 0 by convention.
    const bool dark_x = intensity_x == 0.0;
    const bool dark_y = intensity_y == 0.0;
    const int npx = dark_x ? 1 : grid.phi_x_points;
    const int npy = dark_y ? 1 : grid.phi_y_points;
    const int nkt = grid.kt_points;
    const double ax_amp = std::sqrt(intensity_x), ay_amp = std::sqrt(intensity_y);

    Eigen::MatrixXd value = Eigen::MatrixXd::Constant(npx, npy, kInf);
    Eigen::MatrixXd arg_kt = Eigen::MatrixXd::Zero(npx, npy);
    std::vector<double> phx(npx), phy(npy);
    for (int i = 0; i < npx; ++i) phx[i] = 2.0 * kPi * double(i) / double(npx);
    for (int j = 0; j < npy; ++j) phy[j] = 2.0 * kPi * double(j) / double(npy);

    for (int t = 0; t < nkt; ++t) {
        const double kt = grid.kt_max * double(t) / double(nkt - 1);
        const StokesEvaluator ev(kt);
        for (int i = 0; i < npx; ++i) {
            const cd alpha = std::polar(ax_amp, phx[i]);
            for (int j = 0; j < npy; ++j) {
                const cd beta = std::polar(ay_amp, phy[j]);
                double v = kInf;
                try {
                    v = squeezing_factor_axis(ev.moments(alpha, beta), axis).factor;
                } catch (const Error&) {
                }
                if (v < value(i, j)) {
                    value(i, j) = v;
                    arg_kt(i, j) = kt;
                }
            }
        }
    }
    if (!(value.minCoeff() < kInf)) throw NoValidPoint("squeezing factor undefined everywhere");

    auto objective = [&](double px, double py, double kt) {
        try {
            const InputBeam beam(std::polar(ax_amp, px), std::polar(ay_amp, py));
            return squeezing_factor_axis(stokes_moments(beam, kt), axis).factor;
        } catch (const Error&) {
            return kInf;
        }
    };

    // Strict local minima on the phase torus, with a noise margin so that flat
    // plateaus do not spawn spurious candidates.
    std::vector<std::pair<int, int>> candidates;
    for (int i = 0; i < npx; ++i) {
        for (int j = 0; j < npy; ++j) {
            const double v = value(i, j);
            if (!std::isfinite(v)) continue;
            const double margin = 1e-9 * std::max(1.0, std::fabs(v));
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di)
                for (int dj = -1; dj <= 1 && is_min; ++dj) {
                    const int ni = (i + di + npx) % npx;
                    const int nj = (j + dj + npy) % npy;
                    // A collapsed (dark) dimension wraps onto itself; never
                    // compare a cell against itself.
                    if (ni == i && nj == j) continue;
                    if (!(v + margin < value(ni, nj))) is_min = false;
                }
            if (is_min) candidates.emplace_back(i, j);
        }
    }

    const double cell_x = 2.0 * kPi / npx;
    const double cell_y = 2.0 * kPi / npy;
    const double cell_kt = grid.kt_max / double(nkt - 1);

    std::vector<MinimumPoint> refined;
    for (const auto& [ci, cj] : candidates) {
        double px = phx[ci], py = phy[cj], kt = arg_kt(ci, cj);
        double wx = cell_x, wy = cell_y, wkt = cell_kt;
        // Coordinate descent converges only linearly when the basin's valley
        // is not axis-aligned, so iterate to value stagnation instead of a
        // fixed shallow round count.  Shrinking windows keep each line search
        // inside the candidate's own basin; the floor leaves late rounds room
        // to slide along a diagonal valley.
        double best = value(ci, cj);
        for (int round = 0; round < 10; ++round) {
            if (!dark_x)
                px = minimize_scalar([&](double v) { return objective(v, py, kt); }, px - wx,
                                     px + wx, 9, grid.refine_iters)
                         .arg;
            if (!dark_y)
                py = minimize_scalar([&](double v) { return objective(px, v, kt); }, py - wy,
                                     py + wy, 9, grid.refine_iters)
                         .arg;
            const Min1D rkt = minimize_scalar([&](double v) { return objective(px, py, v); },
                                              std::max(0.0, kt - wkt), std::min(grid.kt_max, kt + wkt),
                                              9, grid.refine_iters);
            kt = rkt.arg;
            wx = std::max(wx * 0.5, 1e-3);
            wy = std::max(wy * 0.5, 1e-3);
            wkt = std::max(wkt * 0.5, 1e-4);
            if (best - rkt.value < 1e-13 * std::max(1.0, std::fabs(rkt.value))) {
                best = std::min(best, rkt.value);
                break;
            }
            best = rkt.value;
        }
        MinimumPoint p;
        p.phi_x = canonical_phase(px);
        p.phi_y = canonical_phase(py);
        p.kt = kt;
        p.axis = axis;
        p.factor = objective(px, py, kt);
        if (std::isfinite(p.factor)) refined.push_back(p);
    }

    // Merge refined points that converged to the same basin.
    std::vector<MinimumPoint> minima;
    for (const MinimumPoint& p : refined) {
        bool merged = false;
        for (MinimumPoint& q : minima) {
            if (circle_dist(p.phi_x, q.phi_x) < 1.5 * cell_x &&
                circle_dist(p.phi_y, q.phi_y) < 1.5 * cell_y &&
                std::fabs(p.kt - q.kt) < 4.0 * cell_kt) {
                if (p.factor < q.factor) q = p;
                merged = true;
                break;
            }
        }
        if (!merged) minima.push_back(p);
    }
    if (minima.empty()) throw NoValidPoint("no refinable minimum found");

    auto lex_less = [](const MinimumPoint& a, const MinimumPoint& b) {
        if (a.phi_x != b.phi_x) return a.phi_x < b.phi_x;
        if (a.phi_y != b.phi_y) return a.phi_y < b.phi_y;
        return a.kt < b.kt;
    };
    std::sort(minima.begin(), minima.end(), lex_less);

    MinimaReport report;
    report.minima = minima;
    report.global = minima.front();
    for (const MinimumPoint& p : minima) {
        if (p.factor < report.global.factor - 1e-12)
            report.global = p;
        else if (std::fabs(p.factor - report.global.factor) <= 1e-12 &&
                 lex_less(p, report.global))
            report.global = p;
    }
    return report;
}

std::vector<Axis> fibonacci_sphere(int n) {
    if (n < 1) throw InvalidInput("lattice needs at least one point");
    std::vector<Axis> axes;
    axes.reserve(n);
    const double ga = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / double(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        axes.push_back(Axis::unit(Eigen::Vector3d(r * std::cos(ga * k), r * std::sin(ga * k), z)));
    }
    return axes;
}

std::vector<AxisScanRow> scan_axes(const InputBeam& beam, const std::vector<double>& kts,
                                   int lattice_points) {
    if (lattice_points < 256) throw InvalidInput("axis lattice must have >= 256 points");
    std::vector<Axis> axes;
    for (int j = 1; j <= 3; ++j) axes.push_back(Axis::coordinate(j));
    for (const Axis& a : fibonacci_sphere(lattice_points)) axes.push_back(a);

    std::vector<AxisScanRow> rows;
    rows.reserve(kts.size());
    for (double kt : kts) {
        const StokesMoments m = stokes_moments(beam, kt);
        AxisScanRow row;
        row.kt = kt;
        bool any = false;
        bool any_coord = false;
        for (size_t idx = 0; idx < axes.size(); ++idx) {
            double v;
            try {
                v = squeezing_factor_axis(m, axes[idx]).factor;
            } catch (const Error&) {
                continue;
            }
            if (!any || v < row.best_factor) {
                row.best_factor = v;
                row.best_axis = axes[idx];
                any = true;
            }
            // The first admissible coordinate axis seeds the tracker; a mean
            // vector along a coordinate axis makes that axis inadmissible, so
            // seeding cannot assume axis 1 survives.
            if (idx < 3) {
                if (!any_coord || v < row.best_coord_factor) {
                    row.best_coord_factor = v;
                    row.best_coord = static_cast<int>(idx) + 1;
                    any_coord = true;
                }
            }
        }
        if (!any) throw NoValidPoint("no admissible axis at this interaction time");
        rows.push_back(row);
    }
    return rows;
}

RegionMap region_map(std::pair<double, double> alpha_sq_range,
                     std::pair<double, double> beta_sq_range, int resolution) {
    auto check_range = [](std::pair<double, double> r) {
        if (!std::isfinite(r.first) || !std::isfinite(r.second) || r.first < 0.0 ||
            !(r.second > r.first))
            throw InvalidInput("intensity range must satisfy 0 <= lo < hi");
    };
    check_range(alpha_sq_range);
    check_range(beta_sq_range);
    if (resolution < 16) throw InvalidInput("region map resolution must be >= 16");

    RegionMap map;
    map.ix_centers.resize(resolution);
    map.iy_centers.resize(resolution);
    for (int i = 0; i < resolution; ++i) {
        const double f = double(i) / double(resolution - 1);
        map.ix_centers[i] = alpha_sq_range.first + f * (alpha_sq_range.second - alpha_sq_range.first);
        map.iy_centers[i] = beta_sq_range.first + f * (beta_sq_range.second - beta_sq_range.first);
    }
    map.values.resize(resolution, resolution);

    for (int bi = 0; bi < resolution; ++bi) {
        for (int ai = 0; ai < resolution; ++ai) {
            const InputBeam beam = InputBeam::from_intensities(map.ix_centers[ai],
                                                               map.iy_centers[bi], kPi / 4.0,
                                                               kPi / 4.0);
            auto objective = [&](double kt) { return phase_locked_s2(beam, kt).second; };
            const Min1D r = minimize_scalar(objective, 0.0, 2.0, 256, 60);
            // Values that never drop below 1 report the asymptotic infimum 1.
            map.values(bi, ai) = std::min(r.value, 1.0);
        }
    }
    return map;
}

}  // namespace stsq

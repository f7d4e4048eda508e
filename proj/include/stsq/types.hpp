#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "stsq/errors.hpp"

namespace stsq {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Wrap an angle into [0, 2*pi).
inline double canonical_phase(double phi) {
    double w = std::fmod(phi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    // fmod can return exactly 2*pi after the correction when phi is a tiny
    // negative number; fold that back to 0.
    if (w >= 2.0 * kPi) w = 0.0;
    return w;
}

// Two-mode coherent input: x-mode amplitude alpha, y-mode amplitude beta.
// Immutable value object; all views are derived from the stored amplitudes.
class InputBeam {
  public:
    InputBeam(cd alpha, cd beta) : alpha_(alpha), beta_(beta) {}

    cd alpha() const { return alpha_; }
    cd beta() const { return beta_; }

    double intensity_x() const { return std::norm(alpha_); }
    double intensity_y() const { return std::norm(beta_); }
    double total_photons() const { return intensity_x() + intensity_y(); }

    // Global amplitude A with alpha = A cos(theta) e^{i phi_x}, beta = A sin(theta) e^{i phi_y}.
    double amplitude() const { return std::sqrt(total_photons()); }

    // Mode partition angle theta = chi = atan(|beta|/|alpha|), in [0, pi/2].
    // Undefined for the vacuum beam; query partition_defined() first.
    bool partition_defined() const { return total_photons() > 0.0; }
    double partition_angle() const {
        if (!partition_defined()) throw InvalidInput("partition angle undefined for vacuum beam");
        return std::atan2(std::abs(beta_), std::abs(alpha_));
    }

    double phase_x() const { return canonical_phase(std::arg(alpha_)); }
    double phase_y() const { return canonical_phase(std::arg(beta_)); }

    bool is_vacuum() const { return alpha_ == cd(0.0, 0.0) && beta_ == cd(0.0, 0.0); }

    static InputBeam from_polar(double amplitude, double theta, double phi_x, double phi_y) {
        return InputBeam(std::polar(amplitude * std::cos(theta), phi_x),
                         std::polar(amplitude * std::sin(theta), phi_y));
    }
    static InputBeam from_intensities(double ix, double iy, double phi_x, double phi_y) {
        if (!(ix >= 0.0) || !(iy >= 0.0) || !std::isfinite(ix) || !std::isfinite(iy))
            throw InvalidInput("intensities must be finite and non-negative");
        return InputBeam(std::polar(std::sqrt(ix), phi_x), std::polar(std::sqrt(iy), phi_y));
    }

  private:
    cd alpha_;
    cd beta_;
};

// Validated constructor: rejects non-finite amplitudes.
InputBeam validate_beam(cd alpha, cd beta);

// Dimensionless interaction time kt, with an optional coupling k used only to
// report absolute times t = kt / k at the output boundary.
struct InteractionParams {
    double kt = 0.0;
    std::optional<double> k;
};

InteractionParams validate_interaction(double kt, std::optional<double> k = std::nullopt);

// Real unit 3-vector on the Poincare sphere.
class Axis {
  public:
    // Normalizes the input; rejects vectors too short to carry a direction.
    static Axis unit(const Eigen::Vector3d& v) {
        double n = v.norm();
        if (!(n > 1e-12) || !std::isfinite(n)) throw InvalidInput("axis vector must be nonzero and finite");
        return Axis(v / n);
    }
    static Axis e1() { return Axis(Eigen::Vector3d(1, 0, 0)); }
    static Axis e2() { return Axis(Eigen::Vector3d(0, 1, 0)); }
    static Axis e3() { return Axis(Eigen::Vector3d(0, 0, 1)); }
    static Axis coordinate(int j) {
        if (j < 1 || j > 3) throw InvalidInput("coordinate axis index must be 1..3");
        Eigen::Vector3d v = Eigen::Vector3d::Zero();
        v[j - 1] = 1.0;
        return Axis(v);
    }

    const Eigen::Vector3d& n() const { return n_; }
    double operator[](int i) const { return n_[i]; }

  private:
    explicit Axis(const Eigen::Vector3d& n) : n_(n) {}
    Eigen::Vector3d n_;
};

// First and second moments of the Stokes vector (S1,S2,S3) plus the total
// photon-number moments mean0 = <S0>, mean0_sq = <S0^2>.
struct StokesMoments {
    double mean0 = 0.0;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    double mean0_sq = 0.0;

    double variance(const Axis& axis) const { return axis.n().dot(cov * axis.n()); }
    double v1() const { return cov(0, 0); }
    double v2() const { return cov(1, 1); }
    double v3() const { return cov(2, 2); }
};

// Maximal perpendicular mean sqrt(|<S>|^2 - <S_n>^2); tiny negative radicands
// from rounding are clamped to zero.
double axis_complement_max(const StokesMoments& m, const Axis& axis);

// Threshold comparisons of the axis variance against the squeezing criteria
// family. `coord_applicable` marks whether any coordinate axis is orthogonal
// to the probe axis (the coordinate-mean criterion needs one).
struct CriteriaFlags {
    double thr_total_mean = 0.0;       // <S0>
    double thr_coord_mean = 0.0;       // max |<S_l>| over coordinate axes orthogonal to n
    double thr_complement = 0.0;       // sqrt(|<S>|^2 - <S_n>^2)
    double thr_complement_sq_over_total = 0.0;  // (|<S>|^2 - <S_n>^2) / <S0>
    bool below_total_mean = false;
    bool below_coord_mean = false;
    bool coord_applicable = false;
    bool below_complement = false;
    bool below_complement_sq_over_total = false;
};

// Squeezing factor along one axis: factor = V_n / complement, degree = 1 - factor.
struct SqueezingReport {
    Axis axis = Axis::e2();
    double variance = 0.0;
    double denominator = 0.0;
    double factor = 0.0;
    double degree = 0.0;
    CriteriaFlags flags;

    bool squeezed() const { return factor > 0.0 && factor < 1.0; }
};

// Case labels for the window/crossing analysis: the first crossing time of X
// is positive exactly when the x mode dominates (|alpha|^2 > |beta|^2).
enum class WindowCase { XDominant, YDominantOrEqual };

inline const char* window_case_name(WindowCase c) {
    return c == WindowCase::XDominant ? "x-dominant" : "y-dominant-or-equal";
}

// Zero crossings of the phase-locked mean component X (t01, t02) and the
// boundary times of the squeezing window (t1, t2), all as dimensionless kt.
// Absent optionals mean the corresponding real root does not exist.
struct SqueezingWindow {
    std::optional<double> t01;
    std::optional<double> t02;
    std::optional<double> t1;
    std::optional<double> t2;
    WindowCase case_label = WindowCase::XDominant;
    bool squeezable = false;  // true when the (t1, t2) window exists
};

// cosh/sinh pair of the mode evolution.
struct HeisenbergCoeffs {
    double c = 1.0;
    double s = 0.0;
};

// Numerator/denominator split of the phase-locked squeezing factor Y/|X| and
// the substitution variable x = e^{4kt} - 1 with its window roots.
struct PhaseLockedDecomposition {
    double X = 0.0;
    double Y = 0.0;
    double x = 0.0;
    std::optional<double> x1;
    std::optional<double> x2;
};

// Global minimum of the phase-locked squeezing factor over kt. For beams that
// never squeeze the infimum is exactly 1 (approached as kt -> infinity, not
// attained), reported as s2_min = 1 with kt_min absent.
struct MinimumResult {
    double s2_min = 1.0;
    std::optional<double> kt_min;
    bool squeezed = false;
};

}  // namespace stsq

#pragma once

// Closed-form engine: exact Heisenberg-picture moment kernel for the pumped
// x mode plus the untouched coherent y mode, full Stokes means/covariances,
// squeezing factors, phase-locked reductions, window/crossing times, and the
// closed-form minimum. Everything here is derived from the evolved-operator
// algebra a_x(t) = c a_x - i s a_x^dag (c = cosh 2kt, s = sinh 2kt); no
// transcription of secondary formulas.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "stsq/normal_order.hpp"
#include "stsq/types.hpp"

namespace stsq {

HeisenbergCoeffs heisenberg_coeffs(double kt);

// Evolved mode symbols as normal-ordered polynomials.
ModePoly evolved_annihilation(const HeisenbergCoeffs& hc);
ModePoly evolved_creation(const HeisenbergCoeffs& hc);

// <a_x^dag(t)^p a_x(t)^q> over a coherent state alpha; supported for p+q <= 4.
cd evolved_mode_moments(cd alpha, double kt, int p, int q);

// Table M[p][q] of the above for all p+q <= 4 (unused slots are zero).
using MomentTable = std::array<std::array<cd, 5>, 5>;
MomentTable evolved_moment_table(cd alpha, double kt);

// Full Stokes first/second moments of the evolved two-mode state.
StokesMoments stokes_moments(const InputBeam& beam, double kt);

// Precomputed Stokes symbol expansion at fixed kt; evaluating many beams at
// one interaction time amortizes the operator-algebra products.
class StokesEvaluator {
  public:
    explicit StokesEvaluator(double kt);
    StokesMoments moments(cd alpha, cd beta) const;

  private:
    struct FlatPoly {
        std::vector<std::pair<TwoModePoly::Key, cd>> terms;
        cd eval(const std::array<cd, 5>& pxc, const std::array<cd, 5>& px,
                const std::array<cd, 5>& pyc, const std::array<cd, 5>& py) const;
    };
    FlatPoly s0_, s0sq_;
    std::array<FlatPoly, 3> s_;
    FlatPoly prod_[3][3];  // j <= k used
};

// Largest deviation of Im<S_j S_k> from the cyclic commutator mean eps_jkl <S_l>,
// plus the defect of <S1^2+S2^2+S3^2> = <S0^2> + 2<S0>; both vanish for the
// exact kernel and certify the operator algebra.
struct AlgebraIdentityDefects {
    double commutator = 0.0;
    double casimir = 0.0;
};
AlgebraIdentityDefects stokes_identity_defects(const InputBeam& beam, double kt);

// Largest relative violation of V_j V_k >= <S_l>^2 over cyclic (j,k,l),
// measured as (<S_l>^2 - V_j V_k) / max(1, <S_l>^2); <= 0 when satisfied.
double uncertainty_violation(const StokesMoments& m);

SqueezingReport squeezing_factor_axis(const StokesMoments& m, const Axis& axis);
CriteriaFlags criteria_compare(const StokesMoments& m, const Axis& axis);

// True when each nonzero mode phase sits within tol of {pi/4, 5pi/4}.
bool is_phase_locked(const InputBeam& beam, double tol = 1e-9);

std::pair<PhaseLockedDecomposition, double> phase_locked_s2(const InputBeam& beam, double kt);

struct Crossings {
    std::optional<double> t01;
    std::optional<double> t02;
    WindowCase case_label = WindowCase::XDominant;
};
Crossings x_zero_crossings(const InputBeam& beam);

struct WindowTimes {
    std::optional<double> t1;
    std::optional<double> t2;
    bool squeezable = false;
};
WindowTimes squeezing_window(const InputBeam& beam);

// Crossings + window + case label in one record (CLI view).
SqueezingWindow window_summary(const InputBeam& beam);

MinimumResult s2_min(const InputBeam& beam);

struct EqualIntensitySummary {
    Crossings crossings;
    WindowTimes window;
    MinimumResult minimum;
};
EqualIntensitySummary equal_intensity_summary(double intensity);

struct OptimalPartition {
    double s_min = 1.0;
    double kt_min = 0.0;
    double chi_opt = 0.0;
};
OptimalPartition optimal_partition(double total_photons);

}  // namespace stsq

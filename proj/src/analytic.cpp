#include "stsq/analytic.hpp"

#include <algorithm>
#include <cmath>

namespace stsq {

namespace {

constexpr cd kI(0.0, 1.0);

// Distance of phi to the nearest member of {pi/4, 5pi/4} modulo 2*pi.
double phase_lock_distance(double phi) {
    double best = 1e300;
    for (double target : {kPi / 4.0, 5.0 * kPi / 4.0}) {
        double d = std::fabs(canonical_phase(phi) - target);
        d = std::min(d, 2.0 * kPi - d);
        best = std::min(best, d);
    }
    return best;
}

void require_phase_locked(const InputBeam& beam) {
    if (!is_phase_locked(beam))
        throw InvalidInput("beam phases must lie in {pi/4, 5pi/4} for the phase-locked reduction");
}

// Quadratic root pair u^2 - 2 b u + c = 0 -> u = b -/+ sqrt(b^2 - c), returned
// as (smaller, larger); nullopt when the discriminant is negative.
std::optional<std::pair<double, double>> quad_roots(double b, double c) {
    const double disc = b * b - c;
    if (disc < 0.0) return std::nullopt;
    const double r = std::sqrt(disc);
    return std::make_pair(b - r, b + r);
}

}  // namespace

HeisenbergCoeffs heisenberg_coeffs(double kt) {
    if (!std::isfinite(kt) || kt < 0.0) throw InvalidInput("kt must be finite and >= 0");
    return HeisenbergCoeffs{std::cosh(2.0 * kt), std::sinh(2.0 * kt)};
}

ModePoly evolved_annihilation(const HeisenbergCoeffs& hc) {
    return ModePoly::annihilation() * cd(hc.c, 0.0) + ModePoly::creation() * cd(0.0, -hc.s);
}

ModePoly evolved_creation(const HeisenbergCoeffs& hc) {
    return ModePoly::creation() * cd(hc.c, 0.0) + ModePoly::annihilation() * cd(0.0, hc.s);
}

cd evolved_mode_moments(cd alpha, double kt, int p, int q) {
    if (p < 0 || q < 0 || p + q > 4)
        throw Unsupported("evolved mode moments implemented for orders p+q <= 4");
    const HeisenbergCoeffs hc = heisenberg_coeffs(kt);
    const ModePoly poly = evolved_creation(hc).pow(p) * evolved_annihilation(hc).pow(q);
    return poly.coherent_expectation(alpha);
}

MomentTable evolved_moment_table(cd alpha, double kt) {
    const HeisenbergCoeffs hc = heisenberg_coeffs(kt);
    const ModePoly a = evolved_annihilation(hc);
    const ModePoly ad = evolved_creation(hc);
    std::array<ModePoly, 5> apow;
    std::array<ModePoly, 5> adpow;
    apow[0] = ModePoly::constant(1.0);
    adpow[0] = ModePoly::constant(1.0);
    for (int i = 1; i <= 4; ++i) {
        apow[i] = apow[i - 1] * a;
        adpow[i] = adpow[i - 1] * ad;
    }
    MomentTable table{};
    for (int p = 0; p <= 4; ++p)
        for (int q = 0; p + q <= 4; ++q)
            table[p][q] = (adpow[p] * apow[q]).coherent_expectation(alpha);
    return table;
}

namespace {

// Builds the three evolved Stokes components (and S0) as two-mode polynomials.
struct StokesSymbols {
    TwoModePoly s0;
    std::array<TwoModePoly, 3> s;
};

StokesSymbols stokes_symbols(const HeisenbergCoeffs& hc) {
    const TwoModePoly ax = TwoModePoly::embed(evolved_annihilation(hc), 0);
    const TwoModePoly axd = TwoModePoly::embed(evolved_creation(hc), 0);
    const TwoModePoly ay = TwoModePoly::embed(ModePoly::annihilation(), 1);
    const TwoModePoly ayd = TwoModePoly::embed(ModePoly::creation(), 1);
    const TwoModePoly nx = axd * ax;
    const TwoModePoly ny = ayd * ay;
    StokesSymbols sym;
    sym.s0 = nx + ny;
    sym.s[0] = nx - ny;
    sym.s[1] = axd * ay + ayd * ax;
    sym.s[2] = (axd * ay) * (-kI) + (ayd * ax) * kI;
    return sym;
}

}  // namespace

cd StokesEvaluator::FlatPoly::eval(const std::array<cd, 5>& pxc, const std::array<cd, 5>& px,
                                   const std::array<cd, 5>& pyc,
                                   const std::array<cd, 5>& py) const {
    cd acc(0.0, 0.0);
    for (const auto& [k, c] : terms) acc += c * pxc[k[0]] * px[k[1]] * pyc[k[2]] * py[k[3]];
    return acc;
}

StokesEvaluator::StokesEvaluator(double kt) {
    const HeisenbergCoeffs hc = heisenberg_coeffs(kt);
    const StokesSymbols sym = stokes_symbols(hc);
    const auto flatten = [](const TwoModePoly& p) {
        FlatPoly f;
        f.terms.assign(p.terms().begin(), p.terms().end());
        return f;
    };
    s0_ = flatten(sym.s0);
    s0sq_ = flatten(sym.s0 * sym.s0);
    for (int j = 0; j < 3; ++j) s_[j] = flatten(sym.s[j]);
    for (int j = 0; j < 3; ++j)
        for (int k = j; k < 3; ++k) prod_[j][k] = flatten(sym.s[j] * sym.s[k]);
}

StokesMoments StokesEvaluator::moments(cd alpha, cd beta) const {
    std::array<cd, 5> px, pxc, py, pyc;
    px[0] = pxc[0] = py[0] = pyc[0] = cd(1.0, 0.0);
    const cd ac = std::conj(alpha), bc = std::conj(beta);
    for (int i = 1; i <= 4; ++i) {
        px[i] = px[i - 1] * alpha;
        pxc[i] = pxc[i - 1] * ac;
        py[i] = py[i - 1] * beta;
        pyc[i] = pyc[i - 1] * bc;
    }
    StokesMoments m;
    m.mean0 = s0_.eval(pxc, px, pyc, py).real();
    m.mean0_sq = s0sq_.eval(pxc, px, pyc, py).real();
    for (int j = 0; j < 3; ++j) m.mean[j] = s_[j].eval(pxc, px, pyc, py).real();
    for (int j = 0; j < 3; ++j)
        for (int k = j; k < 3; ++k) {
            // Re<S_j S_k> is the symmetrized second moment; the imaginary part
            // carries the commutator and cancels in the covariance.
            const cd second = prod_[j][k].eval(pxc, px, pyc, py);
            const double c = second.real() - m.mean[j] * m.mean[k];
            m.cov(j, k) = c;
            m.cov(k, j) = c;
        }
    return m;
}

StokesMoments stokes_moments(const InputBeam& beam, double kt) {
    return StokesEvaluator(kt).moments(beam.alpha(), beam.beta());
}

AlgebraIdentityDefects stokes_identity_defects(const InputBeam& beam, double kt) {
    const HeisenbergCoeffs hc = heisenberg_coeffs(kt);
    const StokesSymbols sym = stokes_symbols(hc);
    const cd alpha = beam.alpha();
    const cd beta = beam.beta();

    double means[3];
    for (int j = 0; j < 3; ++j) means[j] = sym.s[j].coherent_expectation(alpha, beta).real();

    AlgebraIdentityDefects d;
    // Im<S_j S_k> = eps_jkl <S_l> for (j,k) cyclic; scale-floored deviation.
    const int next[3] = {1, 2, 0};
    for (int j = 0; j < 3; ++j) {
        const int k = next[j];
        const int l = next[k];
        const cd second = (sym.s[j] * sym.s[k]).coherent_expectation(alpha, beta);
        const double dev = std::fabs(second.imag() - means[l]);
        d.commutator = std::max(d.commutator, dev / std::max(1.0, std::fabs(means[l])));
    }
    TwoModePoly sum_sq = sym.s[0] * sym.s[0] + sym.s[1] * sym.s[1] + sym.s[2] * sym.s[2];
    const double lhs = sum_sq.coherent_expectation(alpha, beta).real();
    const double s0 = sym.s0.coherent_expectation(alpha, beta).real();
    const double s0sq = (sym.s0 * sym.s0).coherent_expectation(alpha, beta).real();
    const double rhs = s0sq + 2.0 * s0;
    d.casimir = std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs));
    return d;
}

double uncertainty_violation(const StokesMoments& m) {
    double worst = -1e300;
    const int next[3] = {1, 2, 0};
    for (int j = 0; j < 3; ++j) {
        const int k = next[j];
        const int l = next[k];
        const double lhs = m.cov(j, j) * m.cov(k, k);
        const double rhs = m.mean[l] * m.mean[l];
        worst = std::max(worst, (rhs - lhs) / std::max(1.0, rhs));
    }
    return worst;
}

namespace {

// Shared degeneracy test: perpendicular mean must carry a direction.
double complement_or_throw(const StokesMoments& m, const Axis& axis) {
    const double denom = axis_complement_max(m, axis);
    if (denom <= 1e-12 * std::max(1.0, m.mean.norm()))
        throw DegenerateAxis("mean vector parallel to probe axis (or zero)");
    return denom;
}

}  // namespace

CriteriaFlags criteria_compare(const StokesMoments& m, const Axis& axis) {
    const double denom = complement_or_throw(m, axis);
    const double vn = m.variance(axis);

    CriteriaFlags f;
    f.thr_total_mean = m.mean0;
    f.thr_complement = denom;
    f.thr_complement_sq_over_total = m.mean0 > 0.0 ? denom * denom / m.mean0 : 0.0;
    f.coord_applicable = false;
    f.thr_coord_mean = 0.0;
    for (int l = 0; l < 3; ++l) {
        if (std::fabs(axis.n()[l]) <= 1e-9) {
            f.coord_applicable = true;
            f.thr_coord_mean = std::max(f.thr_coord_mean, std::fabs(m.mean[l]));
        }
    }
    f.below_total_mean = vn < f.thr_total_mean;
    f.below_coord_mean = f.coord_applicable && vn < f.thr_coord_mean;
    f.below_complement = vn < f.thr_complement;
    f.below_complement_sq_over_total = vn < f.thr_complement_sq_over_total;
    return f;
}

SqueezingReport squeezing_factor_axis(const StokesMoments& m, const Axis& axis) {
    SqueezingReport r;
    r.axis = axis;
    r.variance = m.variance(axis);
    r.denominator = complement_or_throw(m, axis);
    r.factor = r.variance / r.denominator;
    r.degree = 1.0 - r.factor;
    r.flags = criteria_compare(m, axis);
    return r;
}

bool is_phase_locked(const InputBeam& beam, double tol) {
    const bool x_ok = beam.alpha() == cd(0.0, 0.0) || phase_lock_distance(beam.phase_x()) <= tol;
    const bool y_ok = beam.beta() == cd(0.0, 0.0) || phase_lock_distance(beam.phase_y()) <= tol;
    return x_ok && y_ok;
}

std::pair<PhaseLockedDecomposition, double> phase_locked_s2(const InputBeam& beam, double kt) {
    require_phase_locked(beam);
    const HeisenbergCoeffs hc = heisenberg_coeffs(kt);
    const double ix = beam.intensity_x();
    const double iy = beam.intensity_y();
    const double cms2 = (hc.c - hc.s) * (hc.c - hc.s);  // e^{-4kt}
    const double s2 = hc.s * hc.s;

    PhaseLockedDecomposition d;
    d.X = cms2 * ix + s2 - iy;
    d.Y = cms2 * (ix + iy) + s2;
    d.x = std::expm1(4.0 * kt);
    const WindowTimes w = squeezing_window(beam);
    if (w.t1) d.x1 = std::expm1(4.0 * (*w.t1));
    if (w.t2) d.x2 = std::expm1(4.0 * (*w.t2));

    const double scale = cms2 * ix + s2 + iy;
    if (std::fabs(d.X) <= 1e-12 * std::max(1.0, scale))
        throw SingularBoundary("phase-locked factor diverges at a zero crossing of X");
    return {d, d.Y / std::fabs(d.X)};
}

Crossings x_zero_crossings(const InputBeam& beam) {
    require_phase_locked(beam);
    const double ix = beam.intensity_x();
    const double iy = beam.intensity_y();
    Crossings out;
    out.case_label = ix > iy ? WindowCase::XDominant : WindowCase::YDominantOrEqual;
    // X(u)=0 with u=e^{4kt}: u^2 - 2(1+2*iy) u + (1+4*ix) = 0.
    const auto roots = quad_roots(1.0 + 2.0 * iy, 1.0 + 4.0 * ix);
    if (!roots) return out;
    const auto [u01, u02] = *roots;
    // u stays positive (product of roots is 1+4*ix >= 1), so logs are defined.
    out.t01 = 0.25 * std::log(u01);
    out.t02 = 0.25 * std::log(u02);
    return out;
}

WindowTimes squeezing_window(const InputBeam& beam) {
    require_phase_locked(beam);
    const double ix = beam.intensity_x();
    const double iy = beam.intensity_y();
    WindowTimes out;
    // Y+X = 0 with u=e^{4kt}: u^2 - 2(1+iy) u + (1+2*iy+4*ix) = 0, i.e.
    // u = 1+iy -/+ sqrt(iy^2-4*ix): real roots only when iy^2 > 4*ix.
    const double disc = iy * iy - 4.0 * ix;
    if (disc <= 0.0) {
        out.squeezable = false;
        if (disc == 0.0 && iy > 0.0) {
            // Degenerate tangency: boundary touch with an empty open window.
            const double u = 1.0 + iy;
            out.t1 = 0.25 * std::log(u);
            out.t2 = out.t1;
        }
        return out;
    }
    const double r = std::sqrt(disc);
    out.t1 = 0.25 * std::log1p(iy - r);
    out.t2 = 0.25 * std::log1p(iy + r);
    out.squeezable = true;
    return out;
}

SqueezingWindow window_summary(const InputBeam& beam) {
    const Crossings c = x_zero_crossings(beam);
    const WindowTimes w = squeezing_window(beam);
    SqueezingWindow out;
    out.t01 = c.t01;
    out.t02 = c.t02;
    out.t1 = w.t1;
    out.t2 = w.t2;
    out.case_label = c.case_label;
    out.squeezable = w.squeezable;
    return out;
}

MinimumResult s2_min(const InputBeam& beam) {
    require_phase_locked(beam);
    const double ix = beam.intensity_x();
    const double iy = beam.intensity_y();
    MinimumResult r;
    r.squeezed = iy * iy > 4.0 * ix;
    if (!r.squeezed) {
        // The factor stays above 1 and tends to it from above as kt grows; the
        // infimum 1 is reported with no attaining time.
        r.s2_min = 1.0;
        r.kt_min.reset();
        return r;
    }
    const double n = ix + iy;
    const double root = std::sqrt(1.0 + n);
    r.s2_min = (root - 1.0) / (1.0 + iy - root);
    r.kt_min = 0.25 * std::log(2.0 * root - 1.0);
    return r;
}

EqualIntensitySummary equal_intensity_summary(double intensity) {
    if (!std::isfinite(intensity) || intensity < 0.0)
        throw InvalidInput("intensity must be finite and >= 0");
    const double i = intensity;
    EqualIntensitySummary out;

    out.crossings.case_label = WindowCase::YDominantOrEqual;
    out.crossings.t01 = 0.0;
    out.crossings.t02 = 0.25 * std::log1p(4.0 * i);

    const double disc = i * (i - 4.0);
    if (disc > 0.0) {
        const double r = std::sqrt(disc);
        out.window.t1 = 0.25 * std::log1p(i - r);
        out.window.t2 = 0.25 * std::log1p(i + r);
        out.window.squeezable = true;
    } else if (disc == 0.0 && i > 0.0) {
        out.window.t1 = 0.25 * std::log1p(i);
        out.window.t2 = out.window.t1;
        out.window.squeezable = false;
    } else {
        out.window.squeezable = false;
    }

    out.minimum.squeezed = i > 4.0;
    if (out.minimum.squeezed) {
        const double root = std::sqrt(1.0 + 2.0 * i);
        out.minimum.s2_min = (root - 1.0) / (1.0 + i - root);
        out.minimum.kt_min = 0.25 * std::log(2.0 * root - 1.0);
    } else {
        out.minimum.s2_min = 1.0;
        out.minimum.kt_min.reset();
    }
    return out;
}

OptimalPartition optimal_partition(double total_photons) {
    if (!std::isfinite(total_photons) || total_photons <= 0.0)
        throw InvalidInput("total photon number must be > 0");
    const double n = total_photons;
    OptimalPartition out;
    // The minimum over the partition angle sits at the boundary chi = pi/2
    // (all light in the unpumped mode): the factor's denominator 1+iy-sqrt(1+n)
    // grows with iy at fixed n while the numerator is fixed.
    out.chi_opt = kPi / 2.0;
    const double root = std::sqrt(1.0 + n);
    out.s_min = (root - 1.0) / (1.0 + n - root);  // equals 1/sqrt(1+n)
    out.kt_min = 0.25 * std::log(2.0 * root - 1.0);
    return out;
}

}  // namespace stsq

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "stsq/errors.hpp"
#include "stsq/fock.hpp"
#include "stsq/types.hpp"

namespace {

using stsq::cd;
using stsq::kPi;

void requireCloseAbsOrRel(double actual, double expected, double tol) {
    const double scale = std::max({1.0, std::fabs(actual), std::fabs(expected)});
    REQUIRE(std::fabs(actual - expected) <= tol * scale);
}

void requireCloseComplex(cd actual, cd expected, double tol) {
    const double scale = std::max({1.0, std::abs(actual), std::abs(expected)});
    REQUIRE(std::abs(actual - expected) <= tol * scale);
}

// Dense symmetric generator a^dag^2 + a^2 at the given truncation.
Eigen::MatrixXd dense_generator(int dim) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i + 2 < dim + 0; ++i) {
        if (i + 2 >= dim) break;
        const double v = std::sqrt(double(i + 1) * double(i + 2));
        h(i, i + 2) = v;
        h(i + 2, i) = v;
    }
    return h;
}

}  // namespace

TEST_CASE("coherent state amplitudes follow the Poisson-root law") {
    const cd alpha(0.9, -0.4);
    const int dim = stsq::min_coherent_dim(alpha);
    const stsq::FockState st = stsq::build_coherent(alpha, dim);
    REQUIRE(st.dim() == dim);
    REQUIRE(st.norm_leakage >= 0.0);
    REQUIRE(st.norm_leakage < 1e-10);
    // Direct formula for the first few levels.
    const double pref = std::exp(-0.5 * std::norm(alpha));
    cd power(1.0, 0.0);
    double fact = 1.0;
    for (int n = 0; n < 8; ++n) {
        requireCloseComplex(st.amps[n], pref * power / std::sqrt(fact), 1e-14);
        power *= alpha;
        fact *= double(n + 1);
    }
    // Ratio recursion c_{n+1}/c_n = alpha/sqrt(n+1) holds deep into the tail.
    for (int n = 20; n < 25; ++n) {
        requireCloseComplex(st.amps[n + 1] / st.amps[n], alpha / std::sqrt(double(n + 1)),
                            1e-12);
    }
}

TEST_CASE("coherent construction enforces its dimension and leakage gates") {
    REQUIRE_THROWS_AS(stsq::build_coherent(cd(1.0, 0.0), 1), stsq::InvalidInput);
    // Below the physics heuristic the construction refuses outright.
    REQUIRE_THROWS_AS(stsq::build_coherent(cd(1.0, 0.0), 16), stsq::TruncationError);
    // At the heuristic dimension the actual leakage is far below any sane
    // tolerance, so the post-construction gate is a pure backstop.
    const stsq::FockState at_min =
        stsq::build_coherent(cd(2.0, 0.0), stsq::min_coherent_dim(cd(2.0, 0.0)));
    REQUIRE(std::fabs(at_min.norm_leakage) < 1e-12);
    // The heuristic grows with intensity and never dips below the base.
    int prev = 0;
    for (double a : {0.0, 0.5, 1.0, 2.0, 3.0}) {
        const int d = stsq::min_coherent_dim(cd(a, 0.0));
        REQUIRE(d >= 28);
        REQUIRE(d >= prev);
        prev = d;
    }
}

TEST_CASE("truncation policy rejects out-of-range settings") {
    REQUIRE_NOTHROW(stsq::validate_policy(stsq::TruncationPolicy{}));
    stsq::TruncationPolicy p;
    p.leak_tol = 0.0;
    REQUIRE_THROWS_AS(stsq::validate_policy(p), stsq::InvalidInput);
    p = stsq::TruncationPolicy{};
    p.growth_factor = 1;
    REQUIRE_THROWS_AS(stsq::validate_policy(p), stsq::InvalidInput);
    p = stsq::TruncationPolicy{};
    p.max_dim = 8;
    REQUIRE_THROWS_AS(stsq::validate_policy(p), stsq::InvalidInput);
}

TEST_CASE("the propagator preserves norm and reduces to the identity at kt = 0") {
    const cd alpha(1.3, 0.7);
    const stsq::FockState st = stsq::build_coherent(alpha, 64);
    const Eigen::VectorXcd same = stsq::apply_propagator(0.0, st.amps);
    REQUIRE((same - st.amps).cwiseAbs().maxCoeff() < 1e-13);
    for (double kt : {0.1, 0.3, 0.6}) {
        const Eigen::VectorXcd out = stsq::apply_propagator(kt, st.amps);
        requireCloseAbsOrRel(out.squaredNorm(), st.amps.squaredNorm(), 1e-12);
    }
    REQUIRE_THROWS_AS(stsq::apply_propagator(-0.1, st.amps), stsq::InvalidInput);
}

TEST_CASE("spectral propagator matches a Pade exponential of the same truncated generator") {
    const int dim = 64;
    const double kt = 0.3;
    const Eigen::MatrixXcd u = stsq::squeeze_propagator(kt, dim);
    const Eigen::MatrixXcd h = dense_generator(dim).cast<cd>();
    const Eigen::MatrixXcd u_pade = (cd(0.0, -kt) * h).exp();
    REQUIRE((u - u_pade).cwiseAbs().maxCoeff() < 1e-10);
    // Requested columns agree with the full matrix.
    const Eigen::MatrixXcd cols = stsq::propagator_columns(kt, dim, 8);
    REQUIRE((cols - u.leftCols(8)).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXcd one = stsq::propagator_columns(kt, dim, 1);
    REQUIRE((one - u.leftCols(1)).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE_THROWS_AS(stsq::propagator_columns(kt, dim, 0), stsq::InvalidInput);
    REQUIRE_THROWS_AS(stsq::propagator_columns(kt, dim, dim + 1), stsq::InvalidInput);
}

TEST_CASE("interior unitarity holds and the margin guard rejects empty blocks") {
    const Eigen::MatrixXcd u = stsq::squeeze_propagator(0.4, 96);
    REQUIRE(stsq::unitarity_defect_interior(u, 10) < 1e-11);
    REQUIRE_THROWS_AS(stsq::unitarity_defect_interior(u, 96), stsq::InvalidInput);
}

TEST_CASE("propagators compose: U(a) U(b) equals U(a+b) on the interior block") {
    REQUIRE(stsq::composition_defect(0.2, 0.3, 64, 128) < 1e-11);
    REQUIRE(stsq::composition_defect(0.0, 0.5, 64, 128) < 1e-11);
    REQUIRE_THROWS_AS(stsq::composition_defect(0.2, 0.3, 0, 128), stsq::InvalidInput);
    REQUIRE_THROWS_AS(stsq::composition_defect(0.2, 0.3, 129, 128), stsq::InvalidInput);
}

TEST_CASE("mode moments of an unevolved coherent state are powers of alpha") {
    const cd alpha(0.8, 0.5);
    const stsq::FockState st = stsq::build_coherent(alpha, 48);
    const stsq::ModeMomentTable t = stsq::mode_moment_table(st);
    const cd ac = std::conj(alpha);
    for (int p = 0; p <= 2; ++p) {
        for (int q = 0; q <= 2; ++q) {
            requireCloseComplex(t[p][q], std::pow(ac, p) * std::pow(alpha, q), 1e-11);
        }
    }
}

TEST_CASE("the evolved photon number matches the pinned benchmark value") {
    const stsq::FockState st = stsq::build_coherent(cd(0.5, 0.0), 64);
    stsq::FockState ev;
    ev.amps = stsq::apply_propagator(0.1, st.amps);
    const stsq::ModeMomentTable t = stsq::mode_moment_table(ev);
    requireCloseAbsOrRel(t[1][1].real(), 0.31080427887884116, 1e-10);
    requireCloseAbsOrRel(t[1][1].imag(), 0.0, 1e-12);
    // Vacuum gains exactly sinh^2(2kt) photons. Squeezed tails decay only
    // geometrically in tanh(2kt), so the deeper time needs a roomy dimension.
    stsq::FockState vac = stsq::build_coherent(cd(0.0, 0.0), 192);
    for (double kt : {0.2, 0.5}) {
        stsq::FockState evv;
        evv.amps = stsq::apply_propagator(kt, vac.amps);
        const double s = std::sinh(2.0 * kt);
        requireCloseAbsOrRel(stsq::mode_moment_table(evv)[1][1].real(), s * s, 1e-10);
    }
}

TEST_CASE("product-path moments at kt = 0 reproduce the coherent-state laws") {
    const cd alpha = std::polar(std::sqrt(2.5), 0.4);
    const cd beta = std::polar(std::sqrt(1.5), 1.9);
    const stsq::FockState st = stsq::build_coherent(alpha, 48);
    stsq::OracleChecks checks;
    const stsq::StokesMoments m = stsq::stokes_moments_product(st, beta, &checks);
    const double n = std::norm(alpha) + std::norm(beta);
    const cd cross = std::conj(alpha) * beta;
    requireCloseAbsOrRel(m.mean0, n, 1e-10);
    requireCloseAbsOrRel(m.mean[0], std::norm(alpha) - std::norm(beta), 1e-10);
    requireCloseAbsOrRel(m.mean[1], 2.0 * cross.real(), 1e-10);
    requireCloseAbsOrRel(m.mean[2], 2.0 * cross.imag(), 1e-10);
    requireCloseAbsOrRel(m.v1(), n, 1e-10);
    requireCloseAbsOrRel(m.v2(), n, 1e-10);
    requireCloseAbsOrRel(m.v3(), n, 1e-10);
    REQUIRE(checks.commutator < 1e-11);
    REQUIRE(checks.casimir < 1e-11);
}

TEST_CASE("product-path and full-matrix oracles agree on small evolved beams") {
    // The full path caps at dim 32, so keep the beam small and the time modest:
    // its x-mode truncation error scales like tanh(2kt)^dim.
    const stsq::InputBeam beam =
        stsq::InputBeam::from_intensities(1.0, 1.0, kPi / 4.0, kPi / 4.0);
    for (double kt : {0.0, 0.1, 0.2}) {
        stsq::OracleChecks pc, fc;
        stsq::FockState st = stsq::build_coherent(beam.alpha(), 96);
        stsq::FockState ev;
        ev.amps = stsq::apply_propagator(kt, st.amps);
        ev.norm_leakage = st.norm_leakage;
        const stsq::StokesMoments a = stsq::stokes_moments_product(ev, beam.beta(), &pc);
        const stsq::StokesMoments b = stsq::full_two_mode_moments(beam, kt, 32, &fc);
        requireCloseAbsOrRel(a.mean0, b.mean0, 1e-8);
        requireCloseAbsOrRel(a.mean0_sq, b.mean0_sq, 1e-8);
        for (int j = 0; j < 3; ++j) {
            requireCloseAbsOrRel(a.mean[j], b.mean[j], 1e-8);
            for (int k = 0; k < 3; ++k) requireCloseAbsOrRel(a.cov(j, k), b.cov(j, k), 1e-8);
        }
        REQUIRE(fc.commutator < 1e-9);
        REQUIRE(fc.casimir < 1e-9);
    }
}

TEST_CASE("the full-matrix arbiter enforces its smallness preconditions") {
    const stsq::InputBeam small = stsq::InputBeam::from_intensities(1.0, 1.0, 0.0, 0.0);
    REQUIRE_THROWS_AS(stsq::full_two_mode_moments(small, 0.1, 33), stsq::InvalidInput);
    REQUIRE_THROWS_AS(stsq::full_two_mode_moments(small, 0.1, 1), stsq::InvalidInput);
    const stsq::InputBeam big = stsq::InputBeam::from_intensities(5.0, 1.0, 0.0, 0.0);
    REQUIRE_THROWS_AS(stsq::full_two_mode_moments(big, 0.1, 28), stsq::InvalidInput);
    // A dimension too small for the requested state leaks and is refused.
    const stsq::InputBeam mid = stsq::InputBeam::from_intensities(4.0, 4.0, 0.0, 0.0);
    REQUIRE_THROWS_AS(stsq::full_two_mode_moments(mid, 0.1, 8), stsq::TruncationError);
}

TEST_CASE("truncation checking certifies convergence and reports both dimensions") {
    stsq::TruncationPolicy policy;
    // A computation that is already dimension-independent converges at once.
    const stsq::ConvergenceReport ok = stsq::truncation_check(
        [](int) { return std::vector<double>{1.0, 2.0}; }, 32, policy);
    REQUIRE(ok.passed);
    REQUIRE(ok.dim_low == 32);
    REQUIRE(ok.dim_high == 64);
    REQUIRE(ok.drift < 1e-15);

    // A computation that keeps changing exhausts the cap.
    stsq::TruncationPolicy tight;
    tight.max_dim = 64;
    REQUIRE_THROWS_AS(
        stsq::truncation_check([](int d) { return std::vector<double>{double(d)}; }, 32, tight),
        stsq::NonConverged);
    // Starting above the cap is refused immediately.
    REQUIRE_THROWS_AS(
        stsq::truncation_check([](int) { return std::vector<double>{0.0}; }, 128, tight),
        stsq::NonConverged);
    // Output shape must be stable across dimensions.
    REQUIRE_THROWS_AS(stsq::truncation_check(
                          [](int d) { return std::vector<double>(d < 64 ? 1 : 2, 0.0); }, 32,
                          policy),
                      stsq::InvalidInput);
}

TEST_CASE("the starting dimension grows with intensity and interaction time") {
    REQUIRE(stsq::oracle_start_dim(0.0, 0.0) >= 28);
    REQUIRE(stsq::oracle_start_dim(4.0, 0.2) > stsq::oracle_start_dim(1.0, 0.2));
    REQUIRE(stsq::oracle_start_dim(1.0, 0.8) > stsq::oracle_start_dim(1.0, 0.1));
}

TEST_CASE("certified oracle moments carry a passing convergence report") {
    const stsq::InputBeam beam =
        stsq::InputBeam::from_intensities(2.0, 3.0, kPi / 4.0, kPi / 4.0);
    const stsq::OracleResult res = stsq::oracle_stokes_moments(beam, 0.4);
    REQUIRE(res.convergence.passed);
    REQUIRE(res.convergence.dim_high > res.convergence.dim_low);
    REQUIRE(res.convergence.drift < 1e-8);
    REQUIRE(res.checks.commutator < 1e-10);
    REQUIRE(res.checks.casimir < 1e-10);

    // The evolved vacuum x mode leaves only the pump photons in S0 and S1.
    const stsq::InputBeam vac = stsq::InputBeam(cd(0.0, 0.0), cd(0.0, 0.0));
    for (double kt : {0.3, 0.7}) {
        const stsq::OracleResult rv = stsq::oracle_stokes_moments(vac, kt);
        const double s2 = std::pow(std::sinh(2.0 * kt), 2);
        requireCloseAbsOrRel(rv.moments.mean0, s2, 1e-9);
        requireCloseAbsOrRel(rv.moments.mean[0], s2, 1e-9);
        requireCloseAbsOrRel(rv.moments.mean[1], 0.0, 1e-10);
        requireCloseAbsOrRel(rv.moments.mean[2], 0.0, 1e-10);
    }

    // An impossibly small cap cannot certify anything.
    stsq::TruncationPolicy tiny;
    tiny.max_dim = 16;
    REQUIRE_THROWS_AS(stsq::oracle_stokes_moments(beam, 0.4, tiny), stsq::NonConverged);
}

TEST_CASE("the Heisenberg picture emerges from the numerical propagator") {
    for (double kt : {0.1, 0.4, 0.8}) {
        const stsq::CornerReport rep = stsq::heisenberg_corner_defect(kt, 128);
        REQUIRE(rep.block == 128);
        REQUIRE(rep.dim_used >= 128);
        REQUIRE(rep.tail_mass < 1e-12);
        REQUIRE(rep.max_abs_defect < 1e-9);
    }
    REQUIRE_THROWS_AS(stsq::heisenberg_corner_defect(0.1, 1), stsq::InvalidInput);
}

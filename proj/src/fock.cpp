#include "stsq/fock.hpp"

#include "stsq/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Eigenvalues>

#if defined(STSQ_HAVE_LAPACKE)
#include <lapacke.h>
#endif

#include "stsq/errors.hpp"

namespace stsq {

namespace {

constexpr cd kI(0.0, 1.0);

// Number of Fock levels of the given parity below dim (levels 2i + parity).
int parity_size(int dim, int parity) { return (dim - parity + 1) / 2; }

struct ParityFactor {
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;  // orthogonal, columns are eigenvectors
};

struct SpectralEntry {
    ParityFactor parity[2];
};

// The generator a^dag^2 + a^2 restricted to one parity chain is a real
// symmetric tridiagonal matrix with zero diagonal and couplings
// sqrt((l+1)(l+2)) between levels l and l+2. The factorization depends only
// on the dimension, so it is cached per dim and shared across all kt.
const SpectralEntry& spectral_entry(int dim) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<SpectralEntry>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(dim);
    if (it != cache.end()) return *it->second;

    auto entry = std::make_unique<SpectralEntry>();
    for (int par = 0; par < 2; ++par) {
        const int b = parity_size(dim, par);
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(b);
        Eigen::VectorXd sub = Eigen::VectorXd::Zero(std::max(b - 1, 0));
        for (int i = 0; i + 1 < b; ++i) {
            const double l = 2.0 * i + par;
            sub[i] = std::sqrt((l + 1.0) * (l + 2.0));
        }
        if (b > 0) {
#if defined(STSQ_HAVE_LAPACKE)
            // Divide-and-conquer is far cheaper than implicit QL once the
            // parity blocks grow past a few hundred levels.
            Eigen::VectorXd d = diag;
            Eigen::VectorXd e = Eigen::VectorXd::Zero(std::max(b - 1, 1));
            e.head(sub.size()) = sub;
            Eigen::MatrixXd z(b, b);
            const lapack_int info = LAPACKE_dstedc(LAPACK_COL_MAJOR, 'I', b, d.data(), e.data(),
                                                   z.data(), b);
            if (info != 0) throw NonConverged("tridiagonal eigensolve failed");
            entry->parity[par].evals = std::move(d);
            entry->parity[par].evecs = std::move(z);
#else
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
            if (es.info() != Eigen::Success)
                throw NonConverged("tridiagonal eigensolve failed");
            entry->parity[par].evals = es.eigenvalues();
            entry->parity[par].evecs = es.eigenvectors();
#endif
        }
    }
    auto [pos, ok] = cache.emplace(dim, std::move(entry));
    (void)ok;
    return *pos->second;
}

void require_kt(double kt) {
    if (!std::isfinite(kt) || kt < 0.0) throw InvalidInput("kt must be finite and >= 0");
}

// Coherent amplitudes without the dimension-heuristic gate (callers that have
// their own dimension contract, e.g. the small full two-mode path, perform an
// explicit leakage check instead).
Eigen::VectorXcd raw_coherent(cd alpha, int dim) {
    Eigen::VectorXcd amps(dim);
    cd c = std::exp(cd(-0.5 * std::norm(alpha), 0.0));
    for (int n = 0; n < dim; ++n) {
        amps[n] = c;
        c *= alpha / std::sqrt(double(n + 1));
    }
    return amps;
}

// (a psi)[n] = sqrt(n+1) psi[n+1]; the top level is dropped.
Eigen::VectorXcd lower(const Eigen::VectorXcd& psi) {
    const int d = static_cast<int>(psi.size());
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d);
    for (int n = 0; n + 1 < d; ++n) out[n] = std::sqrt(double(n + 1)) * psi[n + 1];
    return out;
}

}  // namespace

TruncationPolicy validate_policy(TruncationPolicy p) {
    if (!(p.leak_tol > 0.0) || !(p.leak_tol < 1e-4))
        throw InvalidInput("leak_tol must lie in (0, 1e-4)");
    if (p.growth_factor < 2) throw InvalidInput("growth_factor must be >= 2");
    if (p.max_dim < 16) throw InvalidInput("max_dim must be >= 16");
    return p;
}

int min_coherent_dim(cd alpha) {
    const double i = std::norm(alpha);
    return static_cast<int>(std::ceil(i + 8.0 * std::sqrt(i + 1.0) + 20.0));
}

FockState build_coherent(cd alpha, int dim, double leak_tol) {
    if (dim < 2) throw InvalidInput("Fock dimension must be >= 2");
    if (dim < min_coherent_dim(alpha))
        throw TruncationError("dimension below the coherent-state heuristic");
    FockState st;
    st.amps = raw_coherent(alpha, dim);
    st.norm_leakage = 1.0 - st.amps.squaredNorm();
    if (!(st.norm_leakage < leak_tol))
        throw TruncationError("coherent state norm leakage above tolerance");
    return st;
}

Eigen::VectorXcd apply_propagator(double kt, const Eigen::VectorXcd& psi) {
    require_kt(kt);
    const int dim = static_cast<int>(psi.size());
    if (dim < 2) throw InvalidInput("Fock dimension must be >= 2");
    const SpectralEntry& ent = spectral_entry(dim);
    Eigen::VectorXcd out(dim);
    for (int par = 0; par < 2; ++par) {
        const int b = parity_size(dim, par);
        if (b == 0) continue;
        const ParityFactor& f = ent.parity[par];
        Eigen::VectorXd re(b), im(b);
        for (int i = 0; i < b; ++i) {
            const cd v = psi[2 * i + par];
            re[i] = v.real();
            im[i] = v.imag();
        }
        const Eigen::VectorXd tr = f.evecs.transpose() * re;
        const Eigen::VectorXd ti = f.evecs.transpose() * im;
        Eigen::VectorXd pr(b), pi(b);
        for (int j = 0; j < b; ++j) {
            const double ang = kt * f.evals[j];
            const double cp = std::cos(ang), sp = -std::sin(ang);  // e^{-i kt lambda}
            pr[j] = tr[j] * cp - ti[j] * sp;
            pi[j] = tr[j] * sp + ti[j] * cp;
        }
        const Eigen::VectorXd or_ = f.evecs * pr;
        const Eigen::VectorXd oi = f.evecs * pi;
        for (int i = 0; i < b; ++i) out[2 * i + par] = cd(or_[i], oi[i]);
    }
    return out;
}

Eigen::MatrixXcd propagator_columns(double kt, int dim, int ncols) {
    require_kt(kt);
    if (dim < 2 || ncols < 1 || ncols > dim)
        throw InvalidInput("propagator columns need 1 <= ncols <= dim");
    const SpectralEntry& ent = spectral_entry(dim);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, ncols);
    for (int par = 0; par < 2; ++par) {
        const int b = parity_size(dim, par);
        const int bc = parity_size(ncols, par);
        if (b == 0 || bc == 0) continue;
        const ParityFactor& f = ent.parity[par];
        // Column j (level 2j+par) of the block propagator: V diag(phase) V^T e_j.
        Eigen::MatrixXd wr = f.evecs.topRows(bc).transpose();  // b x bc
        Eigen::MatrixXd wi = wr;
        for (int r = 0; r < b; ++r) {
            const double ang = kt * f.evals[r];
            const double cp = std::cos(ang), sp = -std::sin(ang);
            for (int c = 0; c < bc; ++c) {
                const double v = wr(r, c);
                wr(r, c) = v * cp;
                wi(r, c) = v * sp;
            }
        }
        const Eigen::MatrixXd br = f.evecs * wr;
        const Eigen::MatrixXd bi = f.evecs * wi;
        for (int c = 0; c < bc; ++c)
            for (int r = 0; r < b; ++r) out(2 * r + par, 2 * c + par) = cd(br(r, c), bi(r, c));
    }
    return out;
}

double unitarity_defect_interior(const Eigen::MatrixXcd& u, int margin) {
    const int d = static_cast<int>(u.rows());
    const int keep = d - std::max(margin, 0);
    if (keep < 1) throw InvalidInput("interior margin leaves no block");
    const Eigen::MatrixXcd g =
        u.adjoint() * u - Eigen::MatrixXcd::Identity(u.cols(), u.cols());
    return g.topLeftCorner(std::min<int>(keep, g.rows()), std::min<int>(keep, g.cols()))
        .cwiseAbs()
        .maxCoeff();
}

Eigen::MatrixXcd squeeze_propagator(double kt, int dim) {
    Eigen::MatrixXcd u = propagator_columns(kt, dim, dim);
    const int margin = std::max(2, dim / 10);
    if (unitarity_defect_interior(u, margin) >= 1e-10)
        throw TruncationError("propagator failed interior unitarity check");
    return u;
}

ModeMomentTable mode_moment_table(const FockState& state) {
    std::array<Eigen::VectorXcd, 3> low;
    low[0] = state.amps;
    low[1] = lower(low[0]);
    low[2] = lower(low[1]);
    ModeMomentTable m{};
    for (int p = 0; p <= 2; ++p)
        for (int q = 0; q <= 2; ++q) m[p][q] = low[p].dot(low[q]);  // <a^p psi, a^q psi>
    return m;
}

StokesMoments stokes_moments_product(const FockState& x_state, cd beta, OracleChecks* checks) {
    const ModeMomentTable mt = mode_moment_table(x_state);
    const cd m01 = mt[0][1], m10 = mt[1][0], m11 = mt[1][1];
    const cd m20 = mt[2][0], m02 = mt[0][2], m21 = mt[2][1], m12 = mt[1][2], m22 = mt[2][2];
    const cd b = beta, bc = std::conj(beta);
    const double iy = std::norm(beta);
    const cd b2 = b * b, bc2 = bc * bc;

    const cd nx2 = m22 + m11;              // <n_x^2>
    const double ny2 = iy * iy + iy;       // <n_y^2>

    // Means.
    const cd s1 = m11 - iy;
    const cd s2 = m10 * b + m01 * bc;
    const cd s3 = -kI * m10 * b + kI * m01 * bc;
    const cd s0 = m11 + iy;

    // Ordered second moments <S_j S_k>; imaginary parts carry the commutators.
    cd sec[3][3];
    sec[0][0] = nx2 - 2.0 * m11 * iy + ny2;
    sec[1][1] = m20 * b2 + m02 * bc2 + m11 * (iy + 1.0) + (m11 + 1.0) * iy;
    sec[2][2] = -m20 * b2 - m02 * bc2 + m11 * (iy + 1.0) + (m11 + 1.0) * iy;
    sec[0][1] = (m21 + m10) * b + m12 * bc - m10 * b * iy - m01 * bc * (iy + 1.0);
    sec[1][0] = m21 * b - m10 * b * (iy + 1.0) + (m12 + m01) * bc - m01 * bc * iy;
    sec[0][2] = -kI * ((m21 + m10) * b) + kI * m12 * bc + kI * m10 * b * iy -
                kI * m01 * bc * (iy + 1.0);
    sec[2][0] = -kI * (m21 * b - m10 * b * (iy + 1.0)) +
                kI * ((m12 + m01) * bc - m01 * bc * iy);
    sec[1][2] = -kI * m20 * b2 + kI * m02 * bc2 + kI * m11 * (iy + 1.0) -
                kI * (m11 + 1.0) * iy;
    sec[2][1] = -kI * m20 * b2 + kI * m02 * bc2 - kI * m11 * (iy + 1.0) +
                kI * (m11 + 1.0) * iy;

    StokesMoments m;
    m.mean0 = s0.real();
    m.mean0_sq = (nx2 + 2.0 * m11 * iy + ny2).real();
    m.mean = Eigen::Vector3d(s1.real(), s2.real(), s3.real());
    for (int j = 0; j < 3; ++j)
        for (int k = j; k < 3; ++k) {
            const double c = 0.5 * (sec[j][k] + sec[k][j]).real() - m.mean[j] * m.mean[k];
            m.cov(j, k) = c;
            m.cov(k, j) = c;
        }

    if (checks) {
        const int next[3] = {1, 2, 0};
        checks->commutator = 0.0;
        for (int j = 0; j < 3; ++j) {
            const int k = next[j];
            const int l = next[k];
            const double dev = std::fabs(sec[j][k].imag() - m.mean[l]);
            checks->commutator =
                std::max(checks->commutator, dev / std::max(1.0, std::fabs(m.mean[l])));
        }
        const double lhs = (sec[0][0] + sec[1][1] + sec[2][2]).real();
        const double rhs = m.mean0_sq + 2.0 * m.mean0;
        checks->casimir = std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs));
    }
    return m;
}

namespace {

// Ladder applications on the two-mode matrix psi[nx][ny].
Eigen::MatrixXcd ax_apply(const Eigen::MatrixXcd& p) {
    const int d = static_cast<int>(p.rows());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 0; n + 1 < d; ++n) out.row(n) = std::sqrt(double(n + 1)) * p.row(n + 1);
    return out;
}
Eigen::MatrixXcd axd_apply(const Eigen::MatrixXcd& p) {
    const int d = static_cast<int>(p.rows());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 1; n < d; ++n) out.row(n) = std::sqrt(double(n)) * p.row(n - 1);
    return out;
}
Eigen::MatrixXcd ay_apply(const Eigen::MatrixXcd& p) {
    const int d = static_cast<int>(p.cols());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int m = 0; m + 1 < d; ++m) out.col(m) = std::sqrt(double(m + 1)) * p.col(m + 1);
    return out;
}
Eigen::MatrixXcd ayd_apply(const Eigen::MatrixXcd& p) {
    const int d = static_cast<int>(p.cols());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int m = 1; m < d; ++m) out.col(m) = std::sqrt(double(m)) * p.col(m - 1);
    return out;
}

cd mat_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a.conjugate().cwiseProduct(b)).sum();
}

}  // namespace

StokesMoments full_two_mode_moments(const InputBeam& beam, double kt, int dim,
                                    OracleChecks* checks) {
    require_kt(kt);
    if (dim < 2 || dim > 32) throw InvalidInput("full two-mode path supports 2 <= dim <= 32");
    if (beam.intensity_x() > 4.0 || beam.intensity_y() > 4.0)
        throw InvalidInput("full two-mode path supports intensities <= 4");

    const Eigen::VectorXcd cx = raw_coherent(beam.alpha(), dim);
    const Eigen::VectorXcd cy = raw_coherent(beam.beta(), dim);
    const double leak = 1.0 - cx.squaredNorm() * cy.squaredNorm();
    if (!(leak < 1e-10)) throw TruncationError("two-mode coherent state leaks at this dimension");

    const Eigen::MatrixXcd u = propagator_columns(kt, dim, dim);
    const Eigen::MatrixXcd psi = u * (cx * cy.transpose());

    const Eigen::MatrixXcd ax_psi = ax_apply(psi);
    const Eigen::MatrixXcd ay_psi = ay_apply(psi);
    const Eigen::MatrixXcd nx_psi = axd_apply(ax_psi);
    const Eigen::MatrixXcd ny_psi = ayd_apply(ay_psi);

    std::array<Eigen::MatrixXcd, 3> s_psi;
    s_psi[0] = nx_psi - ny_psi;
    const Eigen::MatrixXcd cross1 = axd_apply(ay_psi);  // ax^dag ay psi
    const Eigen::MatrixXcd cross2 = ayd_apply(ax_psi);  // ay^dag ax psi
    s_psi[1] = cross1 + cross2;
    s_psi[2] = -kI * cross1 + kI * cross2;
    const Eigen::MatrixXcd s0_psi = nx_psi + ny_psi;

    StokesMoments m;
    m.mean0 = mat_inner(psi, s0_psi).real();
    m.mean0_sq = mat_inner(s0_psi, s0_psi).real();
    cd sec[3][3];
    for (int j = 0; j < 3; ++j) {
        m.mean[j] = mat_inner(psi, s_psi[j]).real();
        for (int k = 0; k < 3; ++k) sec[j][k] = mat_inner(s_psi[j], s_psi[k]);
    }
    for (int j = 0; j < 3; ++j)
        for (int k = j; k < 3; ++k) {
            const double c = 0.5 * (sec[j][k] + sec[k][j]).real() - m.mean[j] * m.mean[k];
            m.cov(j, k) = c;
            m.cov(k, j) = c;
        }

    if (checks) {
        const int next[3] = {1, 2, 0};
        checks->commutator = 0.0;
        for (int j = 0; j < 3; ++j) {
            const int k = next[j];
            const int l = next[k];
            const double dev = std::fabs(sec[j][k].imag() - m.mean[l]);
            checks->commutator =
                std::max(checks->commutator, dev / std::max(1.0, std::fabs(m.mean[l])));
        }
        const double lhs = (sec[0][0] + sec[1][1] + sec[2][2]).real();
        const double rhs = m.mean0_sq + 2.0 * m.mean0;
        checks->casimir = std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs));
    }
    return m;
}

ConvergenceReport truncation_check(const std::function<std::vector<double>(int)>& computation,
                                   int start_dim, const TruncationPolicy& policy_in) {
    const TruncationPolicy policy = validate_policy(policy_in);
    int d = std::max(start_dim, 2);
    if (d > policy.max_dim) throw NonConverged("starting dimension already above max_dim");
    std::vector<double> lo = computation(d);
    for (;;) {
        const long next = static_cast<long>(d) * policy.growth_factor;
        if (next > policy.max_dim)
            throw NonConverged("dimension cap reached before drift fell below tolerance");
        const int d2 = static_cast<int>(next);
        std::vector<double> hi = computation(d2);
        if (lo.size() != hi.size()) throw InvalidInput("computation changed output shape");
        double drift = 0.0;
        for (size_t i = 0; i < lo.size(); ++i) {
            const double scale = std::max({1.0, std::fabs(lo[i]), std::fabs(hi[i])});
            drift = std::max(drift, std::fabs(lo[i] - hi[i]) / scale);
        }
        if (drift < 1e-8) return ConvergenceReport{d, d2, drift, true};
        d = d2;
        lo = std::move(hi);
    }
}

int oracle_start_dim(double intensity_x, double kt) {
    const double mean = std::exp(4.0 * kt) * (intensity_x + 1.0);
    // Squeezed tails decay only like tanh(2kt)^n, so larger kt needs flat
    // padding on top of the Gaussian-width estimate.
    const double vac_pad = kt <= 0.25 ? 0.0 : (kt <= 0.6 ? 96.0 : 192.0);
    const double want = mean + 10.0 * std::sqrt(mean) + 24.0 + vac_pad;
    const int d = static_cast<int>(std::ceil(want / 64.0)) * 64;
    return std::max(d, 64);
}

OracleResult oracle_stokes_moments(const InputBeam& beam, double kt,
                                   const TruncationPolicy& policy) {
    OracleResult result;
    auto compute = [&](int dim) {
        FockState x0 = build_coherent(beam.alpha(), dim, policy.leak_tol);
        FockState xt;
        xt.amps = apply_propagator(kt, x0.amps);
        xt.norm_leakage = x0.norm_leakage;
        result.moments = stokes_moments_product(xt, beam.beta(), &result.checks);
        const StokesMoments& m = result.moments;
        return std::vector<double>{m.mean0,     m.mean0_sq, m.mean[0],  m.mean[1],
                                   m.mean[2],   m.cov(0, 0), m.cov(1, 1), m.cov(2, 2),
                                   m.cov(0, 1), m.cov(0, 2), m.cov(1, 2)};
    };
    const int start = std::max(oracle_start_dim(beam.intensity_x(), kt),
                               min_coherent_dim(beam.alpha()));
    result.convergence = truncation_check(compute, start, policy);
    return result;  // moments hold the values from the last (largest) dimension
}

CornerReport heisenbergcorner_defect_impl(double kt, int block, const TruncationPolicy& policy) {
    // Start just above the compared block and let the tail certificate demand
    // growth; the per-dimension factorization is kt-independent and cached, so
    // failed attempts at small dimensions cost little.
    int dim = 256;
    while (dim < 2 * (block + 16)) dim *= 2;
    for (;;) {
        if (dim > policy.max_dim)
            throw NonConverged("Heisenberg corner check exceeded the dimension cap");
        const Eigen::MatrixXcd cols = propagator_columns(kt, dim, block);
        // Boundary-support certificate for the compared columns. The corner
        // entry (j,k) picks up at most sqrt(tail_j * tail_k * dim) from the
        // truncation boundary, so a squared-norm tail of 1e-13 keeps the
        // contamination below ~1e-11 — well under the defect scale of
        // interest — without paying for the next doubling's eigensolve.
        const int margin = std::max(dim / 16, 8);
        double tail = 0.0;
        for (int j = 0; j < block; ++j)
            tail = std::max(tail, cols.col(j).tail(margin).squaredNorm());
        if (tail > 1e-13) {
            dim *= 2;
            continue;
        }
        // corner = U^dag a U restricted to the leading block.
        Eigen::MatrixXcd a_cols = Eigen::MatrixXcd::Zero(dim, block);
        for (int n = 0; n + 1 < dim; ++n)
            a_cols.row(n) = std::sqrt(double(n + 1)) * cols.row(n + 1);
        const Eigen::MatrixXcd corner = cols.adjoint() * a_cols;

        const HeisenbergCoeffs hc = heisenberg_coeffs(kt);
        Eigen::MatrixXcd ref = Eigen::MatrixXcd::Zero(block, block);
        for (int j = 0; j < block; ++j) {
            if (j >= 1) ref(j - 1, j) = cd(hc.c * std::sqrt(double(j)), 0.0);
            if (j + 1 < block) ref(j + 1, j) = cd(0.0, -hc.s * std::sqrt(double(j + 1)));
        }
        CornerReport rep;
        rep.block = block;
        rep.dim_used = dim;
        rep.tail_mass = tail;
        rep.max_abs_defect = (corner - ref).cwiseAbs().maxCoeff();
        return rep;
    }
}

CornerReport heisenberg_corner_defect(double kt, int block, const TruncationPolicy& policy_in) {
    require_kt(kt);
    const TruncationPolicy policy = validate_policy(policy_in);
    if (block < 2) throw InvalidInput("corner block must be >= 2");
    return heisenbergcorner_defect_impl(kt, block, policy);
}

double composition_defect(double kt1, double kt2, int block, int dim) {
    require_kt(kt1);
    require_kt(kt2);
    if (block < 1 || block > dim) throw InvalidInput("block must lie in [1, dim]");
    const Eigen::MatrixXcd c2 = propagator_columns(kt2, dim, block);
    Eigen::MatrixXcd c12(dim, block);
    for (int j = 0; j < block; ++j) c12.col(j) = apply_propagator(kt1, c2.col(j));
    const Eigen::MatrixXcd direct = propagator_columns(kt1 + kt2, dim, block);
    return (c12.topRows(block) - direct.topRows(block)).cwiseAbs().maxCoeff();
}

}  // namespace stsq

#pragma once

// Truncated-Fock-space verification engine. Everything here is numerical
// linear algebra on explicit state vectors/matrices — no closed-form moment
// expressions — so it can arbitrate the analytic engine independently.
//
// The interaction generator a^dag^2 + a^2 couples only levels of equal parity,
// so the propagator factorizes into two real symmetric tridiagonal blocks.
// Each block is diagonalized once per dimension (the factorization does not
// depend on kt) and cached; states evolve via two small dense multiplies per
// parity.

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "stsq/types.hpp"

namespace stsq {

struct FockState {
    Eigen::VectorXcd amps;
    double norm_leakage = 0.0;  // 1 - |psi|^2 at construction
    int dim() const { return static_cast<int>(amps.size()); }
};

struct TruncationPolicy {
    double leak_tol = 1e-10;
    int growth_factor = 2;
    int max_dim = 16384;
};

TruncationPolicy validate_policy(TruncationPolicy p);

// Smallest dimension accepted for a coherent state of amplitude alpha.
int min_coherent_dim(cd alpha);

// Coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!) up to dim levels.
FockState build_coherent(cd alpha, int dim, double leak_tol = 1e-10);

// psi -> exp(-i kt (a^dag^2 + a^2)) psi at the state's dimension.
Eigen::VectorXcd apply_propagator(double kt, const Eigen::VectorXcd& psi);

// First ncols columns of the propagator at the given dimension.
Eigen::MatrixXcd propagator_columns(double kt, int dim, int ncols);

// Full propagator matrix with a unitarity validation on the interior block
// (rows/cols below dim - margin); intended for small dimensions.
Eigen::MatrixXcd squeeze_propagator(double kt, int dim);

// max |(U^dag U - I)_{ij}| over i,j < dim - margin.
double unitarity_defect_interior(const Eigen::MatrixXcd& u, int margin);

// Single-mode normal-ordered moments <a^dag^p a^q> for p,q <= 2, computed as
// inner products of repeatedly lowered copies of the state.
using ModeMomentTable = std::array<std::array<cd, 3>, 3>;
ModeMomentTable mode_moment_table(const FockState& state);

// Operator-identity defects measured on the oracle state: the largest
// scale-floored deviation of Im<S_j S_k> from the cyclic commutator mean, and
// of <S1^2+S2^2+S3^2> from <S0^2> + 2<S0>.
struct OracleChecks {
    double commutator = 0.0;
    double casimir = 0.0;
};

// Stokes moments of (evolved x state) x (coherent beta), assembled by
// expanding each S_j / S_j S_k into per-mode ladder words.
StokesMoments stokes_moments_product(const FockState& x_state, cd beta,
                                     OracleChecks* checks = nullptr);

// Independent small-instance arbiter: explicit two-mode state matrix, the
// propagator applied to the x index, and moments via operator application.
// Requires |alpha|^2, |beta|^2 <= 4 and dim <= 32.
StokesMoments full_two_mode_moments(const InputBeam& beam, double kt, int dim,
                                    OracleChecks* checks = nullptr);

struct ConvergenceReport {
    int dim_low = 0;
    int dim_high = 0;
    double drift = 0.0;
    bool passed = false;
};

// Runs `computation` at increasing dimensions until the results at dim and
// growth_factor*dim agree within 1e-8 scale-floored relative drift.
ConvergenceReport truncation_check(const std::function<std::vector<double>(int)>& computation,
                                   int start_dim, const TruncationPolicy& policy);

// Physics-guided starting dimension for an evolved coherent x mode.
int oracle_start_dim(double intensity_x, double kt);

// Convergence-certified oracle moments for a beam at interaction time kt.
struct OracleResult {
    StokesMoments moments;
    OracleChecks checks;
    ConvergenceReport convergence;
};
OracleResult oracle_stokes_moments(const InputBeam& beam, double kt,
                                   const TruncationPolicy& policy = TruncationPolicy{});

// Compares the leading block of U^dag a U against c a - i s a^dag, with U
// built at a working dimension large enough that the compared columns carry
// no boundary support (certified by their tail mass).
struct CornerReport {
    double max_abs_defect = 0.0;
    int block = 0;
    int dim_used = 0;
    double tail_mass = 0.0;
};
CornerReport heisenberg_corner_defect(double kt, int block,
                                      const TruncationPolicy& policy = TruncationPolicy{});

// max |(U(kt1) U(kt2) - U(kt1+kt2))_{ij}| over the leading block.
double composition_defect(double kt1, double kt2, int block, int dim);

}  // namespace stsq

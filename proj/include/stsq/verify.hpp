#pragma once

// Arbitration harness: sweeps the closed-form kernel against the truncated
// Fock oracle over a standard parameter grid, measures operator-identity and
// uncertainty-relation defects, and settles each disputed printed formula with
// oracle-side numeric evidence.

#include <string>
#include <vector>

#include "stsq/fock.hpp"
#include "stsq/report.hpp"
#include "stsq/types.hpp"

namespace stsq {

struct VerifyGrid {
    std::vector<double> intensities;  // used for both modes independently
    std::vector<double> phases;       // applied jointly: phase_x = phase_y
    std::vector<double> kts;
    int size() const {
        return static_cast<int>(intensities.size() * intensities.size() * phases.size() *
                                kts.size());
    }
};

VerifyGrid standard_verify_grid();

struct QuantityDeviation {
    std::string name;
    double max_dev = 0.0;
    double ix = 0.0, iy = 0.0, phase = 0.0, kt = 0.0;  // cell where the max occurred
};

// One disputed printed formula, arbitrated numerically. `oracle_value` is the
// reference measurement, `adopted_value`/`printed_value` the two candidate
// readings evaluated at the probe (see `note` when the comparison is indirect,
// e.g. measuring the factor at two candidate times).
struct LedgerRow {
    std::string name;
    std::string probe;
    double oracle_value = 0.0;
    double adopted_value = 0.0;
    double adopted_dev = 0.0;
    double printed_value = 0.0;
    double printed_dev = 0.0;
    bool adopted_agrees = false;
    std::string note;
};

struct VerificationReport {
    int points_total = 0;
    int points_converged = 0;
    std::vector<std::string> nonconverged_cells;
    std::vector<QuantityDeviation> deviations;
    double max_deviation = 0.0;
    double max_uncertainty_violation = 0.0;   // positive means violated
    double max_commutator_defect = 0.0;       // measured on oracle states
    double max_casimir_defect = 0.0;
    double max_engine_commutator = 0.0;       // symbolic-kernel identity defects
    double max_engine_casimir = 0.0;
    double tolerance = 1e-8;
    std::vector<LedgerRow> ledger;
    bool passed = false;
    std::string text;  // rendered table, one self-contained report
};

VerificationReport run_verification(const TruncationPolicy& policy = TruncationPolicy{},
                                    double tolerance = 1e-8);

Json verification_to_json(const VerificationReport& r);

}  // namespace stsq

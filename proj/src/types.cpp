#include "stsq/types.hpp"

#include <algorithm>

namespace stsq {

InputBeam validate_beam(cd alpha, cd beta) {
    auto finite = [](cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    if (!finite(alpha) || !finite(beta)) throw InvalidInput("beam amplitudes must be finite");
    return InputBeam(alpha, beta);
}

InteractionParams validate_interaction(double kt, std::optional<double> k) {
    if (!std::isfinite(kt) || kt < 0.0) throw InvalidInput("kt must be finite and >= 0");
    if (k.has_value() && (!std::isfinite(*k) || *k <= 0.0))
        throw InvalidInput("coupling k must be finite and > 0");
    return InteractionParams{kt, k};
}

double axis_complement_max(const StokesMoments& m, const Axis& axis) {
    double total = m.mean.squaredNorm();
    double along = axis.n().dot(m.mean);
    double rad = total - along * along;
    return std::sqrt(std::max(rad, 0.0));
}

}  // namespace stsq

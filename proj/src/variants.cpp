#include "stsq/variants.hpp"

#include <cmath>

#include "stsq/analytic.hpp"

namespace stsq::variants {

namespace {
struct Parts {
    double c, s, ix, iy, sin2phx, sin2phy;
};
Parts parts(const InputBeam& beam, double kt) {
    const HeisenbergCoeffs hc = heisenberg_coeffs(kt);
    return Parts{hc.c,
                 hc.s,
                 beam.intensity_x(),
                 beam.intensity_y(),
                 std::sin(2.0 * beam.phase_x()),
                 std::sin(2.0 * beam.phase_y())};
}
}  // namespace

double mean_s1_printed(const InputBeam& beam, double kt) {
    const Parts p = parts(beam, kt);
    return (p.c * p.c + p.s * p.s) * p.ix - p.iy - 2.0 * p.c * p.s * p.ix * p.sin2phx;
}

double v1_printed(const InputBeam& beam, double kt) {
    const Parts p = parts(beam, kt);
    const double c2 = p.c * p.c, s2 = p.s * p.s;
    return (c2 + s2) * p.ix + 2.0 * c2 * s2 * (2.0 * p.ix + 1.0) + p.iy -
           4.0 * p.c * p.s * (c2 + s2) * p.ix * p.sin2phx;
}

double v2_printed(const InputBeam& beam, double kt) {
    const Parts p = parts(beam, kt);
    const double n = p.ix + p.iy;
    return p.c * p.c * n + p.s * p.s * (n + 1.0) -
           2.0 * p.c * p.s * (p.ix * p.sin2phx + p.iy * p.sin2phy);
}

double v3_printed(const InputBeam& beam, double kt) { return v2_printed(beam, kt); }

double v1_minus_printed_closed_form(const InputBeam& beam, double kt) {
    const Parts p = parts(beam, kt);
    return 2.0 * p.s * p.s * (p.c * p.c + p.s * p.s) * p.ix;
}

double v3_minus_v2_closed_form(const InputBeam& beam, double kt) {
    const Parts p = parts(beam, kt);
    return 4.0 * p.c * p.s * p.iy * p.sin2phy;
}

double phase_locked_y_printed(const InputBeam& beam, double kt) {
    const Parts p = parts(beam, kt);
    const double cms2 = (p.c - p.s) * (p.c - p.s);
    return cms2 * p.ix + p.iy + p.s * p.s;
}

double phase_locked_x_printed(const InputBeam& beam, double kt) {
    const Parts p = parts(beam, kt);
    const double cms2 = (p.c - p.s) * (p.c - p.s);
    return cms2 * p.ix - p.iy;
}

std::optional<std::pair<double, double>> window_printed(const InputBeam& beam) {
    const double ix = beam.intensity_x();
    const double iy = beam.intensity_y();
    const double disc = iy * iy - 4.0 * ix;
    if (disc <= 0.0) return std::nullopt;
    const double r = std::sqrt(disc);
    return std::make_pair(0.25 * std::log1p(2.0 * (iy - r)), 0.25 * std::log1p(2.0 * (iy + r)));
}

double optimal_factor_printed(double total_photons) {
    return 1.0 / std::sqrt(1.0 + total_photons * total_photons);
}

double partition_factor_printed(double total_photons, double chi) {
    const double n2 = total_photons * total_photons;
    const double root = std::sqrt(1.0 + n2);
    const double sinchi = std::sin(chi);
    return (root - 1.0) / (1.0 + n2 * sinchi * sinchi - root);
}

double equal_intensity_second_crossing_printed(double intensity) {
    return 0.25 * std::log1p(intensity);
}

bool squeezed_region_printed(double intensity_x, double intensity_y) {
    // Printed reading: the factor minimum exceeds 1 when |b|^2 > 2|a| — i.e.
    // that side is classified NOT squeezed.
    return !(intensity_y > 2.0 * std::sqrt(intensity_x));
}

double y_minus_x_claim_printed(double kt) { return 1.0 + std::exp(-4.0 * kt); }

double y_minus_x_closed_form(const InputBeam& beam, double kt) {
    return (1.0 + std::exp(-4.0 * kt)) * beam.intensity_y();
}

}  // namespace stsq::variants

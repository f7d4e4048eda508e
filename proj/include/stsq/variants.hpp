#pragma once

// Transcriptions of the source text's closed-form expressions, kept verbatim
// as regression references. Some of them disagree with the operator-algebra
// kernel (and with the numerical oracle); the verify command evaluates both
// sides and reports the deviations with numbers. Nothing in this header is
// used to produce primary results.

#include <optional>
#include <utility>

#include "stsq/types.hpp"

namespace stsq::variants {

// Mean of S1 as printed: (c^2+s^2)|a|^2 - |b|^2 - 2cs|a|^2 sin 2phx.
// The kernel additionally produces a spontaneous +s^2 term (visible at a=0).
double mean_s1_printed(const InputBeam& beam, double kt);

// Printed variances. V1 as printed opens with (c^2+s^2)|a|^2; the kernel's
// coefficient is (c^2+s^2)^2, so the printed form is short 2s^2(c^2+s^2)|a|^2.
// V2 as printed agrees with the kernel for all phases. V3 is printed identical
// to V2; the kernel gives V3 = V2 + 4cs|b|^2 sin 2phy.
double v1_printed(const InputBeam& beam, double kt);
double v2_printed(const InputBeam& beam, double kt);
double v3_printed(const InputBeam& beam, double kt);

// Kernel-side correction terms in closed form: V1 - V1_printed and V3 - V2.
double v1_minus_printed_closed_form(const InputBeam& beam, double kt);
double v3_minus_v2_closed_form(const InputBeam& beam, double kt);

// Phase-locked factor Y/|X| with the printed reading's ambiguous grouping:
// numerator with |b|^2 left outside the (c-s)^2 factor, denominator without
// the spontaneous s^2 term. The kernel forms are Y=(c-s)^2(|a|^2+|b|^2)+s^2
// and X=(c-s)^2|a|^2+s^2-|b|^2.
double phase_locked_y_printed(const InputBeam& beam, double kt);
double phase_locked_x_printed(const InputBeam& beam, double kt);

// Window endpoints as printed, with doubled coefficients inside the bracket:
// kt_{1,2} = 1/4 log[1 + 2|b|^2 -/+ 2 sqrt(|b|^4 - 4|a|^2)].
// The factor actually returns to 1 at 1/4 log[1 + |b|^2 -/+ sqrt(|b|^4 - 4|a|^2)].
std::optional<std::pair<double, double>> window_printed(const InputBeam& beam);

// Maximum-squeezing factor over the mode partition as printed: 1/sqrt(1+N^2).
// The closed-form minimum at |a|^2=0 gives 1/sqrt(1+N).
double optimal_factor_printed(double total_photons);

// Partition-sweep factor as printed (N^2 where the kernel has N):
// (sqrt(1+N^2)-1) / (1 + N^2 sin^2 chi - sqrt(1+N^2)).
double partition_factor_printed(double total_photons, double chi);

// Second crossing time at equal intensity as printed: 1/4 log(1+|a|^2);
// the general crossing formula specializes to 1/4 log(1+4|a|^2).
double equal_intensity_second_crossing_printed(double intensity);

// Region classification with the printed inequality direction
// ("factor minimum > 1 for |b|^2 > 2|a|"); measurement shows the opposite side.
bool squeezed_region_printed(double intensity_x, double intensity_y);

// Claimed gap "Y - |X| = 1 + e^{-4kt}" for X > 0; the kernel-derived gap is
// (1 + e^{-4kt}) |b|^2.
double y_minus_x_claim_printed(double kt);
double y_minus_x_closed_form(const InputBeam& beam, double kt);

}  // namespace stsq::variants

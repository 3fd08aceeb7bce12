#pragma once

#include "dmatch/quasipoly.hpp"

namespace dmatch {

// First imaginary-axis crossing of s^2 + chi2 s + z chi3 as tau grows.
struct CrossingPoint {
    double omega_c;   // rad/s
    double tau_cross; // s
};

// Closed-form first crossing: on s = j*omega the magnitude condition gives
// omega_c^2 = (-chi2^2 + sqrt(chi2^4 + 4 chi3^2)) / 2 and the phase condition
// tau_cross = atan2(chi2*omega_c, omega_c^2) / omega_c.
CrossingPoint crossing_point(double chi2, double chi3);

struct StabilityVerdict {
    bool stable;
    double margin_metric; // tau_cross - tau, in s
};

// Verdict for a p_a-shaped quasi-polynomial (s-degree 3, z-degree 1,
// factorable as (s + chi1)(s^2 + chi2 s + z chi3)): stable at tau = 0 by
// Routh, stable for tau strictly below the first crossing, unstable at and
// beyond it (marginal counts as not stable).
StabilityVerdict stability_verdict(const QuasiPoly& pa, double tau);

} // namespace dmatch

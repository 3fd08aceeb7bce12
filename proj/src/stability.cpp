#include "dmatch/stability.hpp"

#include <cmath>
#include <stdexcept>

#include "dmatch/errors.hpp"

namespace dmatch {

CrossingPoint crossing_point(double chi2, double chi3) {
    if (!(chi2 > 0.0) || !(chi3 > 0.0)) {
        throw std::invalid_argument("crossing_point requires chi2, chi3 > 0");
    }
    const double c2sq = chi2 * chi2;
    const double omega_sq = (-c2sq + std::sqrt(c2sq * c2sq + 4.0 * chi3 * chi3)) / 2.0;
    const double omega_c = std::sqrt(omega_sq);
    const double tau_cross = std::atan2(chi2 * omega_c, omega_sq) / omega_c;
    return CrossingPoint{omega_c, tau_cross};
}

StabilityVerdict stability_verdict(const QuasiPoly& pa, double tau) {
    if (tau < 0.0) {
        throw std::invalid_argument("stability_verdict requires tau >= 0");
    }
    if (pa.s_degree() != 3 || pa.z_degree() > 1) {
        throw ShapeError("expected s-degree 3 and z-degree <= 1");
    }
    const double lead = pa.coeff(3, 0);
    if (lead == 0.0) {
        throw ShapeError("missing s^3 term");
    }
    const double c2 = pa.coeff(2, 0) / lead;
    const double c1 = pa.coeff(1, 0) / lead;
    const double b1 = pa.coeff(1, 1) / lead;
    const double b0 = pa.coeff(0, 1) / lead;
    if (pa.coeff(0, 0) != 0.0 || pa.coeff(2, 1) != 0.0 || pa.coeff(3, 1) != 0.0) {
        throw ShapeError("coefficient pattern does not match (s+chi1)(s^2+chi2 s+z chi3)");
    }
    if (!(b1 > 0.0) || !(b0 > 0.0)) {
        throw ShapeError("delay-term coefficients must be positive");
    }
    // Recover the factorization (s + chi1)(s^2 + chi2 s + z chi3).
    const double chi1 = b0 / b1;
    const double chi2 = c2 - chi1;
    const double chi3 = b1;
    if (!(chi1 > 0.0) || !(chi2 > 0.0)
        || std::abs(c1 - chi1 * chi2) > 1e-9 * std::max(1.0, std::abs(c1))) {
        throw ShapeError("coefficients do not factor as (s+chi1)(s^2+chi2 s+z chi3)");
    }

    // Routh on the tau = 0 cubic s^3 + c2 s^2 + (c1 + b1) s + b0.
    const bool routh_ok = c2 > 0.0 && (c1 + b1) > 0.0 && b0 > 0.0 && c2 * (c1 + b1) > b0;

    // The (s + chi1) factor is delay-free Hurwitz; only the quadratic factor
    // can cross the imaginary axis.
    const double tau_cross = crossing_point(chi2, chi3).tau_cross;
    return StabilityVerdict{routh_ok && tau < tau_cross, tau_cross - tau};
}

} // namespace dmatch

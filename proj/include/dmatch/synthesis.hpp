#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmatch/quasipoly.hpp"

namespace dmatch {

// Free design parameters of the third control layer.
// Units: chi1, chi2 in 1/s; chi3 in 1/s^2; k2 in s.
struct ChiParams {
    double chi1;
    double chi2;
    double chi3;
    double k2;
};

struct ConstraintCheck {
    std::string name;
    bool pass;
    double margin; // signed distance to the constraint boundary, in the
                   // units of the constrained expression
};

struct ConstraintReport {
    std::vector<ConstraintCheck> checks;
    bool all_pass() const;
    std::string first_failure() const; // empty when all pass
};

// All derived controller gains. The derived entries satisfy exact algebraic
// identities: lambda12 = eta1 + mu0, lambda02 = eta1*mu0, rho0 = eta0/eta1,
// rho1 = eta0/(eta1*mu0), kappa = eta0/eta1, k1 = k2*chi1.
struct GainSet {
    double mu0;      // 1/s
    double eta0;     // 1/s^2
    double eta1;     // 1/s
    double kappa;    // dimensionless
    double k1;       // dimensionless
    double k2;       // s
    double lambda02; // 1/s^2
    double lambda12; // 1/s
    double rho0;     // dimensionless
    double rho1;     // s
    double lambda01; // 1/s^2  (linear-velocity channel, configured)
    double lambda11; // 1/s
};

// Desired closed-loop model H_m. Either an all-pole cascade of first-order
// lags given by time constants (unity DC gain) or an explicit s-only
// transfer function.
class ModelSpec {
  public:
    static ModelSpec from_time_constants(std::vector<double> tc);
    static ModelSpec from_tf(RationalTF h);

    // nullopt for explicit-TF models
    const std::optional<std::vector<double>>& time_constants() const {
        return time_constants_;
    }
    const RationalTF& tf() const { return tf_; }

    // Denominator s-coefficients, ascending.
    std::vector<double> den_coeffs() const;
    std::vector<double> num_coeffs() const;

  private:
    ModelSpec(std::optional<std::vector<double>> tc, RationalTF h);
    std::optional<std::vector<double>> time_constants_;
    RationalTF tf_;
};

struct DelayMargin {
    double t_c;     // s
    double tau_max; // s
};

// Defaults for the linear-velocity channel (critically damped, ~0.4 s
// settling).
inline constexpr double kDefaultLambda01 = 100.0; // 1/s^2
inline constexpr double kDefaultLambda11 = 20.0;  // 1/s

ConstraintReport validate_chi(const ChiParams& p);

GainSet derive_gains(const ChiParams& p,
                     double lambda01 = kDefaultLambda01,
                     double lambda11 = kDefaultLambda11);

// (s + chi1)(s^2 + chi2 s + z chi3), expanded.
QuasiPoly assemble_pa(const ChiParams& p);

DelayMargin compute_tau_max(const ChiParams& p);

// G(s,z) = (1 - k2*chi1)/(chi1*chi3) * p_a(s,z) * H_m(s).
// Requires n_d >= n_n + 3 and a stable H_m.
RationalTF build_precompensator(const ChiParams& p, const ModelSpec& model);

// H_{y,2} = 1 / [(s + mu0)(s^2 + eta1 s + eta0 z)]; also verifies that the
// same denominator results from the closed-loop equation coefficients
// (lambda, rho route), throwing GainInconsistency on mismatch.
RationalTF build_inner_tf(const GainSet& g);

// Roots of an s-polynomial with ascending coefficients (companion-matrix
// eigenvalues). Exposed for tests.
std::vector<std::complex<double>> polynomial_roots(std::span<const double> ascending);

} // namespace dmatch

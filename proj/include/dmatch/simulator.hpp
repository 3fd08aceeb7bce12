#pragma once

#include <complex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dmatch/delay_line.hpp"
#include "dmatch/synthesis.hpp"

namespace dmatch {

struct StepCommand {
    double base = 0.0;
    double amplitude = 0.0; // added at and after step_time
    double step_time = 0.0;
    double value(double t) const { return base + (t >= step_time ? amplitude : 0.0); }
};

// Wheel geometry and the plant-side coefficients of the preinstalled
// voltage law. The a coefficients are configuration inputs, not derived here.
struct PlantConfig {
    double r_w; // wheel radius, m
    double b_w; // half track, m
    double a11, a12, a13, a14, a15;
    double a21, a22, a23, a24, a25, a26;
};

struct Measurements {
    double psi1, psi2, psi3, psi4; // wheel speeds and accelerations, undelayed
    double psi5, psi6;             // orientation angle and rate, delayed by tau
};

struct Voltages {
    double u1, u2;
};

double layer3_command(double k1, double k2, double psi5, double psi6, double g_out);

// Deviation-coordinate form: the nominal-measurement terms of the full
// law vanish.
double layer2_command(const GainSet& g, double w_tilde2,
                      double y2_delayed, double y2dot_delayed);

Voltages layer1_voltages(const PlantConfig& cfg, const GainSet& g,
                         double w1, double w2,
                         double ytilde1, double ytilde1_dot,
                         double ytilde2_dot, double ytilde2_ddot);

// Reduced-mode measurement vector: wheel channels reconstructed from
// (y1, y2dot) via the wheel-mixing relations, angle channels read from the
// delay lines at t - tau.
Measurements measurement_map(const DelayLine& y2_line, const DelayLine& y2dot_line,
                             double y1, double y1dot, double y2dot, double y2ddot,
                             double r_w, double b_w, double t, double tau);

// State realization of the precompensator G(s,z): a controllable-canonical
// realization of H_m driven by r exposes q = H_m r and its first three
// derivatives (available since n_d >= n_n + 3); the delayed part of p_a is
// applied to stored samples of q and q'.
class GRealization {
  public:
    GRealization(const ChiParams& chi, const ModelSpec& model);

    int state_dim() const { return nd_; }
    std::vector<double> equilibrium_state(double r) const;

    struct Outputs {
        double q, q1, q2, q3;
    };
    Outputs outputs(std::span<const double> phi, double r) const;
    void derivatives(std::span<const double> phi, double r, std::span<double> dphi) const;

    // g(t) from the instantaneous q-derivatives and the delayed samples of
    // q and q'.
    double output(const Outputs& o, double q_delayed, double q1_delayed) const;

    // Frequency response computed from the realization coefficients; matches
    // the symbolic precompensator.
    std::complex<double> frequency_response(std::complex<double> s, double tau) const;

    double scale() const { return scale_; }

  private:
    std::vector<double> num_, den_; // ascending s-coefficients of H_m
    int nn_, nd_;
    double scale_;                // (1 - k2 chi1)/(chi1 chi3)
    double c2_, c1_, b1_, b0_;    // p_a = s^3 + c2 s^2 + c1 s + z (b1 s + b0)
};

struct SimScenario {
    ChiParams chi;
    GainSet gains;
    ModelSpec model;
    double tau = 0.1;     // s, constant equalized delay
    double h = 1e-4;      // s, integration step
    double horizon = 1.5; // s
    double ybar1 = 0.5;   // m/s, operating point
    double ybar2 = 0.5;   // rad
    StepCommand w1_cmd;
    StepCommand r_cmd;
    std::optional<PlantConfig> plant;
    // Initial state; defaults put the loop at the operating-point equilibrium.
    double y1_0, y1dot_0 = 0.0;
    double y2_0, y2dot_0 = 0.0, y2ddot_0 = 0.0;
};

// Scenario at the operating-point equilibrium with relative step commands
// applied at t = 0.
SimScenario make_step_scenario(const ChiParams& chi, const GainSet& gains,
                               const ModelSpec& model, double tau,
                               double ybar1 = 0.5, double ybar2 = 0.5,
                               double w1_step_frac = 0.1, double r_step_frac = 0.2);

struct Trajectory {
    std::vector<double> t, r, w1, w_tilde2, w2;
    std::vector<double> y1, y2, y2dot, psi5, psi6, g_out;
    std::vector<double> y2_ref, err;
    std::vector<double> u1, u2; // filled only when a plant config is present
    bool diverged = false;
    double diverged_at = 0.0;

    double max_abs_err() const;
};

// Fixed-step RK4 over the decoupled closed loop with delayed terms read from
// cubic-interpolated history buffers. Deterministic; a state excursion past
// 1e12 truncates the trajectory and sets the diverged flag.
Trajectory integrate_closed_loop(const SimScenario& sc);

// Calibration integrator for y'(t) = a y(t) + b y(t - tau) with constant
// pre-history y0. Returns (t, y) pairs on the uniform grid.
std::vector<std::pair<double, double>> integrate_scalar_dde(
    double a, double b, double tau, double y0, double h, double horizon);

// Closed-form step response of the all-pole model (partial fractions;
// repeated time constants take the confluent branch). Returns the response
// value at t for a step of the given amplitude at t = 0.
double analytic_reference(const ModelSpec& m, double amplitude, double t);

// Step response of lambda01 / (s^2 + lambda11 s + lambda01), the y1 channel.
double analytic_reference_second_order(double lambda01, double lambda11,
                                       double amplitude, double t);

} // namespace dmatch

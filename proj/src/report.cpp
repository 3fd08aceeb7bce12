#include "dmatch/report.hpp"

#include <cmath>
#include <ostream>

namespace dmatch {

RunReport synth_report(const ChiParams& chi, const ModelSpec& model,
                       double lambda01, double lambda11) {
    RunReport r;
    r.constraints = validate_chi(chi);
    if (!r.constraints.all_pass()) {
        return r;
    }
    r.gains = derive_gains(chi, lambda01, lambda11);
    const auto margin = compute_tau_max(chi);
    r.t_c = margin.t_c;
    r.tau_max = margin.tau_max;
    const auto crossing = crossing_point(chi.chi2, chi.chi3);
    r.omega_c = crossing.omega_c;
    r.tau_cross = crossing.tau_cross;
    r.precompensator = tf_properness(model.tf());
    return r;
}

TrajectorySummary summarize_trajectory(const Trajectory& traj) {
    TrajectorySummary s;
    s.diverged = traj.diverged;
    s.diverged_at = traj.diverged_at;
    if (traj.t.empty()) {
        return s;
    }
    s.y1_final = traj.y1.back();
    s.y2_final = traj.y2.back();
    s.max_matching_error = traj.max_abs_err();
    // Settling: last time |y2 - r_final| exceeds 2% of the command step.
    const double target = traj.r.back();
    const double step = std::abs(traj.r.back() - traj.r.front()) > 0.0
                            ? std::abs(traj.r.back() - traj.r.front())
                            : std::abs(target);
    const double band = 0.02 * (step > 0.0 ? step : 1.0);
    double settle = 0.0;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        if (std::abs(traj.y2[i] - target) > band) {
            settle = traj.t[i];
        }
    }
    s.settling_time = settle;
    return s;
}

void print_report(std::ostream& os, const RunReport& report) {
    const auto flags = os.flags();
    const auto old_precision = os.precision(17);

    os << "constraints:\n";
    for (const auto& c : report.constraints.checks) {
        os << "  " << (c.pass ? "pass" : "FAIL") << "  " << c.name
           << "  (margin " << c.margin << ")\n";
    }
    if (!report.constraints.all_pass()) {
        os.precision(old_precision);
        os.flags(flags);
        return;
    }
    const GainSet& g = report.gains;
    os << "gains:\n"
       << "  mu0      = " << g.mu0 << "  # 1/s\n"
       << "  eta0     = " << g.eta0 << "  # 1/s^2\n"
       << "  eta1     = " << g.eta1 << "  # 1/s\n"
       << "  kappa    = " << g.kappa << "\n"
       << "  k1       = " << g.k1 << "\n"
       << "  k2       = " << g.k2 << "  # s\n"
       << "  lambda02 = " << g.lambda02 << "  # 1/s^2\n"
       << "  lambda12 = " << g.lambda12 << "  # 1/s\n"
       << "  rho0     = " << g.rho0 << "\n"
       << "  rho1     = " << g.rho1 << "  # s\n"
       << "  lambda01 = " << g.lambda01 << "  # 1/s^2\n"
       << "  lambda11 = " << g.lambda11 << "  # 1/s\n";
    os << "delay margin:\n"
       << "  T_c       = " << report.t_c << "  # s\n"
       << "  tau_max   = " << report.tau_max << "  # s\n"
       << "  omega_c   = " << report.omega_c << "  # rad/s\n"
       << "  tau_cross = " << report.tau_cross << "  # s\n";
    os << "precompensator:\n"
       << "  n_n = " << report.precompensator.n_n
       << ", n_d = " << report.precompensator.n_d
       << ", proper (n_d >= n_n + 3): "
       << (report.precompensator.precompensator_ok ? "yes" : "NO") << "\n";
    for (const auto& v : report.verdicts) {
        os << "verdict: tau = " << v.tau << " s -> "
           << (v.stable ? "stable" : "unstable")
           << " (margin " << v.margin_metric << " s)\n";
    }
    if (report.trajectory) {
        const auto& t = *report.trajectory;
        os << "trajectory:\n";
        if (t.diverged) {
            os << "  DIVERGED at t = " << t.diverged_at << " s\n";
        }
        os << "  y1 final            = " << t.y1_final << "\n"
           << "  y2 final            = " << t.y2_final << "\n"
           << "  max matching error  = " << t.max_matching_error << "\n"
           << "  settling time (2%)  = " << t.settling_time << "  # s\n";
    }
    if (!report.csv_path.empty()) {
        os << "csv: " << report.csv_path << "\n";
    }
    os.precision(old_precision);
    os.flags(flags);
}

} // namespace dmatch

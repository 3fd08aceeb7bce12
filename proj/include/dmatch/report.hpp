#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dmatch/simulator.hpp"
#include "dmatch/stability.hpp"
#include "dmatch/synthesis.hpp"

namespace dmatch {

struct TrajectorySummary {
    double y1_final = 0.0;
    double y2_final = 0.0;
    double max_matching_error = 0.0;
    double settling_time = 0.0; // 2% of the r step amplitude
    bool diverged = false;
    double diverged_at = 0.0;
};

struct TauVerdict {
    double tau;
    bool stable;
    double margin_metric;
};

struct RunReport {
    ConstraintReport constraints;
    GainSet gains{};
    double t_c = 0.0;
    double tau_max = 0.0;
    double omega_c = 0.0;
    double tau_cross = 0.0;
    PropernessReport precompensator{};
    std::vector<TauVerdict> verdicts;
    std::optional<TrajectorySummary> trajectory;
    std::string csv_path;
};

// Synthesis-level report (constraints, gains, margins, precompensator
// degrees); no simulation.
RunReport synth_report(const ChiParams& chi, const ModelSpec& model,
                       double lambda01 = kDefaultLambda01,
                       double lambda11 = kDefaultLambda11);

TrajectorySummary summarize_trajectory(const Trajectory& traj);

// Values are printed with full precision; every number comes straight from
// a library-level result.
void print_report(std::ostream& os, const RunReport& report);

} // namespace dmatch

#pragma once

#include <filesystem>
#include <string>

#include "dmatch/simulator.hpp"

namespace dmatch {

// Fixed column order: t, r, w1, w_tilde2, w2, y1, y2, y2dot, psi5, psi6,
// g_out, y2_ref, err. Values are written with 17 significant digits so a
// round-trip reproduces the doubles exactly.
std::string trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

} // namespace dmatch

#include "dmatch/csv.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace dmatch {

namespace {

constexpr const char* kHeader = "t,r,w1,w_tilde2,w2,y1,y2,y2dot,psi5,psi6,g_out,y2_ref,err";

std::array<const std::vector<double>*, 13> columns(const Trajectory& t) {
    return {&t.t, &t.r, &t.w1, &t.w_tilde2, &t.w2, &t.y1, &t.y2,
            &t.y2dot, &t.psi5, &t.psi6, &t.g_out, &t.y2_ref, &t.err};
}

std::array<std::vector<double>*, 13> columns(Trajectory& t) {
    return {&t.t, &t.r, &t.w1, &t.w_tilde2, &t.w2, &t.y1, &t.y2,
            &t.y2dot, &t.psi5, &t.psi6, &t.g_out, &t.y2_ref, &t.err};
}

void format_value(std::string& out, double v) {
    char buf[40];
    const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

} // namespace

std::string trajectory_csv(const Trajectory& traj) {
    const auto cols = columns(traj);
    std::string out = kHeader;
    out.push_back('\n');
    const std::size_t rows = traj.t.size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c > 0) {
                out.push_back(',');
            }
            format_value(out, (*cols[c])[r]);
        }
        out.push_back('\n');
    }
    return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open CSV for writing: " + path.string());
    }
    out << trajectory_csv(traj);
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open CSV for reading: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw std::runtime_error("unexpected CSV header in " + path.string());
    }
    Trajectory traj;
    auto cols = columns(traj);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(row, cell, ',')) {
            if (c >= cols.size()) {
                throw std::runtime_error("too many CSV columns");
            }
            cols[c]->push_back(std::stod(cell));
            ++c;
        }
        if (c != cols.size()) {
            throw std::runtime_error("too few CSV columns");
        }
    }
    return traj;
}

} // namespace dmatch

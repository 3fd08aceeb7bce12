#pragma once

#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>

namespace dmatch {

// Distance between two doubles in units in the last place. Returns a large
// value for NaN or mixed-sign pairs that are not both (near) zero.
inline std::uint64_t ulp_distance(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    if (a == b) {
        return 0;
    }
    auto ordered = [](double x) -> std::int64_t {
        auto bits = std::bit_cast<std::int64_t>(x);
        return bits < 0 ? std::numeric_limits<std::int64_t>::min() - bits : bits;
    };
    const std::int64_t ia = ordered(a);
    const std::int64_t ib = ordered(b);
    return ia > ib ? static_cast<std::uint64_t>(ia) - static_cast<std::uint64_t>(ib)
                   : static_cast<std::uint64_t>(ib) - static_cast<std::uint64_t>(ia);
}

inline bool within_ulps(double a, double b, std::uint64_t ulps) {
    return ulp_distance(a, b) <= ulps;
}

} // namespace dmatch

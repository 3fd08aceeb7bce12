#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "dmatch/errors.hpp"
#include "dmatch/stability.hpp"
#include "dmatch/synthesis.hpp"

using namespace dmatch;

namespace {

const ChiParams kChi{1.42662, 217.2061, 676.2171, 0.1};

ChiParams random_chi(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> chi1_dist(0.1, 5.0);
    std::uniform_real_distribution<double> log_chi2(std::log(1.0), std::log(300.0));
    std::uniform_real_distribution<double> frac(0.05, 0.9);
    std::uniform_real_distribution<double> k2_dist(-0.5, 0.5);
    while (true) {
        ChiParams p{};
        p.chi1 = chi1_dist(rng);
        p.chi2 = std::exp(log_chi2(rng));
        p.chi3 = frac(rng) * p.chi2 * p.chi2 / 4.0;
        p.k2 = k2_dist(rng) / p.chi1;
        if (validate_chi(p).all_pass()) {
            return p;
        }
    }
}

} // namespace

TEST_CASE("crossing_point design-point fixture") {
    const auto cp = crossing_point(kChi.chi2, kChi.chi3);
    CHECK(cp.omega_c == doctest::Approx(3.1129312853767455).epsilon(1e-13));
    CHECK(cp.tau_cross == doctest::Approx(0.4999999908641951).epsilon(1e-13));
    // Magnitude condition chi3^2 = w^4 + chi2^2 w^2.
    const double lhs = kChi.chi3 * kChi.chi3;
    const double rhs = std::pow(cp.omega_c, 4) + kChi.chi2 * kChi.chi2 * cp.omega_c * cp.omega_c;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * lhs);
}

TEST_CASE("crossing_point confirmed by dense grid sweep") {
    const auto cp = crossing_point(kChi.chi2, kChi.chi3);
    // Sweep |p_c2(jw, e^{-jw tau})| over an (omega, tau) grid and locate the
    // minimizing pair; it must bracket the closed-form crossing.
    double best = 1e300;
    double best_tau = 0.0;
    double best_w = 0.0;
    const int nw = 10000;
    const double w_lo = std::log(1e-3);
    const double w_hi = std::log(10.0 * kChi.chi2);
    const double dtau = cp.tau_cross / 1000.0;
    for (double tau = cp.tau_cross * 0.9; tau <= cp.tau_cross * 1.1; tau += dtau) {
        for (int i = 0; i < nw; ++i) {
            const double w = std::exp(w_lo + (w_hi - w_lo) * i / (nw - 1));
            const std::complex<double> s{0.0, w};
            const auto v = s * s + kChi.chi2 * s + kChi.chi3 * std::exp(-s * tau);
            if (std::abs(v) < best) {
                best = std::abs(v);
                best_tau = tau;
                best_w = w;
            }
        }
    }
    CHECK(std::abs(best_tau - cp.tau_cross) <= 2.0 * dtau);
    CHECK(best_w == doctest::Approx(cp.omega_c).epsilon(1e-3));
    CHECK(best <= 1e-2 * kChi.chi3);
}

TEST_CASE("crossing residual is small at the closed-form point") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
        const auto p = random_chi(rng);
        const auto cp = crossing_point(p.chi2, p.chi3);
        const std::complex<double> s{0.0, cp.omega_c};
        const auto v = s * s + p.chi2 * s + p.chi3 * std::exp(-s * cp.tau_cross);
        REQUIRE(std::abs(v) <= 1e-8 * p.chi3);
    }
}

TEST_CASE("tau_cross grows as chi3 shrinks") {
    const double chi2 = kChi.chi2;
    double prev = 0.0;
    for (double scale : {10.0, 1.0, 0.1}) {
        const double chi3 = scale * chi2 * chi2 / 100.0;
        const double tc = crossing_point(chi2, chi3).tau_cross;
        CHECK(tc > prev);
        prev = tc;
    }
}

TEST_CASE("constructed surd case chi3 = sqrt(2) chi2^2 gives omega_c = chi2") {
    // Standalone oracle check, ignoring the synthesis constraints.
    const double chi2 = 3.7;
    const double chi3 = std::sqrt(2.0) * chi2 * chi2;
    const auto cp = crossing_point(chi2, chi3);
    CHECK(cp.omega_c == doctest::Approx(chi2).epsilon(1e-12));
}

TEST_CASE("crossing_point rejects non-positive input") {
    CHECK_THROWS_AS(crossing_point(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(crossing_point(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("stability_verdict on the design-point quasi-polynomial") {
    const auto pa = assemble_pa(kChi);
    CHECK(stability_verdict(pa, 0.0).stable);
    CHECK(stability_verdict(pa, 0.45).stable);
    CHECK_FALSE(stability_verdict(pa, 0.55).stable);

    const double tau_cross = crossing_point(kChi.chi2, kChi.chi3).tau_cross;
    CHECK_FALSE(stability_verdict(pa, tau_cross).stable); // marginal is unstable
    CHECK(stability_verdict(pa, 0.1).margin_metric
          == doctest::Approx(tau_cross - 0.1).epsilon(1e-12));
}

TEST_CASE("stability_verdict rejects non-p_a shapes") {
    QuasiPoly wrong;
    wrong.set(2, 0, 1.0);
    wrong.set(0, 1, 1.0);
    CHECK_THROWS_AS(stability_verdict(wrong, 0.1), ShapeError);

    QuasiPoly deep = assemble_pa(kChi);
    deep.set(0, 2, 1.0);
    CHECK_THROWS_AS(stability_verdict(deep, 0.1), ShapeError);

    CHECK_THROWS_AS(stability_verdict(assemble_pa(kChi), -0.1), std::invalid_argument);
}

TEST_CASE("margin formula never exceeds the first crossing") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 2000; ++i) {
        const auto p = random_chi(rng);
        const auto m = compute_tau_max(p);
        const auto cp = crossing_point(p.chi2, p.chi3);
        REQUIRE(m.tau_max <= cp.tau_cross * (1.0 + 1e-6));
        // Observed to be the same quantity up to roundoff.
        REQUIRE(std::abs(m.tau_max - cp.tau_cross) <= 1e-3 * cp.tau_cross);
    }
}

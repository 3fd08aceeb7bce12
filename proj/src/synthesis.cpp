#include "dmatch/synthesis.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dmatch/errors.hpp"
#include "dmatch/ulp.hpp"

namespace dmatch {

bool ConstraintReport::all_pass() const {
    for (const auto& c : checks) {
        if (!c.pass) {
            return false;
        }
    }
    return true;
}

std::string ConstraintReport::first_failure() const {
    for (const auto& c : checks) {
        if (!c.pass) {
            return c.name;
        }
    }
    return {};
}

ConstraintReport validate_chi(const ChiParams& p) {
    ConstraintReport r;
    r.checks.push_back({"chi1 > 0", p.chi1 > 0.0, p.chi1});
    r.checks.push_back({"chi2 > 0", p.chi2 > 0.0, p.chi2});
    r.checks.push_back({"chi3 > 0", p.chi3 > 0.0, p.chi3});

    const double quad_margin = p.chi2 * p.chi2 / 4.0 - p.chi3;
    r.checks.push_back({"chi3 < chi2^2/4", quad_margin > 0.0, quad_margin});

    // Root exclusion: chi1 must not coincide with a root of s^2 + chi2 s + chi3
    // at tau = 0. Checked with relative tolerance, exact inequality is not
    // verifiable in floats.
    if (quad_margin > 0.0 && p.chi2 > 0.0) {
        const double disc = std::sqrt(quad_margin * 4.0);
        const double root_hi = (p.chi2 + disc) / 2.0;
        const double root_lo = (p.chi2 - disc) / 2.0;
        const double d = std::min(std::abs(p.chi1 - root_hi), std::abs(p.chi1 - root_lo));
        const double rel = d / std::max({std::abs(p.chi1), root_hi, 1e-30});
        r.checks.push_back({"chi1 not a quadratic root", rel > 1e-9, d});
    } else {
        // Roots complex or undefined; exclusion is vacuous.
        r.checks.push_back({"chi1 not a quadratic root", true, std::abs(p.chi1)});
    }

    const double k2chi1 = p.k2 * p.chi1;
    r.checks.push_back({"k2*chi1 != 1", std::abs(1.0 - k2chi1) > 1e-12, 1.0 - k2chi1});
    return r;
}

namespace {
void require_valid(const ChiParams& p) {
    const auto report = validate_chi(p);
    if (!report.all_pass()) {
        throw ConstraintViolation("chi constraint failed: " + report.first_failure());
    }
}
} // namespace

GainSet derive_gains(const ChiParams& p, double lambda01, double lambda11) {
    require_valid(p);
    if (lambda01 <= 0.0 || lambda11 <= 0.0) {
        throw ConstraintViolation("lambda01 and lambda11 must be positive");
    }
    GainSet g{};
    g.mu0 = p.chi1;
    g.eta1 = p.chi2;
    g.eta0 = p.chi3 / (1.0 - p.k2 * p.chi1);
    g.k2 = p.k2;
    g.k1 = p.k2 * p.chi1;
    g.kappa = g.eta0 / g.eta1;
    g.lambda02 = g.eta1 * g.mu0;
    g.lambda12 = g.eta1 + g.mu0;
    g.rho0 = g.eta0 / g.eta1;
    g.rho1 = g.eta0 / (g.eta1 * g.mu0);
    g.lambda01 = lambda01;
    g.lambda11 = lambda11;
    return g;
}

QuasiPoly assemble_pa(const ChiParams& p) {
    require_valid(p);
    QuasiPoly lin; // s + chi1
    lin.set(1, 0, 1.0);
    lin.set(0, 0, p.chi1);
    QuasiPoly quad; // s^2 + chi2 s + z chi3
    quad.set(2, 0, 1.0);
    quad.set(1, 0, p.chi2);
    quad.set(0, 1, p.chi3);
    return lin * quad;
}

DelayMargin compute_tau_max(const ChiParams& p) {
    require_valid(p);
    const double chi2 = p.chi2;
    const double chi3 = p.chi3;
    const double t_c = -1.0 / chi2 + 0.5 * chi2 / chi3
                     + 0.5 * std::sqrt(4.0 / (chi2 * chi2) + chi2 * chi2 / (chi3 * chi3));
    const double w = std::sqrt(chi3 / (1.0 + t_c * chi2));
    const double tau_max = 2.0 * std::atan(t_c * w) / w;
    return DelayMargin{t_c, tau_max};
}

ModelSpec::ModelSpec(std::optional<std::vector<double>> tc, RationalTF h)
    : time_constants_(std::move(tc)), tf_(std::move(h)) {}

ModelSpec ModelSpec::from_time_constants(std::vector<double> tc) {
    if (tc.empty()) {
        throw std::invalid_argument("ModelSpec needs at least one time constant");
    }
    for (double t : tc) {
        if (!(t > 0.0)) {
            throw std::invalid_argument("ModelSpec time constants must be positive");
        }
    }
    QuasiPoly den = QuasiPoly::constant(1.0);
    for (double t : tc) {
        QuasiPoly factor; // T s + 1
        factor.set(1, 0, t);
        factor.set(0, 0, 1.0);
        den = den * factor;
    }
    RationalTF h(QuasiPoly::constant(1.0), den);
    return ModelSpec(std::move(tc), std::move(h));
}

ModelSpec ModelSpec::from_tf(RationalTF h) {
    if (h.num().z_degree() > 0 || h.den().z_degree() > 0) {
        throw std::invalid_argument("ModelSpec transfer function must be s-only");
    }
    return ModelSpec(std::nullopt, std::move(h));
}

namespace {
std::vector<double> s_coeffs(const QuasiPoly& p) {
    std::vector<double> out(static_cast<std::size_t>(std::max(p.s_degree(), 0)) + 1, 0.0);
    for (const auto& [key, c] : p.coeffs()) {
        out[static_cast<std::size_t>(key.first)] = c;
    }
    return out;
}
} // namespace

std::vector<double> ModelSpec::den_coeffs() const {
    return s_coeffs(tf_.den());
}

std::vector<double> ModelSpec::num_coeffs() const {
    return s_coeffs(tf_.num());
}

std::vector<std::complex<double>> polynomial_roots(std::span<const double> ascending) {
    // Trim trailing zeros of the leading coefficients.
    std::size_t n = ascending.size();
    while (n > 0 && ascending[n - 1] == 0.0) {
        --n;
    }
    if (n <= 1) {
        return {};
    }
    const std::size_t deg = n - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<int>(deg), static_cast<int>(deg));
    const double lead = ascending[deg];
    for (std::size_t i = 0; i < deg; ++i) {
        companion(static_cast<int>(i), static_cast<int>(deg) - 1) = -ascending[i] / lead;
        if (i > 0) {
            companion(static_cast<int>(i), static_cast<int>(i) - 1) = 1.0;
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
    std::vector<std::complex<double>> roots;
    roots.reserve(deg);
    for (int i = 0; i < solver.eigenvalues().size(); ++i) {
        roots.push_back(solver.eigenvalues()[i]);
    }
    return roots;
}

RationalTF build_precompensator(const ChiParams& p, const ModelSpec& model) {
    require_valid(p);
    const auto prop = tf_properness(model.tf());
    if (!prop.precompensator_ok) {
        std::ostringstream msg;
        msg << "model not proper enough for the precompensator: n_d=" << prop.n_d
            << " < n_n+3=" << prop.n_n + 3;
        throw NotProper(msg.str());
    }
    const auto den = model.den_coeffs();
    for (const auto& root : polynomial_roots(den)) {
        if (root.real() >= -1e-9) {
            throw UnstableModel("model denominator root with Re >= -1e-9");
        }
    }
    const double scale = (1.0 - p.k2 * p.chi1) / (p.chi1 * p.chi3);
    const QuasiPoly num = (assemble_pa(p) * model.tf().num()).scaled(scale);
    return RationalTF(num, model.tf().den());
}

RationalTF build_inner_tf(const GainSet& g) {
    QuasiPoly lin; // s + mu0
    lin.set(1, 0, 1.0);
    lin.set(0, 0, g.mu0);
    QuasiPoly quad; // s^2 + eta1 s + eta0 z
    quad.set(2, 0, 1.0);
    quad.set(1, 0, g.eta1);
    quad.set(0, 1, g.eta0);
    const QuasiPoly den = lin * quad;

    // Second route: the y2-equation quasi-polynomial written with the
    // lambda/rho gains. The two must agree coefficient-by-coefficient.
    QuasiPoly eq;
    eq.set(3, 0, 1.0);
    eq.set(2, 0, g.lambda12);
    eq.set(1, 0, g.lambda02);
    eq.set(1, 1, g.lambda02 * g.rho1);
    eq.set(0, 1, g.lambda02 * g.rho0);

    for (const auto& [key, c] : den.coeffs()) {
        if (!within_ulps(c, eq.coeff(key.first, key.second), 2)) {
            throw GainInconsistency("factored and equation-route coefficients disagree");
        }
    }
    for (const auto& [key, c] : eq.coeffs()) {
        if (!within_ulps(c, den.coeff(key.first, key.second), 2)) {
            throw GainInconsistency("factored and equation-route coefficients disagree");
        }
    }
    return RationalTF(QuasiPoly::constant(1.0), den);
}

} // namespace dmatch

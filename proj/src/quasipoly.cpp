#include "dmatch/quasipoly.hpp"

#include <cmath>
#include <stdexcept>

namespace dmatch {

namespace {
// Canonical form strips only true zeros; no epsilon pruning, so cancellation
// bugs stay visible.
constexpr double kZeroFloor = 1e-300;

bool is_stored_zero(double c) {
    return std::abs(c) < kZeroFloor;
}
} // namespace

QuasiPoly QuasiPoly::constant(double c) {
    QuasiPoly p;
    p.set(0, 0, c);
    return p;
}

QuasiPoly QuasiPoly::s() {
    return monomial(1, 0, 1.0);
}

QuasiPoly QuasiPoly::z() {
    return monomial(0, 1, 1.0);
}

QuasiPoly QuasiPoly::monomial(int s_pow, int z_pow, double c) {
    QuasiPoly p;
    p.set(s_pow, z_pow, c);
    return p;
}

QuasiPoly QuasiPoly::from_s_coeffs(std::span<const double> ascending) {
    QuasiPoly p;
    for (std::size_t i = 0; i < ascending.size(); ++i) {
        p.set(static_cast<int>(i), 0, ascending[i]);
    }
    return p;
}

void QuasiPoly::set(int s_pow, int z_pow, double c) {
    if (s_pow < 0 || z_pow < 0) {
        throw std::invalid_argument("QuasiPoly powers must be non-negative");
    }
    if (is_stored_zero(c)) {
        coeffs_.erase({s_pow, z_pow});
    } else {
        coeffs_[{s_pow, z_pow}] = c;
    }
}

double QuasiPoly::coeff(int s_pow, int z_pow) const {
    auto it = coeffs_.find({s_pow, z_pow});
    return it == coeffs_.end() ? 0.0 : it->second;
}

int QuasiPoly::s_degree() const {
    int deg = -1;
    for (const auto& [key, c] : coeffs_) {
        deg = std::max(deg, key.first);
    }
    return deg;
}

int QuasiPoly::z_degree() const {
    int deg = -1;
    for (const auto& [key, c] : coeffs_) {
        deg = std::max(deg, key.second);
    }
    return deg;
}

std::complex<double> QuasiPoly::eval(std::complex<double> s, double tau) const {
    std::complex<double> sum = 0.0;
    for (const auto& [key, c] : coeffs_) {
        std::complex<double> term = c;
        for (int i = 0; i < key.first; ++i) {
            term *= s;
        }
        if (key.second > 0) {
            term *= std::exp(-s * (tau * key.second));
        }
        sum += term;
    }
    return sum;
}

QuasiPoly QuasiPoly::scaled(double a) const {
    QuasiPoly out;
    for (const auto& [key, c] : coeffs_) {
        out.set(key.first, key.second, c * a);
    }
    return out;
}

QuasiPoly operator*(const QuasiPoly& a, const QuasiPoly& b) {
    QuasiPoly out;
    for (const auto& [ka, ca] : a.coeffs_) {
        for (const auto& [kb, cb] : b.coeffs_) {
            const QuasiPoly::Key key{ka.first + kb.first, ka.second + kb.second};
            auto [it, inserted] = out.coeffs_.try_emplace(key, 0.0);
            it->second += ca * cb;
        }
    }
    // Re-canonicalize: convolution can produce exact zeros.
    for (auto it = out.coeffs_.begin(); it != out.coeffs_.end();) {
        if (is_stored_zero(it->second)) {
            it = out.coeffs_.erase(it);
        } else {
            ++it;
        }
    }
    return out;
}

QuasiPoly operator+(const QuasiPoly& a, const QuasiPoly& b) {
    QuasiPoly out = a;
    for (const auto& [key, c] : b.coeffs_) {
        out.set(key.first, key.second, out.coeff(key.first, key.second) + c);
    }
    return out;
}

QuasiPoly operator-(const QuasiPoly& a, const QuasiPoly& b) {
    return a + b.scaled(-1.0);
}

QuasiPoly qp_mul(const QuasiPoly& a, const QuasiPoly& b) {
    return a * b;
}

std::complex<double> qp_eval(const QuasiPoly& p, std::complex<double> s, double tau) {
    return p.eval(s, tau);
}

RationalTF::RationalTF(QuasiPoly num, QuasiPoly den)
    : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) {
        throw std::invalid_argument("RationalTF denominator is the zero polynomial");
    }
}

std::complex<double> RationalTF::eval(std::complex<double> s, double tau) const {
    return num_.eval(s, tau) / den_.eval(s, tau);
}

RationalTF operator*(const RationalTF& a, const RationalTF& b) {
    return RationalTF(a.num_ * b.num_, a.den_ * b.den_);
}

PropernessReport tf_properness(const RationalTF& h) {
    const int n_n = h.num_s_degree();
    const int n_d = h.den_s_degree();
    return PropernessReport{n_n, n_d, n_d >= n_n + 3};
}

RationalTF tf_mul(const RationalTF& a, const RationalTF& b) {
    return a * b;
}

} // namespace dmatch

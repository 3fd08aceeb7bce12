#pragma once

#include <complex>
#include <map>
#include <span>
#include <utility>

namespace dmatch {

// Bivariate polynomial in the Laplace variable s and the delay operator
// z = exp(-s*tau). Coefficients are stored sparsely, keyed by
// (s-power, z-power); true zeros are never stored, so two polynomials are
// equal iff their coefficient maps are equal.
class QuasiPoly {
  public:
    using Key = std::pair<int, int>; // (s power, z power)

    QuasiPoly() = default;

    static QuasiPoly constant(double c);
    static QuasiPoly s();
    static QuasiPoly z();
    static QuasiPoly monomial(int s_pow, int z_pow, double c);
    // Polynomial in s only, coefficients ascending: c[0] + c[1] s + ...
    static QuasiPoly from_s_coeffs(std::span<const double> ascending);

    void set(int s_pow, int z_pow, double c);
    double coeff(int s_pow, int z_pow) const;

    bool is_zero() const { return coeffs_.empty(); }
    // Degrees of the zero polynomial are reported as -1.
    int s_degree() const;
    int z_degree() const;

    const std::map<Key, double>& coeffs() const { return coeffs_; }

    // Pointwise evaluation with z := exp(-s*tau), tau >= 0.
    std::complex<double> eval(std::complex<double> s, double tau) const;

    QuasiPoly scaled(double a) const;

    bool operator==(const QuasiPoly&) const = default;

    friend QuasiPoly operator*(const QuasiPoly& a, const QuasiPoly& b);
    friend QuasiPoly operator+(const QuasiPoly& a, const QuasiPoly& b);
    friend QuasiPoly operator-(const QuasiPoly& a, const QuasiPoly& b);

  private:
    std::map<Key, double> coeffs_;
};

QuasiPoly qp_mul(const QuasiPoly& a, const QuasiPoly& b);
std::complex<double> qp_eval(const QuasiPoly& p, std::complex<double> s, double tau);

struct PropernessReport {
    int n_n; // numerator s-degree
    int n_d; // denominator s-degree
    bool precompensator_ok; // n_d >= n_n + 3
};

// Ratio of two quasi-polynomials. Degrees are always recomputed from the
// canonical coefficient maps, never cached. No pole-zero cancellation is
// performed; cancellation claims are checked by pointwise evaluation.
class RationalTF {
  public:
    RationalTF(QuasiPoly num, QuasiPoly den); // throws if den is zero

    const QuasiPoly& num() const { return num_; }
    const QuasiPoly& den() const { return den_; }

    int num_s_degree() const { return num_.s_degree(); }
    int den_s_degree() const { return den_.s_degree(); }

    std::complex<double> eval(std::complex<double> s, double tau) const;

    friend RationalTF operator*(const RationalTF& a, const RationalTF& b);

  private:
    QuasiPoly num_;
    QuasiPoly den_;
};

PropernessReport tf_properness(const RationalTF& h);
RationalTF tf_mul(const RationalTF& a, const RationalTF& b);

} // namespace dmatch

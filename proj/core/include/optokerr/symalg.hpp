#ifndef OPTOKERR_SYMALG_HPP
#define OPTOKERR_SYMALG_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "optokerr/error.hpp"

namespace okerr::sym {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Default cap on any single operator exponent produced by multiplication.
inline constexpr int default_max_exponent = 32;

/*
 * a+^cre_a a^ann_a b+^cre_b b^ann_b e^{i harmonic Omega t}, always normal ordered.
 * The two modes commute, so this tuple is the canonical key.
 */
struct Monomial {
    int cre_a = 0;
    int ann_a = 0;
    int cre_b = 0;
    int ann_b = 0;
    int harmonic = 0;

    auto operator<=>(const Monomial&) const = default;

    bool is_identity() const {
        return cre_a == 0 && ann_a == 0 && cre_b == 0 && ann_b == 0;
    }
    Monomial adjoint() const { return {ann_a, cre_a, ann_b, cre_b, -harmonic}; }
    std::string operator_string() const;
};

/// Exact complex rational re + i im.
struct GaussianRational {
    Rational re;
    Rational im;

    GaussianRational() = default;
    GaussianRational(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return re == 0 && im == 0; }
    GaussianRational conj() const { return {re, -im}; }
    std::complex<double> to_complex() const {
        return {re.convert_to<double>(), im.convert_to<double>()};
    }

    GaussianRational& operator+=(const GaussianRational& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend GaussianRational operator*(const GaussianRational& x, const GaussianRational& y) {
        return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
    }
    friend bool operator==(const GaussianRational&, const GaussianRational&) = default;
    std::string str() const;
};

/// Powers of the coupling symbols g, v, w and of 1/Omega.
struct SymbolPowers {
    int g = 0;
    int v = 0;
    int w = 0;
    int inv_omega = 0;

    auto operator<=>(const SymbolPowers&) const = default;
    SymbolPowers operator*(const SymbolPowers& o) const {
        return {g + o.g, v + o.v, w + o.w, inv_omega + o.inv_omega};
    }
    std::string str() const;
};

/// Numeric values substituted for the symbols (any consistent angular units).
struct SymbolValues {
    double g = 0.0;
    double v = 0.0;
    double w = 0.0;
    double omega = 1.0;
};

/// Exact linear combination of symbol products with complex-rational weights.
class SymbolicCoeff {
public:
    SymbolicCoeff() = default;
    SymbolicCoeff(GaussianRational c, SymbolPowers s = {}) {
        if (!c.is_zero()) {
            terms_.emplace(s, std::move(c));
        }
    }
    explicit SymbolicCoeff(long long n) : SymbolicCoeff(GaussianRational(Rational(n))) {}

    static SymbolicCoeff g() { return {GaussianRational(1), {1, 0, 0, 0}}; }
    static SymbolicCoeff v() { return {GaussianRational(1), {0, 1, 0, 0}}; }
    static SymbolicCoeff w() { return {GaussianRational(1), {0, 0, 1, 0}}; }

    const std::map<SymbolPowers, GaussianRational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// Weight of one symbol product (zero when absent).
    GaussianRational at(const SymbolPowers& s) const;

    SymbolicCoeff& operator+=(const SymbolicCoeff& o);
    SymbolicCoeff& operator-=(const SymbolicCoeff& o);
    friend SymbolicCoeff operator*(const SymbolicCoeff& x, const SymbolicCoeff& y);
    SymbolicCoeff scaled(const GaussianRational& f) const;
    SymbolicCoeff conj() const;
    std::complex<double> evaluate(const SymbolValues& values) const;
    friend bool operator==(const SymbolicCoeff&, const SymbolicCoeff&) = default;
    std::string str() const;

    /// Removes every symbol product for which keep(powers) is false.
    template <class Pred>
    SymbolicCoeff filtered(Pred keep) const {
        SymbolicCoeff out;
        for (const auto& [s, c] : terms_) {
            if (keep(s)) {
                out.terms_.emplace(s, c);
            }
        }
        return out;
    }

private:
    std::map<SymbolPowers, GaussianRational> terms_;
};

/// Per-coefficient-type hooks used by the generic polynomial code.
template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<SymbolicCoeff> {
    static bool is_zero(const SymbolicCoeff& c) { return c.is_zero(); }
    static SymbolicCoeff conj(const SymbolicCoeff& c) { return c.conj(); }
    static SymbolicCoeff scale(const SymbolicCoeff& c, const BigInt& n) {
        return c.scaled(GaussianRational(Rational(n)));
    }
    static SymbolicCoeff scale(const SymbolicCoeff& c, const GaussianRational& f) {
        return c.scaled(f);
    }
    static SymbolicCoeff one() { return SymbolicCoeff(1); }
};

template <>
struct CoeffTraits<std::complex<double>> {
    static bool is_zero(const std::complex<double>& c) { return c == 0.0; }
    static std::complex<double> conj(const std::complex<double>& c) { return std::conj(c); }
    static std::complex<double> scale(const std::complex<double>& c, const BigInt& n) {
        return c * n.convert_to<double>();
    }
    static std::complex<double> scale(const std::complex<double>& c, const GaussianRational& f) {
        return c * f.to_complex();
    }
    static std::complex<double> one() { return 1.0; }
};

/*
 * Sum of normal-ordered two-mode monomials. Zero coefficients are never stored.
 */
template <class C>
class Polynomial {
public:
    using coeff_type = C;
    using traits = CoeffTraits<C>;

    Polynomial() = default;
    Polynomial(const Monomial& m, C c) { add(m, std::move(c)); }

    static Polynomial identity(C c) { return Polynomial(Monomial{}, std::move(c)); }

    const std::map<Monomial, C>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    C coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? C{} : it->second;
    }

    void add(const Monomial& m, const C& c) {
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
        }
        if (traits::is_zero(it->second)) {
            terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) {
            add(m, c);
        }
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) {
            C neg{};
            neg -= c;
            add(m, neg);
        }
        return *this;
    }
    friend Polynomial operator+(Polynomial x, const Polynomial& y) { return x += y; }
    friend Polynomial operator-(Polynomial x, const Polynomial& y) { return x -= y; }

    /// Every coefficient multiplied by the scalar s.
    Polynomial scaled(const C& s) const {
        Polynomial out;
        for (const auto& [m, c] : terms_) {
            out.add(m, c * s);
        }
        return out;
    }

    Polynomial adjoint() const {
        Polynomial out;
        for (const auto& [m, c] : terms_) {
            out.add(m.adjoint(), traits::conj(c));
        }
        return out;
    }

    /// Keeps the terms whose monomial satisfies keep(m).
    template <class Pred>
    Polynomial select(Pred keep) const {
        Polynomial out;
        for (const auto& [m, c] : terms_) {
            if (keep(m)) {
                out.terms_.emplace(m, c);
            }
        }
        return out;
    }

    /// Applies f to every coefficient, dropping results that become zero.
    template <class F>
    Polynomial transformed(F f) const {
        Polynomial out;
        for (const auto& [m, c] : terms_) {
            out.add(m, f(m, c));
        }
        return out;
    }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::map<Monomial, C> terms_;
};

using SymbolicPolynomial = Polynomial<SymbolicCoeff>;
using NumericPolynomial = Polynomial<std::complex<double>>;

namespace detail {

// c^q a+^p' reordered: sum_j C(q,j) C(p',j) j! a+^{p'-j} a^{q-j}; returns the weights by j.
std::vector<BigInt> reorder_weights(int ann, int cre);

}  // namespace detail

/// Normal-ordered product P Q. Harmonic indices add.
template <class C>
Polynomial<C> multiply(const Polynomial<C>& P, const Polynomial<C>& Q,
                       int max_exponent = default_max_exponent) {
    using traits = CoeffTraits<C>;
    Polynomial<C> out;
    for (const auto& [m1, c1] : P.terms()) {
        for (const auto& [m2, c2] : Q.terms()) {
            const C base = c1 * c2;
            const auto wa = detail::reorder_weights(m1.ann_a, m2.cre_a);
            const auto wb = detail::reorder_weights(m1.ann_b, m2.cre_b);
            for (std::size_t ja = 0; ja < wa.size(); ++ja) {
                for (std::size_t jb = 0; jb < wb.size(); ++jb) {
                    const int ia = static_cast<int>(ja);
                    const int ib = static_cast<int>(jb);
                    Monomial m{m1.cre_a + m2.cre_a - ia, m1.ann_a + m2.ann_a - ia,
                               m1.cre_b + m2.cre_b - ib, m1.ann_b + m2.ann_b - ib,
                               m1.harmonic + m2.harmonic};
                    if (std::max({m.cre_a, m.ann_a, m.cre_b, m.ann_b}) > max_exponent) {
                        throw NumericalError("operator exponent exceeds " +
                                             std::to_string(max_exponent));
                    }
                    out.add(m, traits::scale(base, wa[ja] * wb[jb]));
                }
            }
        }
    }
    return out;
}

template <class C>
Polynomial<C> commutator(const Polynomial<C>& P, const Polynomial<C>& Q,
                         int max_exponent = default_max_exponent) {
    return multiply(P, Q, max_exponent) - multiply(Q, P, max_exponent);
}

/// <P> over one fast period: keeps only the harmonic-0 terms.
template <class C>
Polynomial<C> time_average(const Polynomial<C>& P) {
    return P.select([](const Monomial& m) { return m.harmonic == 0; });
}

template <class C>
bool is_hermitian(const Polynomial<C>& P) {
    return P == P.adjoint();
}

/// Hermiticity with a tolerance, for floating coefficients.
bool is_hermitian(const NumericPolynomial& P, double tol);

/// Antiderivative in t with Omega kept symbolic: c e^{ik Omega t} -> c/(ik Omega) e^{ik Omega t}.
SymbolicPolynomial integrate_oscillating(const SymbolicPolynomial& P);

/// Same with a numeric Omega.
NumericPolynomial integrate_oscillating(const NumericPolynomial& P, double omega);

/// Drops coefficients below eps times the largest magnitude present.
NumericPolynomial pruned(const NumericPolynomial& P, double eps = 1e-14);

NumericPolynomial evaluate(const SymbolicPolynomial& P, const SymbolValues& values);

/// Products of couplings (ignoring 1/Omega powers) removed from second-order output.
struct NeglectFilter {
    struct Product {
        int g = 0;
        int v = 0;
        int w = 0;
        auto operator<=>(const Product&) const = default;
    };
    std::vector<Product> dropped;

    /// w^2, v w and g w: the terms the averaged model leaves out.
    static NeglectFilter standard();
    static NeglectFilter none() { return {}; }

    bool drops(const SymbolPowers& s) const;
    /// Parses "w^2", "v*w", "g*w", ... Throws InputError on anything else.
    static Product parse(const std::string& text);
};

struct AveragedHamiltonian {
    SymbolicPolynomial first_order;   // <H>, identity removed
    SymbolicPolynomial second_order;  // (i/2)<[int (H - <H>), H]>, identity removed, filtered
    SymbolicCoeff first_order_scalar;
    SymbolicCoeff second_order_scalar;

    SymbolicPolynomial operators() const { return first_order + second_order; }
    SymbolicCoeff scalar() const {
        SymbolicCoeff s = first_order_scalar;
        s += second_order_scalar;
        return s;
    }
};

/// First- (order = 1) or second-order (order = 2) averaged Hamiltonian of H.
AveragedHamiltonian bogoliubov_effective(const SymbolicPolynomial& H, int order,
                                         const NeglectFilter& filter = NeglectFilter::standard());

/// Elementary building blocks.
SymbolicPolynomial mode_a();
SymbolicPolynomial mode_a_dag();
SymbolicPolynomial mode_b(int harmonic = 0);
SymbolicPolynomial mode_b_dag(int harmonic = 0);

template <class C>
Polynomial<C> power(const Polynomial<C>& P, int n, int max_exponent = default_max_exponent) {
    Polynomial<C> out = Polynomial<C>::identity(CoeffTraits<C>::one());
    for (int i = 0; i < n; ++i) {
        out = multiply(out, P, max_exponent);
    }
    return out;
}

/*
 * Interaction-picture Hamiltonian with symbolic couplings:
 *   -g a+a (b+ e^{i Omega t} + b e^{-i Omega t})
 *   + (v/6)(b+ e^{i Omega t} + b e^{-i Omega t})^3 + (w/6)(...)^4
 */
SymbolicPolynomial interaction_hamiltonian();

/// Key (i, j) of a term n_a^i n_b^j in a number-operator polynomial.
struct NumberPowers {
    int n_a = 0;
    int n_b = 0;
    auto operator<=>(const NumberPowers&) const = default;
    std::string str() const;
};

using NumberPolynomial = std::map<NumberPowers, SymbolicCoeff>;

/*
 * Rewrites a diagonal polynomial (every term a+^p a^p b+^r b^r with harmonic 0)
 * in powers of n_a = a+a and n_b = b+b, using a+^p a^p = n (n-1) ... (n-p+1).
 * Throws InputError when a term is off-diagonal or oscillating.
 */
NumberPolynomial to_number_basis(const SymbolicPolynomial& P);

/// Canonical one-term-per-line text, sorted by (p, q, r, s, k).
std::string to_text(const SymbolicPolynomial& P);
std::string to_text(const NumericPolynomial& P);

}  // namespace okerr::sym

#endif

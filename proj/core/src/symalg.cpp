#include "optokerr/symalg.hpp"

#include "optokerr/format.hpp"

#include <charconv>
#include <sstream>

namespace okerr::sym {

namespace {

std::string power_suffix(const char* name, int p) {
    if (p == 0) {
        return {};
    }
    std::string out = name;
    if (p != 1) {
        out += "^" + std::to_string(p);
    }
    return out;
}

}  // namespace

std::string Monomial::operator_string() const {
    std::string out;
    auto append = [&out](std::string piece) {
        if (piece.empty()) {
            return;
        }
        if (!out.empty()) {
            out += ' ';
        }
        out += piece;
    };
    append(power_suffix("a+", cre_a));
    append(power_suffix("a", ann_a));
    append(power_suffix("b+", cre_b));
    append(power_suffix("b", ann_b));
    return out.empty() ? "1" : out;
}

std::string GaussianRational::str() const {
    if (im == 0) {
        return re.str();
    }
    if (re == 0) {
        return im.str() + "i";
    }
    std::string sign = im < 0 ? "-" : "+";
    Rational mag = im < 0 ? Rational(-im) : im;
    return "(" + re.str() + sign + mag.str() + "i)";
}

std::string SymbolPowers::str() const {
    std::string out;
    for (auto piece : {power_suffix("g", g), power_suffix("v", v), power_suffix("w", w)}) {
        if (!piece.empty()) {
            out += (out.empty() ? "" : "*") + piece;
        }
    }
    if (inv_omega != 0) {
        out += "/" + power_suffix("Omega", inv_omega);
    }
    return out;
}

GaussianRational SymbolicCoeff::at(const SymbolPowers& s) const {
    auto it = terms_.find(s);
    return it == terms_.end() ? GaussianRational{} : it->second;
}

SymbolicCoeff& SymbolicCoeff::operator+=(const SymbolicCoeff& o) {
    for (const auto& [s, c] : o.terms_) {
        auto [it, inserted] = terms_.try_emplace(s, c);
        if (!inserted) {
            it->second += c;
        }
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
    return *this;
}

SymbolicCoeff& SymbolicCoeff::operator-=(const SymbolicCoeff& o) {
    return *this += o.scaled(GaussianRational(-1));
}

SymbolicCoeff operator*(const SymbolicCoeff& x, const SymbolicCoeff& y) {
    SymbolicCoeff out;
    for (const auto& [sx, cx] : x.terms_) {
        for (const auto& [sy, cy] : y.terms_) {
            out += SymbolicCoeff(cx * cy, sx * sy);
        }
    }
    return out;
}

SymbolicCoeff SymbolicCoeff::scaled(const GaussianRational& f) const {
    SymbolicCoeff out;
    if (f.is_zero()) {
        return out;
    }
    for (const auto& [s, c] : terms_) {
        out.terms_.emplace(s, c * f);
    }
    return out;
}

SymbolicCoeff SymbolicCoeff::conj() const {
    SymbolicCoeff out;
    for (const auto& [s, c] : terms_) {
        out.terms_.emplace(s, c.conj());
    }
    return out;
}

std::complex<double> SymbolicCoeff::evaluate(const SymbolValues& values) const {
    std::complex<double> total = 0.0;
    for (const auto& [s, c] : terms_) {
        const double mag = std::pow(values.g, s.g) * std::pow(values.v, s.v) *
                           std::pow(values.w, s.w) * std::pow(values.omega, -s.inv_omega);
        total += c.to_complex() * mag;
    }
    return total;
}

std::string SymbolicCoeff::str() const {
    if (terms_.empty()) {
        return "0";
    }
    std::string out;
    for (const auto& [s, c] : terms_) {
        std::string weight = c.str();
        std::string symbols = s.str();
        std::string piece;
        if (symbols.empty()) {
            piece = weight;
        } else if (weight == "1") {
            piece = symbols;
        } else if (weight == "-1") {
            piece = "-" + symbols;
        } else {
            piece = weight + "*" + symbols;
        }
        if (!out.empty()) {
            out += (piece.front() == '-') ? " - " + piece.substr(1) : " + " + piece;
        } else {
            out = piece;
        }
    }
    return out;
}

namespace detail {

std::vector<BigInt> reorder_weights(int ann, int cre) {
    const int top = std::min(ann, cre);
    std::vector<BigInt> w(static_cast<std::size_t>(top) + 1);
    // C(q,j) C(p',j) j!, built incrementally.
    BigInt term = 1;
    w[0] = 1;
    for (int j = 1; j <= top; ++j) {
        term = term * (ann - j + 1) * (cre - j + 1) / j;
        w[static_cast<std::size_t>(j)] = term;
    }
    return w;
}

}  // namespace detail

bool is_hermitian(const NumericPolynomial& P, double tol) {
    const NumericPolynomial diff = P - P.adjoint();
    double scale = 0.0;
    for (const auto& [m, c] : P.terms()) {
        scale = std::max(scale, std::abs(c));
    }
    for (const auto& [m, c] : diff.terms()) {
        if (std::abs(c) > tol * std::max(scale, 1e-300)) {
            return false;
        }
    }
    return true;
}

SymbolicPolynomial integrate_oscillating(const SymbolicPolynomial& P) {
    return P.transformed([](const Monomial& m, const SymbolicCoeff& c) {
        if (m.harmonic == 0) {
            throw InputError("integrate_oscillating: input has a non-oscillating term " +
                             m.operator_string());
        }
        // 1/(ik) = -i/k; the denominator passed to Rational must stay positive.
        const Rational minus_inv_k = m.harmonic > 0 ? Rational(-1, m.harmonic)
                                                    : Rational(1, -m.harmonic);
        const SymbolicCoeff factor(GaussianRational(0, minus_inv_k),
                                   SymbolPowers{0, 0, 0, 1});
        return c * factor;
    });
}

NumericPolynomial integrate_oscillating(const NumericPolynomial& P, double omega) {
    return P.transformed([omega](const Monomial& m, const std::complex<double>& c) {
        if (m.harmonic == 0) {
            throw InputError("integrate_oscillating: input has a non-oscillating term " +
                             m.operator_string());
        }
        return c / (std::complex<double>(0.0, m.harmonic) * omega);
    });
}

NumericPolynomial pruned(const NumericPolynomial& P, double eps) {
    double scale = 0.0;
    for (const auto& [m, c] : P.terms()) {
        scale = std::max(scale, std::abs(c));
    }
    return P.select([&](const Monomial& m) { return std::abs(P.coeff(m)) > eps * scale; });
}

NumericPolynomial evaluate(const SymbolicPolynomial& P, const SymbolValues& values) {
    NumericPolynomial out;
    for (const auto& [m, c] : P.terms()) {
        out.add(m, c.evaluate(values));
    }
    return out;
}

NeglectFilter NeglectFilter::standard() {
    return {{{0, 0, 2}, {0, 1, 1}, {1, 0, 1}}};
}

bool NeglectFilter::drops(const SymbolPowers& s) const {
    const Product p{s.g, s.v, s.w};
    return std::find(dropped.begin(), dropped.end(), p) != dropped.end();
}

NeglectFilter::Product NeglectFilter::parse(const std::string& text) {
    Product p;
    std::string token;
    std::stringstream in(text);
    bool any = false;
    while (std::getline(in, token, '*')) {
        if (token.empty()) {
            throw InputError("bad coupling product '" + text + "'");
        }
        int exponent = 1;
        const auto caret = token.find('^');
        if (caret != std::string::npos) {
            const std::string digits = token.substr(caret + 1);
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), exponent);
            if (ec != std::errc{} || ptr != digits.data() + digits.size() || exponent < 1) {
                throw InputError("bad exponent in coupling product '" + text + "'");
            }
            token.resize(caret);
        }
        if (token == "g") {
            p.g += exponent;
        } else if (token == "v") {
            p.v += exponent;
        } else if (token == "w") {
            p.w += exponent;
        } else {
            throw InputError("unknown coupling symbol '" + token + "' in '" + text + "'");
        }
        any = true;
    }
    if (!any) {
        throw InputError("empty coupling product");
    }
    return p;
}

namespace {

SymbolicCoeff take_identity(SymbolicPolynomial& P) {
    const SymbolicCoeff c = P.coeff(Monomial{});
    P = P.select([](const Monomial& m) { return !m.is_identity(); });
    return c;
}

}  // namespace

AveragedHamiltonian bogoliubov_effective(const SymbolicPolynomial& H, int order,
                                         const NeglectFilter& filter) {
    if (order != 1 && order != 2) {
        throw InputError("bogoliubov_effective: order must be 1 or 2");
    }
    AveragedHamiltonian out;
    const SymbolicPolynomial average = time_average(H);
    out.first_order = average;
    out.first_order_scalar = take_identity(out.first_order);
    if (order == 1) {
        return out;
    }

    const SymbolicPolynomial oscillating = H - average;
    const SymbolicPolynomial antiderivative = integrate_oscillating(oscillating);
    const SymbolicCoeff half_i(GaussianRational(0, Rational(1, 2)));
    SymbolicPolynomial second = time_average(commutator(antiderivative, H)).scaled(half_i);
    second = second.transformed([&filter](const Monomial&, const SymbolicCoeff& c) {
        return c.filtered([&filter](const SymbolPowers& s) { return !filter.drops(s); });
    });
    out.second_order = second;
    out.second_order_scalar = take_identity(out.second_order);
    return out;
}

SymbolicPolynomial mode_a() { return {Monomial{0, 1, 0, 0, 0}, SymbolicCoeff(1)}; }
SymbolicPolynomial mode_a_dag() { return {Monomial{1, 0, 0, 0, 0}, SymbolicCoeff(1)}; }
SymbolicPolynomial mode_b(int harmonic) {
    return {Monomial{0, 0, 0, 1, harmonic}, SymbolicCoeff(1)};
}
SymbolicPolynomial mode_b_dag(int harmonic) {
    return {Monomial{0, 0, 1, 0, harmonic}, SymbolicCoeff(1)};
}

SymbolicPolynomial interaction_hamiltonian() {
    const SymbolicPolynomial x = mode_b_dag(+1) + mode_b(-1);
    const SymbolicPolynomial n_a = multiply(mode_a_dag(), mode_a());
    const SymbolicCoeff sixth(GaussianRational(Rational(1, 6)));

    SymbolicPolynomial H = multiply(n_a, x).scaled(SymbolicCoeff::g().scaled(GaussianRational(-1)));
    H += power(x, 3).scaled(SymbolicCoeff::v() * sixth);
    H += power(x, 4).scaled(SymbolicCoeff::w() * sixth);
    return H;
}

std::string NumberPowers::str() const {
    std::string out;
    for (auto piece : {power_suffix("n_a", n_a), power_suffix("n_b", n_b)}) {
        if (!piece.empty()) {
            out += (out.empty() ? "" : " ") + piece;
        }
    }
    return out.empty() ? "1" : out;
}

namespace {

// Signed Stirling numbers of the first kind: x (x-1) ... (x-p+1) = sum_k s(p,k) x^k.
std::vector<BigInt> falling_factorial_coefficients(int p) {
    std::vector<BigInt> c(static_cast<std::size_t>(p) + 1, 0);
    c[0] = 1;
    for (int m = 0; m < p; ++m) {
        // multiply by (x - m)
        for (int k = m + 1; k >= 0; --k) {
            BigInt next = (k > 0 ? c[static_cast<std::size_t>(k) - 1] : BigInt(0)) -
                          c[static_cast<std::size_t>(k)] * m;
            c[static_cast<std::size_t>(k)] = next;
        }
    }
    return c;
}

}  // namespace

NumberPolynomial to_number_basis(const SymbolicPolynomial& P) {
    NumberPolynomial out;
    for (const auto& [m, c] : P.terms()) {
        if (m.cre_a != m.ann_a || m.cre_b != m.ann_b || m.harmonic != 0) {
            throw InputError("to_number_basis: term " + m.operator_string() +
                             " is not diagonal in the number basis");
        }
        const auto ca = falling_factorial_coefficients(m.cre_a);
        const auto cb = falling_factorial_coefficients(m.cre_b);
        for (std::size_t i = 0; i < ca.size(); ++i) {
            for (std::size_t j = 0; j < cb.size(); ++j) {
                const BigInt weight = ca[i] * cb[j];
                if (weight == 0) {
                    continue;
                }
                const NumberPowers key{static_cast<int>(i), static_cast<int>(j)};
                auto& slot = out[key];
                slot += c.scaled(GaussianRational(Rational(weight)));
                if (slot.is_zero()) {
                    out.erase(key);
                }
            }
        }
    }
    return out;
}

std::string to_text(const SymbolicPolynomial& P) {
    std::ostringstream os;
    for (const auto& [m, c] : P.terms()) {
        os << '(' << m.cre_a << ',' << m.ann_a << ',' << m.cre_b << ',' << m.ann_b << ';'
           << m.harmonic << ") " << m.operator_string() << " : " << c.str() << '\n';
    }
    return os.str();
}

std::string to_text(const NumericPolynomial& P) {
    std::ostringstream os;
    for (const auto& [m, c] : P.terms()) {
        os << '(' << m.cre_a << ',' << m.ann_a << ',' << m.cre_b << ',' << m.ann_b << ';'
           << m.harmonic << ") " << m.operator_string() << " : (" << format_double(c.real()) << ','
           << format_double(c.imag()) << ")\n";
    }
    return os.str();
}

}  // namespace okerr::sym

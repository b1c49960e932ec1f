#include "optokerr/cats.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "optokerr/error.hpp"
#include "optokerr/fock.hpp"

namespace okerr::cats {

namespace {

constexpr Complex I{0.0, 1.0};

Vector normalized_coherent(Complex amp, int dim) {
    if (!truncation_adequate(amp, dim)) {
        throw InputError("truncation of " + std::to_string(dim) +
                         " levels is too small for the coherent amplitude");
    }
    Vector c = fock::coherent_amplitudes(dim, amp);
    return c / c.norm();
}

}  // namespace

bool truncation_adequate(Complex amp, int dim) {
    if (dim < 2) {
        return false;
    }
    const Vector c = fock::coherent_amplitudes(dim, amp);
    return std::norm(c(dim - 1)) < fock::truncation_tolerance;
}

Vector kerr_cat(Complex amp, double theta, int dim) {
    Vector psi = normalized_coherent(amp, dim);
    for (int n = 0; n < dim; ++n) {
        psi(n) *= std::exp(I * (theta * n * n));
    }
    return psi;
}

Vector ys_cat(Complex amp, int dim) {
    const double q = std::numbers::pi / 4.0;
    Vector psi = std::exp(I * q) * normalized_coherent(amp, dim) +
                 std::exp(-I * q) * normalized_coherent(-amp, dim);
    return psi / psi.norm();
}

Matrix reduced_cavity_dm(const CoherentSpec& spec, double t, double chi_a, double chi_ab, int dim,
                         OverlapConvention convention) {
    const Vector c = normalized_coherent(spec.alpha, dim);
    const double X = convention == OverlapConvention::beta_sq ? std::norm(spec.beta)
                                                              : std::norm(spec.alpha);
    Matrix rho(dim, dim);
    for (int n = 0; n < dim; ++n) {
        for (int m = 0; m < dim; ++m) {
            const double kerr = chi_a * t * static_cast<double>(n * n - m * m);
            const Complex dephase = X * (std::exp(-I * (chi_ab * t * (n - m))) - 1.0);
            rho(n, m) = c(n) * std::conj(c(m)) * std::exp(I * kerr + dephase);
        }
    }
    return rho;
}

RevivalReport revival_analysis(const CoherentSpec& spec, double chi_a, double chi_ab, double chi_b,
                               int dim) {
    if (chi_ab == 0.0) {
        throw InputError("revival_analysis: cross-Kerr rate must be nonzero");
    }
    RevivalReport r;
    r.time = 2.0 * std::numbers::pi / std::abs(chi_ab);
    const Matrix rho = reduced_cavity_dm(spec, r.time, chi_a, chi_ab, dim);
    r.fidelity_plus_alpha = fock::fidelity(rho, normalized_coherent(spec.alpha, dim));
    r.fidelity_minus_alpha = fock::fidelity(rho, normalized_coherent(-spec.alpha, dim));
    r.fidelity_cat = fock::fidelity(rho, ys_cat(spec.alpha, dim));
    r.purity = fock::purity(rho);

    r.mech_phase = chi_b * r.time;
    r.mech_phase_residual = std::remainder(r.mech_phase, 2.0 * std::numbers::pi);
    int dim_b = 2;
    while (!truncation_adequate(spec.beta, dim_b)) {
        ++dim_b;
    }
    const Vector b0 = normalized_coherent(spec.beta, dim_b);
    r.mech_fidelity = fock::fidelity(b0, kerr_cat(spec.beta, r.mech_phase, dim_b));
    return r;
}

RevivalReport revival_analysis(const CoherentSpec& spec, double ratio, int dim,
                               double mech_ratio) {
    return revival_analysis(spec, ratio, 1.0, mech_ratio, dim);
}

CoherenceTimes coherence_times(const PhysicalParams& p, const CoherentSpec& spec) {
    if (!(p.cavity_decay > 0.0) || !(p.mech_decay > 0.0)) {
        throw InputError("coherence_times: decay rates must be positive");
    }
    const double kappa = to_angular(p.cavity_decay);
    const double gamma = to_angular(p.mech_decay);
    const double nbar = resolve_mean_occupation(p);
    const double inf = std::numeric_limits<double>::infinity();
    const double na = std::norm(spec.alpha);
    const double nb = std::norm(spec.beta);
    CoherenceTimes out;
    out.tau_a = na > 0.0 ? 1.0 / (2.0 * kappa * na) : inf;
    out.tau_b = nb > 0.0 ? 1.0 / (2.0 * gamma * (2.0 * nbar + 1.0) * nb) : inf;
    out.cavity_ratio = 2.0 * na;
    out.mech_ratio = 2.0 * (2.0 * nbar + 1.0) * nb;
    return out;
}

double cat_visibility(const Matrix& rho, Complex amp) {
    const int dim = static_cast<int>(rho.rows());
    const Vector plus = normalized_coherent(amp, dim);
    const Vector minus = normalized_coherent(-amp, dim);
    const double pp = (plus.adjoint() * rho * plus)(0).real();
    const double mm = (minus.adjoint() * rho * minus)(0).real();
    const Complex pm = (plus.adjoint() * rho * minus)(0);
    if (pp <= 0.0 || mm <= 0.0) {
        return 0.0;
    }
    return std::abs(pm) / std::sqrt(pp * mm);
}

}  // namespace okerr::cats

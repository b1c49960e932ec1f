#ifndef OPTOKERR_CATS_HPP
#define OPTOKERR_CATS_HPP

#include <complex>

#include <Eigen/Dense>

#include "optokerr/params.hpp"

namespace okerr::cats {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Coherent amplitudes of the cavity (alpha) and mechanical (beta) modes.
struct CoherentSpec {
    Complex alpha;
    Complex beta;
};

/// True when a coherent state of this amplitude leaves less than 1e-8 on the top level.
bool truncation_adequate(Complex amp, int dim);

/// exp(i theta n^2) |amp>; throws InputError if dim is too small for amp.
Vector kerr_cat(Complex amp, double theta, int dim);

/// [e^{i pi/4} |amp> + e^{-i pi/4} |-amp>] / sqrt(2), renormalized on dim levels.
Vector ys_cat(Complex amp, int dim);

/// Which occupation enters the dephasing exponent of the reduced cavity state.
enum class OverlapConvention { beta_sq, alpha_sq };

/*
 * Cavity state after tracing out the mechanics under the number-conserving Kerr
 * Hamiltonian:
 *   rho[n,m] = c_n c_m* e^{i chi_a (n^2 - m^2) t} exp[X (e^{-i chi_ab (n - m) t} - 1)]
 * with c_n the coherent amplitudes of alpha and X = |beta|^2 (or |alpha|^2).
 */
Matrix reduced_cavity_dm(const CoherentSpec& spec, double t, double chi_a, double chi_ab, int dim,
                         OverlapConvention convention = OverlapConvention::beta_sq);

struct RevivalReport {
    double time = 0.0;  // 2 pi / chi_ab
    double fidelity_plus_alpha = 0.0;
    double fidelity_minus_alpha = 0.0;
    double fidelity_cat = 0.0;
    double purity = 0.0;
    // Mechanical factor e^{i chi_b t n^2} |beta> at the same time.
    double mech_phase = 0.0;           // chi_b t
    double mech_phase_residual = 0.0;  // distance to the nearest multiple of 2 pi, in (-pi, pi]
    double mech_fidelity = 0.0;        // |<beta| e^{i chi_b t n^2} |beta>|^2
};

/// Throws InputError when chi_ab = 0.
RevivalReport revival_analysis(const CoherentSpec& spec, double chi_a, double chi_ab, double chi_b,
                               int dim);

/// Same with chi_ab = 1 and chi_a = ratio.
RevivalReport revival_analysis(const CoherentSpec& spec, double ratio, int dim,
                               double mech_ratio = 0.0);

struct CoherenceTimes {
    double tau_a = 0.0;  // s; +inf when alpha = 0
    double tau_b = 0.0;
    double cavity_ratio = 0.0;  // 1 / (tau_a kappa)
    double mech_ratio = 0.0;    // 1 / (tau_b gamma)
};

/// tau_a = 1 / (2 kappa |alpha|^2), tau_b = 1 / (2 gamma (2 Nbar + 1) |beta|^2), angular rates.
CoherenceTimes coherence_times(const PhysicalParams& p, const CoherentSpec& spec);

/// |<a|rho|-a>| / sqrt(<a|rho|a><-a|rho|-a>): 1 for a pure cat, 0 for a mixture.
double cat_visibility(const Matrix& rho, Complex amp);

}  // namespace okerr::cats

#endif

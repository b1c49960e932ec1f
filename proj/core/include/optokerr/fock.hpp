#ifndef OPTOKERR_FOCK_HPP
#define OPTOKERR_FOCK_HPP

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "optokerr/params.hpp"
#include "optokerr/symalg.hpp"

namespace okerr::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr int default_dimension_cap = 4096;

/// Occupation of the top retained level above which a run is flagged as under-truncated.
inline constexpr double truncation_tolerance = 1e-8;

/*
 * Two-mode number basis |n_a> (x) |n_b>, n_b varying fastest.
 */
class FockSpace {
public:
    FockSpace(int dim_a, int dim_b, int cap = default_dimension_cap);

    int dim_a() const { return dim_a_; }
    int dim_b() const { return dim_b_; }
    int dim() const { return dim_a_ * dim_b_; }
    int index(int n_a, int n_b) const { return n_a * dim_b_ + n_b; }

    friend bool operator==(const FockSpace&, const FockSpace&) = default;

private:
    int dim_a_;
    int dim_b_;
};

/// ceil(|amp|^2 + 5 |amp| + 10): a Poisson-tail bound for a coherent amplitude.
int truncation_for(Complex amp);

struct ModeOperators {
    Matrix a, a_dag, b, b_dag, n_a, n_b;
};

ModeOperators build_mode_operators(const FockSpace& sp);

/// Single-mode lowering operator on dim levels.
Matrix lowering(int dim);

/*
 * H = w_c n_a + W n_b - chi_a n_a^2 + chi_ab n_a n_b - chi_b n_b^2
 *     + i eps (a+ - a) + i eta (b+ - b)
 */
Matrix build_effective_hamiltonian(const EffectiveParams& ep, const DriveParams& d,
                                   const FockSpace& sp);

/*
 * Interaction-picture Hamiltonian, stored by harmonic: H(t) = sum_k e^{ik Omega t} H_k,
 * k = -4..4. Powers of the displacement are formed on a padded space and cropped,
 * so every block is the exact projection of the untruncated operator.
 */
class InteractionHamiltonian {
public:
    InteractionHamiltonian(const CouplingRates& c, const FockSpace& sp);

    Matrix at(double t) const;
    const Matrix& component(int harmonic) const { return parts_[static_cast<std::size_t>(harmonic + 4)]; }
    double mech_freq() const { return mech_freq_; }

private:
    double mech_freq_;
    std::array<Matrix, 9> parts_;
};

Matrix build_interaction_hamiltonian(double t, const CouplingRates& c, const FockSpace& sp);
Matrix build_interaction_hamiltonian(double t, const PhysicalParams& p, const FockSpace& sp);

/// Matrix of a normal-ordered polynomial with every phase evaluated at Omega t = phase.
Matrix render(const sym::NumericPolynomial& P, const FockSpace& sp, double phase = 0.0);

// ---- states ----

Vector coherent_amplitudes(int dim, Complex amp);
Vector fock_amplitudes(int dim, int n);
Vector product_state(const Vector& mode_a, const Vector& mode_b);
Matrix density(const Vector& psi);
Matrix thermal_state(int dim, double mean_occupation);

Matrix partial_trace_b(const Matrix& rho, const FockSpace& sp);  // -> rho_a
Matrix partial_trace_a(const Matrix& rho, const FockSpace& sp);  // -> rho_b

double purity(const Matrix& rho);
/// |<phi|psi>|^2 for normalized vectors.
double fidelity(const Vector& phi, const Vector& psi);
/// <phi|rho|phi>, the Uhlmann fidelity against a pure state.
double fidelity(const Matrix& rho, const Vector& phi);

/// Largest top-level occupation across the two modes.
double top_level_occupation(const Matrix& rho, const FockSpace& sp);
double top_level_occupation(const Vector& psi, const FockSpace& sp);

// ---- unitary propagation ----

/// exp(-i H tau) psi via scaled Taylor series on the vector.
Vector apply_exponential(const Matrix& H, double tau, const Vector& psi);

using TimeDependentHamiltonian = std::function<Matrix(double)>;

struct UnitaryOptions {
    double dt = 0.0;
    double norm_tolerance = 1e-8;
    double t0 = 0.0;  // start time; the run covers [t0, t0 + T]
};

/// Time-ordered midpoint steps exp(-i H(t + dt/2) dt). Throws NumericalError on norm drift.
Vector propagate_unitary(const TimeDependentHamiltonian& H, const Vector& psi0, double T,
                         const UnitaryOptions& opt);

/// Constant Hamiltonian: a single exact exponential.
Vector propagate_unitary(const Matrix& H, const Vector& psi0, double T);

/// Interaction-picture run; enforces dt <= (2 pi / Omega) / 40.
Vector propagate_interaction(const InteractionHamiltonian& H, const Vector& psi0, double T,
                             double dt, double t0 = 0.0);

// ---- master equation ----

/// Dissipation rates (rad/s) and the mechanical bath occupation.
struct LindbladSpec {
    double kappa = 0.0;
    double gamma = 0.0;
    double mean_occupation = 0.0;

    void validate() const;
};

LindbladSpec lindblad_rates(const PhysicalParams& p);

/*
 * Generator  -i[H, rho] + (kappa/2) D[a] + (gamma/2)(N+1) D[b] + (gamma/2) N D[b+],
 * D[L] rho = 2 L rho L+ - L+L rho - rho L+L.
 */
class MasterEquation {
public:
    MasterEquation(Matrix H, const LindbladSpec& L, const FockSpace& sp);

    Matrix rhs(const Matrix& rho) const;
    const FockSpace& space() const { return space_; }
    const Matrix& hamiltonian() const { return H_; }

private:
    Matrix H_;
    bool diagonal_h_;
    Eigen::VectorXcd h_diag_;
    LindbladSpec rates_;
    FockSpace space_;
    SparseMatrix a_, b_;
    Eigen::VectorXd n_a_, n_b_;
};

Matrix lindblad_rhs(const Matrix& rho, const Matrix& H, const LindbladSpec& L,
                    const FockSpace& sp);

enum class Integrator { rk4, adaptive };

struct MasterOptions {
    Integrator method = Integrator::adaptive;
    double dt = 0.0;                // rk4 step, or initial step for adaptive
    double abs_tolerance = 1e-10;   // adaptive only
    double rel_tolerance = 1e-8;    // adaptive only
    int samples = 101;              // recorded points including t = 0 and t = T
    double positivity_floor = -1e-6;
};

struct Sample {
    double t = 0.0;
    Complex mean_a, mean_b;
    double n_a = 0.0;
    double n_b = 0.0;
    double purity = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;
};

struct Trajectory {
    std::vector<Sample> samples;
    Matrix final_state;
    double max_top_occupation = 0.0;
    bool truncation_ok = true;

    double max_trace_error() const;
    /// Columns t, re/im <a>, re/im <b>, <a+a>, <b+b>, purity, trace_error.
    std::string to_csv() const;
};

/// Throws NumericalError when a checkpoint eigenvalue falls below positivity_floor.
Trajectory integrate_master(const Matrix& rho0, const MasterEquation& eq, double T,
                            const MasterOptions& opt);

/// Expectation values used for one trajectory sample.
Sample observe(const Matrix& rho, const FockSpace& sp, double t);

}  // namespace okerr::fock

#endif

#ifndef OPTOKERR_STEADY_HPP
#define OPTOKERR_STEADY_HPP

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optokerr/params.hpp"

namespace okerr::steady {

using Complex = std::complex<double>;

enum class Stability { stable, unstable, marginal };

const char* to_string(Stability s);

/*
 * Real non-negative solutions n of  [h^2 + (detuning - 2 kerr n)^2] n = drive_sq,
 * sorted ascending. fold is set when two of the roots coincide (vanishing
 * discriminant); the coincident pair is then reported once.
 */
struct RootSet {
    std::vector<double> roots;
    bool fold = false;
};

RootSet solve_occupation(double half_width, double detuning, double kerr, double drive_sq);

/// Relative residual of one root of the equation above.
double occupation_residual(double half_width, double detuning, double kerr, double drive_sq,
                           double n);

/// Roots of the mechanical self-consistency equation at fixed cavity occupation n_a.
RootSet mech_cubic_roots(const EffectiveParams& ep, double gamma, double eta, double n_a);

/// Roots of the cavity self-consistency equation at fixed mechanical occupation n_b.
RootSet cavity_cubic_roots(const EffectiveParams& ep, double kappa, double epsilon, double n_b);

/// Effective detunings entering the two equations at a given pair of occupations.
double cavity_detuning_at(const EffectiveParams& ep, double n_a, double n_b);
double mech_detuning_at(const EffectiveParams& ep, double n_a, double n_b);

/// Drives and damping of the mean-field problem (angular rates).
struct MeanFieldDrive {
    double kappa = 0.0;
    double gamma = 0.0;
    double epsilon = 0.0;
    double eta = 0.0;
};

struct FixedPoint {
    double n_a = 0.0;
    double n_b = 0.0;
    Complex alpha;
    Complex beta;
    Stability stability = Stability::marginal;
    double residual_cavity = 0.0;
    double residual_mech = 0.0;
};

struct FixedPointOptions {
    int max_iterations = 500;
    double convergence = 1e-12;
    double dedupe = 1e-6;
    double residual_limit = 1e-9;
};

struct FixedPointSet {
    std::vector<FixedPoint> points;
    std::vector<std::string> discarded;  // one diagnostic per abandoned candidate
};

/// Stationary amplitudes alpha, beta consistent with a pair of occupations.
FixedPoint make_fixed_point(const EffectiveParams& ep, const MeanFieldDrive& drive, double n_a,
                            double n_b);

FixedPointSet coupled_fixed_points(const EffectiveParams& ep, const MeanFieldDrive& drive,
                                   const FixedPointOptions& opt = {});

/// Real Jacobian of the flow in (Re alpha, Im alpha, Re beta, Im beta).
Eigen::Matrix4d mean_field_jacobian(const FixedPoint& fp, const EffectiveParams& ep,
                                    double kappa, double gamma);

/// Stable iff every eigenvalue has negative real part; |Re| within 1e-12 max|lambda| is marginal.
Stability classify_stability(const FixedPoint& fp, const EffectiveParams& ep, double kappa,
                             double gamma);

/// Mechanical-mode stability with the cavity occupation held fixed.
Stability classify_pinned(const EffectiveParams& ep, double gamma, double eta, double n_a,
                          double n_b);

Stability classify_eigenvalues(const Eigen::VectorXcd& eigenvalues);

// ---- continuation ----

enum class Direction { up, down };

const char* to_string(Direction d);

/// One steady solution offered to the continuation at a sweep point.
struct Candidate {
    double n_b = 0.0;
    double n_a = 0.0;
    Stability stability = Stability::marginal;
};

struct SweepPoint {
    double x = 0.0;
    std::vector<Candidate> candidates;  // ascending n_b
    bool fold = false;
    std::size_t followed = 0;           // index into candidates
    bool jump = false;

    double n_b() const { return candidates[followed].n_b; }
    double n_a() const { return candidates[followed].n_a; }
    /// Bit i set when candidate i is stable.
    unsigned stability_mask() const;
};

struct Jump {
    double x_before = 0.0;  // last grid point on the old branch
    double x_after = 0.0;   // first grid point on the new branch
    double location = 0.0;  // refined edge of the multi-valued region
    double from = 0.0;
    double to = 0.0;
};

struct BranchTrace {
    std::string variable;
    Direction direction = Direction::up;
    std::vector<SweepPoint> points;
    std::vector<Jump> jumps;

    /// Columns sweep_var, n_b_branch, n_a, n_roots, stability_mask, jump_flag.
    std::string to_csv() const;
};

using PointSolver = std::function<std::vector<Candidate>(double x, bool& fold)>;

/*
 * Follows the occupied stable branch along grid (traversed in the given
 * direction). Throws InputError for an empty or non-monotone grid and
 * NumericalError when a grid point has no stable solution.
 */
BranchTrace continue_branch(std::span<const double> grid, Direction direction,
                            const PointSolver& solver, const std::string& variable,
                            std::optional<double> seed = std::nullopt);

/// Fixed inputs of a sweep; pinned_n_a holds the cavity occupation fixed.
struct SweepSetup {
    EffectiveParams ep;
    MeanFieldDrive drive;
    std::optional<double> pinned_n_a;
};

/// Sweep over the mechanical drive amplitude eta (rad/s).
BranchTrace hysteresis_sweep(const SweepSetup& setup, std::span<const double> eta_grid,
                             Direction direction, std::optional<double> seed = std::nullopt);

/// Sweep over the mechanical detuning delta (rad/s); Omega_tilde is recomputed per point.
BranchTrace detuning_sweep(const SweepSetup& setup, std::span<const double> delta_grid,
                           Direction direction, std::optional<double> seed = std::nullopt);

/// Candidates at one sweep point.
std::vector<Candidate> solve_point(const SweepSetup& setup, bool& fold);

/// Evenly spaced grid including both ends.
std::vector<double> linear_grid(double start, double stop, int points);

}  // namespace okerr::steady

#endif

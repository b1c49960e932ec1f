#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "optokerr/cats.hpp"
#include "optokerr/error.hpp"
#include "optokerr/fock.hpp"
#include "oracles.hpp"

using namespace okerr;
using namespace okerr::cats;

namespace {

constexpr double pi = std::numbers::pi;
constexpr Complex I(0.0, 1.0);

Vector coherent(Complex amp, int dim) {
    Vector c = fock::coherent_amplitudes(dim, amp);
    return c / c.norm();
}

// Cavity state from the full two-mode unitary, exponentiated densely, then traced.
Matrix traced_oracle(const CoherentSpec& spec, double t, double chi_a, double chi_ab, int dim_a, int dim_b) {
    const fock::FockSpace sp(dim_a, dim_b);
    const Matrix na = oracle::kron(oracle::ladder(dim_a).adjoint() * oracle::ladder(dim_a), Matrix::Identity(dim_b, dim_b));
    const Matrix nb = oracle::kron(Matrix::Identity(dim_a, dim_a), oracle::ladder(dim_b).adjoint() * oracle::ladder(dim_b));
    const Matrix H = -chi_a * na * na + chi_ab * na * nb;
    const Matrix U = (-I * t * H).exp();
    const Vector psi = U * fock::product_state(coherent(spec.alpha, dim_a), coherent(spec.beta, dim_b));
    return fock::partial_trace_b(psi * psi.adjoint(), sp);
}

double min_eigenvalue(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

// ---- states ----

TEST(KerrCat, HalfTurnFlipsTheAmplitude) {
    const Complex amp(1.3, 0.4);
    EXPECT_NEAR(fock::fidelity(kerr_cat(amp, pi, 30), coherent(-amp, 30)), 1.0, 1e-12);
    EXPECT_NEAR(fock::fidelity(kerr_cat(amp, 2.0 * pi, 30), coherent(amp, 30)), 1.0, 1e-12);
}

TEST(KerrCat, QuarterTurnIsTheSuperposition) {
    const Complex amp(2.0, 0.0);
    EXPECT_NEAR(fock::fidelity(kerr_cat(amp, pi / 2.0, 40), ys_cat(amp, 40)), 1.0, 1e-12);
    const Vector want = (std::exp(I * pi / 4.0) * coherent(amp, 40) + std::exp(-I * pi / 4.0) * coherent(-amp, 40)).normalized();
    EXPECT_LT((ys_cat(amp, 40) - want).norm(), 1e-14);
}

TEST(KerrCat, MatchesDenseExponential) {
    const int dim = 24;
    const Complex amp(1.5, -0.5);
    Matrix n2 = Matrix::Zero(dim, dim);
    const Matrix n = oracle::ladder(dim).adjoint() * oracle::ladder(dim);
    n2 = n * n;
    for (double theta : {pi, 0.37, pi / 3.0}) {
        const Vector want = (I * theta * n2).exp() * coherent(amp, dim);
        EXPECT_LT((kerr_cat(amp, theta, dim) - want).norm(), 1e-10) << theta;
    }
}

TEST(KerrCat, TruncationGuard) {
    EXPECT_FALSE(truncation_adequate(2.0, 10));
    EXPECT_TRUE(truncation_adequate(2.0, 40));
    EXPECT_FALSE(truncation_adequate(0.0, 1));
    EXPECT_THROW(kerr_cat(3.0, 0.1, 12), InputError);
    EXPECT_THROW(reduced_cavity_dm({3.0, 1.0}, 0.0, 0.1, 0.1, 12), InputError);
}

// ---- reduced state ----

TEST(ReducedState, MatchesTracedTwoModeEvolution) {
    const CoherentSpec spec{Complex(1.1, 0.3), Complex(0.8, -0.6)};
    for (double t : {0.0, 0.41, 1.9, 5.2}) {
        const Matrix want = traced_oracle(spec, t, 0.3, 0.7, 16, 16);
        EXPECT_LT((reduced_cavity_dm(spec, t, 0.3, 0.7, 16) - want).cwiseAbs().maxCoeff(), 1e-10) << t;
    }
}

TEST(ReducedState, ConventionsAgreeOnlyForEqualMagnitudes) {
    const CoherentSpec equal{1.0, Complex(0.0, 1.0)}, unequal{1.0, 1.5};
    const double t = 0.9;
    EXPECT_LT((reduced_cavity_dm(equal, t, 0.2, 0.5, 20) -
               reduced_cavity_dm(equal, t, 0.2, 0.5, 20, OverlapConvention::alpha_sq)).norm(), 1e-14);
    EXPECT_GT((reduced_cavity_dm(unequal, t, 0.2, 0.5, 20) -
               reduced_cavity_dm(unequal, t, 0.2, 0.5, 20, OverlapConvention::alpha_sq)).norm(), 1e-2);
}

TEST(ReducedState, PurityDipsBetweenRevivals) {
    const CoherentSpec spec{1.5, std::sqrt(2.0)};
    const double start = fock::purity(reduced_cavity_dm(spec, 0.0, 0.0, 1.0, 30));
    const double mid = fock::purity(reduced_cavity_dm(spec, pi, 0.0, 1.0, 30));
    const double back = fock::purity(reduced_cavity_dm(spec, 2.0 * pi, 0.0, 1.0, 30));
    EXPECT_NEAR(start, 1.0, 1e-12);
    EXPECT_LT(mid, 0.6);
    EXPECT_NEAR(back, 1.0, 1e-12);
}

// ---- revivals ----

TEST(Revival, RatiosPickTheState) {
    const CoherentSpec spec{2.0, 1.0};
    const RevivalReport one = revival_analysis(spec, 1.0, 40);
    EXPECT_NEAR(one.fidelity_plus_alpha, 1.0, 1e-10);
    EXPECT_NEAR(one.time, 2.0 * pi, 1e-15);
    const RevivalReport half = revival_analysis(spec, 0.5, 40);
    EXPECT_NEAR(half.fidelity_minus_alpha, 1.0, 1e-10);
    EXPECT_LT(half.fidelity_plus_alpha, 1e-6);
    const RevivalReport quarter = revival_analysis(spec, 0.25, 40);
    EXPECT_NEAR(quarter.fidelity_cat, 1.0, 1e-10);
    EXPECT_NEAR(quarter.fidelity_plus_alpha, 0.5, 1e-3);
    EXPECT_NEAR(quarter.purity, 1.0, 1e-10);
}

TEST(Revival, MechanicalFactor) {
    const CoherentSpec spec{1.0, 1.0};
    const RevivalReport whole = revival_analysis(spec, 1.0, 20, 1.0);
    EXPECT_NEAR(whole.mech_phase, 2.0 * pi, 1e-12);
    EXPECT_NEAR(whole.mech_phase_residual, 0.0, 1e-12);
    EXPECT_NEAR(whole.mech_fidelity, 1.0, 1e-10);
    const RevivalReport half = revival_analysis(spec, 1.0, 20, 0.5);
    EXPECT_NEAR(std::abs(half.mech_phase_residual), pi, 1e-12);
    EXPECT_NEAR(half.mech_fidelity, std::exp(-4.0), 1e-8);  // truncated at the 1e-8 tail
    const RevivalReport negative = revival_analysis(spec, 0.3, -2.0, 0.0, 20);
    EXPECT_NEAR(negative.time, pi, 1e-15);
}

TEST(Revival, RequiresCrossKerr) {
    EXPECT_THROW(revival_analysis({1.0, 1.0}, 0.3, 0.0, 0.0, 20), InputError);
}

// ---- decoherence ----

TEST(CoherenceTimes, Formulas) {
    PhysicalParams p;
    p.mech_freq = 1e6;
    p.coupling = 1.0;
    p.cavity_decay = 1.0 / (2.0 * pi);
    p.mech_decay = 1.0 / (2.0 * pi);
    p.mean_occupation = 0.5;
    const CoherenceTimes ct = coherence_times(p, {std::sqrt(2.0), std::sqrt(2.0)});
    EXPECT_NEAR(ct.tau_a, 0.25, 1e-15);
    EXPECT_NEAR(ct.tau_b, 0.125, 1e-15);
    EXPECT_NEAR(ct.cavity_ratio, 4.0, 1e-15);
    EXPECT_NEAR(ct.mech_ratio, 8.0, 1e-14);
    const CoherenceTimes none = coherence_times(p, {0.0, 0.0});
    EXPECT_EQ(none.tau_a, std::numeric_limits<double>::infinity());
    EXPECT_EQ(none.tau_b, std::numeric_limits<double>::infinity());
    p.mech_decay = 0.0;
    EXPECT_THROW(coherence_times(p, {1.0, 1.0}), InputError);
}

TEST(CatVisibility, PureCatAndMixture) {
    const Complex amp = 2.0;
    const Vector cat = ys_cat(amp, 40);
    EXPECT_NEAR(cat_visibility(cat * cat.adjoint(), amp), 1.0, 1e-10);
    const Vector p = coherent(amp, 40), m = coherent(-amp, 40);
    const Matrix mix = 0.5 * (p * p.adjoint() + m * m.adjoint());
    EXPECT_LT(cat_visibility(mix, amp), 1e-3);
    EXPECT_EQ(cat_visibility(Matrix::Zero(40, 40), amp), 0.0);
}

// ---- properties ----

TEST(CatsProperty, ReducedStateIsADensityMatrix) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.5, 1.5), tt(0.0, 20.0);
    for (int trial = 0; trial < 30; ++trial) {
        const CoherentSpec spec{Complex(u(rng), u(rng)), Complex(u(rng), u(rng))};
        const double t = tt(rng);
        const Matrix rho = reduced_cavity_dm(spec, t, 0.1 * u(rng), u(rng), 30);
        EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-12);
        EXPECT_LT((rho - rho.adjoint()).norm(), 1e-12);
        EXPECT_GT(min_eigenvalue(rho), -1e-12);
        EXPECT_LE(fock::purity(rho), 1.0 + 1e-12);
        const Vector c = coherent(spec.alpha, 30);
        for (int n = 0; n < 30; ++n) {
            EXPECT_NEAR(rho(n, n).real(), std::norm(c(n)), 1e-14);
        }
    }
}

TEST(CatsProperty, PeriodicInTheRevivalTime) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> tt(0.0, 10.0);
    const CoherentSpec spec{Complex(1.2, 0.2), 1.1};
    for (int q : {1, 2, 4}) {
        for (int trial = 0; trial < 5; ++trial) {
            const double t = tt(rng), chi_ab = 0.8;
            const double period = q * 2.0 * pi / chi_ab;
            const Matrix a = reduced_cavity_dm(spec, t, chi_ab / q, chi_ab, 30);
            const Matrix b = reduced_cavity_dm(spec, t + period, chi_ab / q, chi_ab, 30);
            EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-9) << "q " << q;
        }
    }
}

TEST(CatsProperty, CatStatesStayNormalized) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-2.0, 2.0), th(0.0, 2.0 * pi);
    for (int trial = 0; trial < 30; ++trial) {
        const Complex amp(u(rng), u(rng));
        EXPECT_NEAR(kerr_cat(amp, th(rng), 60).norm(), 1.0, 1e-13);
        EXPECT_NEAR(ys_cat(amp, 60).norm(), 1.0, 1e-13);
    }
}

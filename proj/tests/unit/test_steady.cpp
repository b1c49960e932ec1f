#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "optokerr/error.hpp"
#include "optokerr/steady.hpp"
#include "oracles.hpp"

using namespace okerr;
using namespace okerr::steady;

namespace {

// Kerr-oscillator sweep with the cavity held empty: bistable for eta in a middle band.
SweepSetup kerr_setup() {
    SweepSetup s;
    s.ep.chi_b = 0.01;
    s.ep.Omega_tilde = 3.0 + s.ep.chi_b;
    s.drive = {1.0, 1.0, 0.0, 0.0};
    s.pinned_n_a = 0.0;
    return s;
}

std::vector<double> grid(double lo, double hi, int n) { return linear_grid(lo, hi, n); }

// Fixed points of the coupled problem when the cavity is linear, by a sign-change scan
// of the mechanical equation with n_a eliminated.
std::vector<double> linear_cavity_oracle(const EffectiveParams& ep, const MeanFieldDrive& d) {
    auto n_a_of = [&](double nb) {
        const double D = ep.omega_c_tilde + ep.chi_ab * nb;
        return d.epsilon * d.epsilon / (0.25 * d.kappa * d.kappa + D * D);
    };
    auto f = [&](double nb) {
        const double D = ep.Omega_tilde - ep.chi_b - 2.0 * ep.chi_b * nb + ep.chi_ab * n_a_of(nb);
        return (0.25 * d.gamma * d.gamma + D * D) * nb - d.eta * d.eta;
    };
    const double n_max = 1.001 * d.eta * d.eta / (0.25 * d.gamma * d.gamma);
    const int cells = 200000;
    std::vector<double> roots;
    double x0 = 0.0, f0 = f(0.0);
    for (int i = 1; i <= cells; ++i) {
        const double x1 = n_max * i / cells, f1 = f(x1);
        if ((f0 < 0.0) != (f1 < 0.0)) {
            double lo = x0, hi = x1;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                ((f(mid) < 0.0) == (f0 < 0.0) ? lo : hi) = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

Eigen::Matrix4d finite_difference_jacobian(const oracle::MeanField& mf, Complex a, Complex b) {
    Eigen::Matrix4d J;
    const double h = 1e-6 * std::max({std::abs(a), std::abs(b), 1.0});
    for (int k = 0; k < 4; ++k) {
        Eigen::Vector4d x(a.real(), a.imag(), b.real(), b.imag());
        Eigen::Vector4d xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        auto eval = [&](const Eigen::Vector4d& v) {
            auto [da, db] = mf.rhs({v[0], v[1]}, {v[2], v[3]});
            return Eigen::Vector4d(da.real(), da.imag(), db.real(), db.imag());
        };
        J.col(k) = (eval(xp) - eval(xm)) / (2.0 * h);
    }
    return J;
}

}  // namespace

// ---- single-mode cubic ----

TEST(SolveOccupation, ThreeKnownRoots) {
    // 4 n^3 - 24 n^2 + 44 n - 24 = 4 (n-1)(n-2)(n-3)
    const RootSet r = solve_occupation(std::sqrt(8.0), 6.0, 1.0, 24.0);
    ASSERT_EQ(r.roots.size(), 3u);
    EXPECT_NEAR(r.roots[0], 1.0, 1e-12);
    EXPECT_NEAR(r.roots[1], 2.0, 1e-12);
    EXPECT_NEAR(r.roots[2], 3.0, 1e-12);
    EXPECT_FALSE(r.fold);
}

TEST(SolveOccupation, DoubleRootIsAFold) {
    // 4 (n-1)^2 (n-2)
    const RootSet r = solve_occupation(2.0, 4.0, 1.0, 8.0);
    EXPECT_TRUE(r.fold);
    ASSERT_EQ(r.roots.size(), 2u);
    EXPECT_NEAR(r.roots[0], 1.0, 1e-7);
    EXPECT_NEAR(r.roots[1], 2.0, 1e-12);
}

TEST(SolveOccupation, LinearAndDegenerateCases) {
    const RootSet lin = solve_occupation(0.5, 2.0, 0.0, 3.0);
    ASSERT_EQ(lin.roots.size(), 1u);
    EXPECT_DOUBLE_EQ(lin.roots[0], 3.0 / 4.25);
    EXPECT_EQ(solve_occupation(1.0, 3.0, 0.2, 0.0).roots, std::vector<double>{0.0});
    EXPECT_TRUE(solve_occupation(0.0, 0.0, 0.0, 1.0).roots.empty());
    EXPECT_THROW(solve_occupation(1.0, 1.0, 1.0, -1.0), InputError);
}

TEST(SolveOccupation, NegativeKerrMirrorsDetuning) {
    const RootSet pos = solve_occupation(std::sqrt(8.0), 6.0, 1.0, 24.0);
    const RootSet neg = solve_occupation(std::sqrt(8.0), -6.0, -1.0, 24.0);
    ASSERT_EQ(pos.roots.size(), neg.roots.size());
    for (std::size_t i = 0; i < pos.roots.size(); ++i) {
        EXPECT_NEAR(pos.roots[i], neg.roots[i], 1e-12);
    }
}

TEST(SolveOccupation, LabBistablePointMatchesScan) {
    // pinned cavity 2.83e9, cross-Kerr 4.59e-8 Hz, eta/gamma = 23.8 (inside the loop)
    PhysicalParams p;
    p.mech_freq = 36.2e6;
    p.coupling = 0.83;
    p.cubic = 1.0;
    p.quartic = 0.05;
    p.cavity_decay = 242e3;
    p.mech_decay = 228.0;
    p.bath_temp = 0.014;
    DriveParams d;
    d.cavity_detuning = 1e-2 * to_angular(p.mech_freq);
    d.mech_detuning = -1e-5 * to_angular(p.mech_freq);
    EffectiveParams ep = derive_effective(p, d);
    ep.chi_ab = to_angular(4.59e-8);
    const double gamma = to_angular(p.mech_decay), eta = 23.8 * gamma, n_a = 2.83e9;
    const RootSet r = mech_cubic_roots(ep, gamma, eta, n_a);
    const double A = ep.Omega_tilde - ep.chi_b + ep.chi_ab * n_a;
    const auto want = oracle::scan_roots(0.5 * gamma, A, ep.chi_b, eta * eta, 1.01 * 4.0 * eta * eta / (gamma * gamma));
    ASSERT_EQ(want.size(), 3u);
    ASSERT_EQ(r.roots.size(), 3u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(r.roots[i], want[i], 1e-9 * want[2]);
    }
}

TEST(SolveOccupation, ResidualHelper) {
    EXPECT_LT(occupation_residual(std::sqrt(8.0), 6.0, 1.0, 24.0, 2.0), 1e-15);
    EXPECT_NEAR(occupation_residual(0.0, 0.0, 0.0, 1.0, 0.0), 1.0, 1e-15);
    EXPECT_EQ(occupation_residual(1.0, 1.0, 1.0, 0.0, 0.0), 0.0);
}

TEST(SteadyProperty, RootsMatchSignChangeScan) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.05, 1.0), det(-6.0, 6.0), kerr(-0.2, 0.2), drive(0.0, 30.0);
    int multi = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const double h = u(rng), A = det(rng), chi = kerr(rng), F = drive(rng);
        const RootSet r = solve_occupation(h, A, chi, F);
        const double n_max = 1.001 * F / (h * h);
        const auto want = oracle::scan_roots(h, A, chi, F, n_max, 100000);
        bool close_pair = false;
        for (std::size_t i = 1; i < want.size(); ++i) {
            close_pair |= want[i] - want[i - 1] < 1e-3 * n_max;
        }
        if (close_pair || r.fold) {
            continue;
        }
        multi += want.size() > 1;
        ASSERT_EQ(r.roots.size(), want.size()) << h << ' ' << A << ' ' << chi << ' ' << F;
        for (std::size_t i = 0; i < want.size(); ++i) {
            EXPECT_NEAR(r.roots[i], want[i], 1e-9 * std::max(n_max, 1.0));
            EXPECT_LT(occupation_residual(h, A, chi, F, r.roots[i]), 1e-10);
        }
    }
    EXPECT_GT(multi, 10);
}

TEST(SteadyProperty, RootsAreSortedNonNegativeAndDistinct) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 1.0), det(-10.0, 10.0), kerr(-1.0, 1.0), drive(0.0, 100.0);
    for (int trial = 0; trial < 500; ++trial) {
        const RootSet r = solve_occupation(u(rng), det(rng), kerr(rng), drive(rng));
        ASSERT_FALSE(r.roots.empty());
        EXPECT_LE(r.roots.size(), 3u);
        for (std::size_t i = 0; i < r.roots.size(); ++i) {
            EXPECT_GE(r.roots[i], 0.0);
            if (i > 0) {
                EXPECT_LT(r.roots[i - 1], r.roots[i]);
            }
        }
    }
}

// ---- coupled fixed points ----

TEST(CoupledFixedPoints, DecoupledModesFactorize) {
    EffectiveParams ep;
    ep.chi_b = 0.01;
    ep.Omega_tilde = 3.0 + ep.chi_b;
    ep.omega_c_tilde = 0.3;
    const MeanFieldDrive d{1.0, 1.0, 0.5, 10.0};
    const FixedPointSet set = coupled_fixed_points(ep, d);
    const RootSet mech = mech_cubic_roots(ep, 1.0, 10.0, 0.0);
    ASSERT_EQ(mech.roots.size(), 3u);
    ASSERT_EQ(set.points.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(set.points[i].n_b, mech.roots[i], 1e-9);
        EXPECT_NEAR(set.points[i].n_a, 0.25 / (0.25 + 0.09), 1e-12);
    }
    // outer branches stable, middle one a saddle
    EXPECT_EQ(set.points[0].stability, Stability::stable);
    EXPECT_EQ(set.points[1].stability, Stability::unstable);
    EXPECT_EQ(set.points[2].stability, Stability::stable);
}

TEST(CoupledFixedPoints, AmplitudesSolveTheFlow) {
    EffectiveParams ep;
    ep.chi_a = 0.02;
    ep.chi_b = 0.01;
    ep.chi_ab = -0.015;
    ep.omega_c_tilde = 0.5;
    ep.Omega_tilde = 2.0;
    const MeanFieldDrive d{1.0, 0.7, 0.9, 1.1};
    const oracle::MeanField mf{ep, d.kappa, d.gamma, d.epsilon, d.eta};
    const FixedPointSet set = coupled_fixed_points(ep, d);
    ASSERT_FALSE(set.points.empty());
    for (const FixedPoint& fp : set.points) {
        auto [da, db] = mf.rhs(fp.alpha, fp.beta);
        EXPECT_LT(std::abs(da) + std::abs(db), 1e-9);
        EXPECT_NEAR(std::norm(fp.alpha), fp.n_a, 1e-9 * std::max(1.0, fp.n_a));
        EXPECT_NEAR(std::norm(fp.beta), fp.n_b, 1e-9 * std::max(1.0, fp.n_b));
    }
}

TEST(CoupledFixedPoints, NoDriveMeansVacuum) {
    EffectiveParams ep;
    ep.chi_a = 0.1;
    ep.Omega_tilde = 1.0;
    const FixedPointSet set = coupled_fixed_points(ep, {1.0, 1.0, 0.0, 0.0});
    ASSERT_EQ(set.points.size(), 1u);
    EXPECT_EQ(set.points[0].n_a, 0.0);
    EXPECT_EQ(set.points[0].n_b, 0.0);
    EXPECT_EQ(set.points[0].stability, Stability::stable);
}

TEST(SteadyProperty, LinearCavityCountsMatchScan) {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int compared = 0, multi = 0;
    for (int trial = 0; trial < 60; ++trial) {
        EffectiveParams ep;
        ep.omega_c_tilde = -1.0 + 2.0 * u(rng);
        ep.chi_b = (u(rng) < 0.5 ? -1.0 : 1.0) * (0.01 + 0.1 * u(rng));
        ep.Omega_tilde = ep.chi_b + (ep.chi_b > 0 ? 1.0 : -1.0) * 4.0 * u(rng);
        ep.chi_ab = -0.3 + 0.6 * u(rng);
        const MeanFieldDrive d{1.0, 0.3 + 0.7 * u(rng), u(rng), 0.2 + 1.5 * u(rng)};
        const auto want = linear_cavity_oracle(ep, d);
        const double n_max = 4.0 * d.eta * d.eta / (d.gamma * d.gamma);
        bool close_pair = false;
        for (std::size_t i = 1; i < want.size(); ++i) {
            close_pair |= want[i] - want[i - 1] < 1e-3 * n_max;
        }
        if (close_pair) {
            continue;
        }
        const FixedPointSet set = coupled_fixed_points(ep, d);
        ++compared;
        multi += want.size() > 1;
        ASSERT_EQ(set.points.size(), want.size()) << "trial " << trial;
        for (std::size_t i = 0; i < want.size(); ++i) {
            EXPECT_NEAR(set.points[i].n_b, want[i], 1e-7 * std::max(1.0, n_max));
        }
    }
    EXPECT_GT(compared, 40);
    EXPECT_GT(multi, 5);
}

// ---- stability ----

TEST(Stability, EigenvalueClassification) {
    Eigen::VectorXcd ev(3);
    ev << Complex(-1.0, 2.0), Complex(-1.0, -2.0), Complex(-0.5, 0.0);
    EXPECT_EQ(classify_eigenvalues(ev), Stability::stable);
    ev[2] = 0.1;
    EXPECT_EQ(classify_eigenvalues(ev), Stability::unstable);
    ev[2] = Complex(1e-15, 0.0);
    EXPECT_EQ(classify_eigenvalues(ev), Stability::marginal);
    EXPECT_STREQ(to_string(Stability::marginal), "marginal");
}

TEST(Stability, JacobianMatchesFiniteDifferences) {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        EffectiveParams ep;
        ep.chi_a = 0.1 * u(rng);
        ep.chi_b = 0.1 * u(rng);
        ep.chi_ab = 0.1 * u(rng);
        ep.omega_c_tilde = u(rng);
        ep.Omega_tilde = u(rng);
        const MeanFieldDrive d{1.0, 0.5, 1.0, 1.0};
        FixedPoint fp;
        fp.alpha = Complex(2.0 * u(rng), 2.0 * u(rng));
        fp.beta = Complex(2.0 * u(rng), 2.0 * u(rng));
        fp.n_a = std::norm(fp.alpha);
        fp.n_b = std::norm(fp.beta);
        const oracle::MeanField mf{ep, d.kappa, d.gamma, d.epsilon, d.eta};
        const Eigen::Matrix4d want = finite_difference_jacobian(mf, fp.alpha, fp.beta);
        EXPECT_LT((mean_field_jacobian(fp, ep, d.kappa, d.gamma) - want).norm(), 1e-6);
    }
}

TEST(SteadyProperty, StabilityAgreesWithPerturbedFlow) {
    std::mt19937_64 rng(35), kick(36);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0, unstable = 0;
    for (int trial = 0; trial < 25; ++trial) {
        EffectiveParams ep;
        ep.chi_a = 0.05 * u(rng);
        ep.chi_b = 0.02 + 0.05 * u(rng);
        ep.chi_ab = -0.05 + 0.1 * u(rng);
        ep.omega_c_tilde = ep.chi_a + 2.0 * u(rng);
        ep.Omega_tilde = ep.chi_b + 3.0 * u(rng);
        const MeanFieldDrive d{1.0, 1.0, 0.3 + u(rng), 2.0 + 8.0 * u(rng)};
        const oracle::MeanField mf{ep, d.kappa, d.gamma, d.epsilon, d.eta};
        for (const FixedPoint& fp : coupled_fixed_points(ep, d).points) {
            if (fp.stability == Stability::marginal) {
                continue;
            }
            ++checked;
            unstable += fp.stability == Stability::unstable;
            EXPECT_EQ(oracle::returns_to(mf, fp.alpha, fp.beta, kick), fp.stability == Stability::stable)
                << "trial " << trial << " n_b " << fp.n_b;
        }
    }
    EXPECT_GT(checked, 25);
    EXPECT_GT(unstable, 0);
}

TEST(Stability, PinnedClassificationOfKerrBranches) {
    const SweepSetup s = kerr_setup();
    const RootSet r = mech_cubic_roots(s.ep, 1.0, 10.0, 0.0);
    ASSERT_EQ(r.roots.size(), 3u);
    EXPECT_EQ(classify_pinned(s.ep, 1.0, 10.0, 0.0, r.roots[0]), Stability::stable);
    EXPECT_EQ(classify_pinned(s.ep, 1.0, 10.0, 0.0, r.roots[1]), Stability::unstable);
    EXPECT_EQ(classify_pinned(s.ep, 1.0, 10.0, 0.0, r.roots[2]), Stability::stable);
}

// ---- continuation ----

TEST(Continuation, KerrHysteresisLoop) {
    const SweepSetup s = kerr_setup();
    const auto g = grid(0.0, 20.0, 401);
    const BranchTrace up = hysteresis_sweep(s, g, Direction::up);
    const BranchTrace down = hysteresis_sweep(s, g, Direction::down);
    ASSERT_EQ(up.jumps.size(), 1u);
    ASSERT_EQ(down.jumps.size(), 1u);
    EXPECT_GT(up.jumps[0].to, up.jumps[0].from);
    EXPECT_LT(down.jumps[0].to, down.jumps[0].from);
    EXPECT_GT(up.jumps[0].location, down.jumps[0].location);
    EXPECT_EQ(up.points.front().x, 0.0);
    EXPECT_EQ(down.points.front().x, 20.0);
    for (const auto* tr : {&up, &down}) {
        for (const SweepPoint& p : tr->points) {
            EXPECT_EQ(p.candidates[p.followed].stability, Stability::stable);
        }
    }
}

TEST(Continuation, JumpEdgeIndependentOfGrid) {
    const SweepSetup s = kerr_setup();
    const BranchTrace coarse = hysteresis_sweep(s, grid(0.0, 20.0, 61), Direction::up);
    const BranchTrace fine = hysteresis_sweep(s, grid(0.0, 20.0, 907), Direction::up);
    ASSERT_EQ(coarse.jumps.size(), 1u);
    ASSERT_EQ(fine.jumps.size(), 1u);
    EXPECT_NEAR(coarse.jumps[0].location, fine.jumps[0].location, 1e-9);
    EXPECT_LE(fine.jumps[0].x_before, fine.jumps[0].location);
    EXPECT_GE(fine.jumps[0].x_after, fine.jumps[0].location);
}

TEST(Continuation, DetuningSweepShiftsWithCrossKerr) {
    SweepSetup s = kerr_setup();
    s.drive.eta = 10.0;
    const auto g = grid(-6.0, 12.0, 361);
    SweepSetup moved = s;
    moved.ep.chi_ab = 0.5;
    moved.pinned_n_a = 2.0;  // shifts the mechanical detuning by +1
    for (Direction dir : {Direction::up, Direction::down}) {
        const BranchTrace plain = detuning_sweep(s, g, dir);
        const BranchTrace shifted = detuning_sweep(moved, g, dir);
        ASSERT_EQ(plain.jumps.size(), 1u) << to_string(dir);
        ASSERT_EQ(shifted.jumps.size(), 1u) << to_string(dir);
        EXPECT_NEAR(plain.jumps[0].location - shifted.jumps[0].location, 1.0, 1e-9);
    }
}

TEST(Continuation, SeedSelectsUpperBranch) {
    const SweepSetup s = kerr_setup();
    const std::vector<double> g = {10.0, 10.01, 10.02};
    const BranchTrace low = hysteresis_sweep(s, g, Direction::up);
    const BranchTrace high = hysteresis_sweep(s, g, Direction::up, 1e6);
    EXPECT_LT(low.points[0].n_b(), high.points[0].n_b());
    EXPECT_EQ(high.points[0].followed, 2u);
    EXPECT_TRUE(high.jumps.empty());
}

TEST(Continuation, Errors) {
    const PointSolver unstable = [](double, bool&) {
        return std::vector<Candidate>{{1.0, 0.0, Stability::unstable}};
    };
    const PointSolver fine = [](double x, bool&) {
        return std::vector<Candidate>{{x, 0.0, Stability::stable}};
    };
    const std::vector<double> empty, repeated = {0.0, 1.0, 1.0}, ok = {0.0, 1.0};
    EXPECT_THROW(continue_branch(empty, Direction::up, fine, "x"), InputError);
    EXPECT_THROW(continue_branch(repeated, Direction::up, fine, "x"), InputError);
    try {
        continue_branch(ok, Direction::up, unstable, "eta");
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("eta = 0"), std::string::npos);
    }
    EXPECT_THROW(linear_grid(0.0, 1.0, 0), InputError);
}

TEST(Continuation, CsvLayout) {
    const PointSolver two = [](double x, bool&) {
        return std::vector<Candidate>{{x + 1.0, 0.0, Stability::unstable}, {x, 0.5, Stability::stable}};
    };
    const std::vector<double> g = {0.0, 0.25};
    const BranchTrace tr = continue_branch(g, Direction::up, two, "eta");
    EXPECT_EQ(tr.to_csv(), "sweep_var,n_b_branch,n_a,n_roots,stability_mask,jump_flag\n"
                           "0,0,0.5,2,1,0\n0.25,0.25,0.5,2,1,0\n");
}

TEST(SteadyProperty, GridEndpointsAndSpacing) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = u(rng), b = a + 1.0 + std::abs(u(rng));
        const auto g = linear_grid(a, b, 2 + trial);
        EXPECT_EQ(g.front(), a);
        EXPECT_EQ(g.back(), b);
        EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
    }
}

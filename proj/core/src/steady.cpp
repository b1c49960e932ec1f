#include "optokerr/steady.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "optokerr/error.hpp"
#include "optokerr/format.hpp"

namespace okerr::steady {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr Complex I{0.0, 1.0};

// Monic z^3 + c2 z^2 + c1 z + c0 and its derivative.
double cubic(double z, double c2, double c1, double c0) { return ((z + c2) * z + c1) * z + c0; }
double cubic_slope(double z, double c2, double c1) { return (3.0 * z + 2.0 * c2) * z + c1; }

double polish(double z, double c2, double c1, double c0) {
    for (int it = 0; it < 60; ++it) {
        const double f = cubic(z, c2, c1, c0);
        const double df = cubic_slope(z, c2, c1);
        if (df == 0.0) {
            break;
        }
        const double step = f / df;
        const double next = z - step;
        if (std::abs(cubic(next, c2, c1, c0)) >= std::abs(f)) {
            break;
        }
        z = next;
        if (std::abs(step) <= 1e-16 * std::max(std::abs(z), 1e-300)) {
            break;
        }
    }
    return z;
}

}  // namespace

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "?";
}

const char* to_string(Direction d) { return d == Direction::up ? "up" : "down"; }

double occupation_residual(double half_width, double detuning, double kerr, double drive_sq,
                           double n) {
    const double shifted = detuning - 2.0 * kerr * n;
    const double lhs = (half_width * half_width + shifted * shifted) * n;
    const double scale = std::max(std::abs(drive_sq), std::abs(lhs));
    return scale == 0.0 ? 0.0 : std::abs(lhs - drive_sq) / scale;
}

RootSet solve_occupation(double half_width, double detuning, double kerr, double drive_sq) {
    if (drive_sq < 0.0) {
        throw InputError("solve_occupation: squared drive must be non-negative");
    }
    RootSet out;
    const double h2 = half_width * half_width;
    if (kerr == 0.0) {
        const double denom = h2 + detuning * detuning;
        if (denom == 0.0) {
            if (drive_sq == 0.0) {
                out.roots.push_back(0.0);
            }
            return out;
        }
        out.roots.push_back(drive_sq / denom);
        return out;
    }

    // With y = 2 kerr n:  y^3 - 2 A y^2 + (h^2 + A^2) y - 2 kerr F = 0.
    const double rhs = 2.0 * kerr * drive_sq;
    const double S = std::max({std::abs(detuning), std::abs(half_width), std::cbrt(std::abs(rhs))});
    if (S == 0.0) {
        out.roots.push_back(0.0);
        return out;
    }
    const double c2 = -2.0 * detuning / S;
    const double c1 = (h2 + detuning * detuning) / (S * S);
    const double c0 = -rhs / (S * S * S);

    const double p = c1 - c2 * c2 / 3.0;
    const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    // 4 p^3 + 27 q^2 expanded in the monic coefficients; avoids the cancellation inside p
    const std::array<double, 5> parts = {-18.0 * c2 * c1 * c0, 4.0 * c2 * c2 * c2 * c0,
                                         -c2 * c2 * c1 * c1, 4.0 * c1 * c1 * c1, 27.0 * c0 * c0};
    double disc = 0.0;
    double disc_scale = 0.0;
    for (double t : parts) {
        disc += t;
        disc_scale += std::abs(t);
    }
    const double shift = -c2 / 3.0;

    std::vector<double> zs;
    if (disc_scale == 0.0) {
        zs.push_back(shift);  // triple root
        out.fold = true;
    } else if (std::abs(disc) <= 10.0 * eps * disc_scale) {
        zs.push_back(polish(3.0 * q / p + shift, c2, c1, c0));
        zs.push_back(-1.5 * q / p + shift);
        out.fold = true;
    } else if (disc < 0.0) {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            const double t = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
            zs.push_back(polish(t + shift, c2, c1, c0));
        }
    } else {
        const double D = q * q / 4.0 + p * p * p / 27.0;
        const double big = -std::copysign(std::cbrt(std::abs(q) / 2.0 + std::sqrt(D)), q);
        const double small = big != 0.0 ? -p / (3.0 * big) : 0.0;
        zs.push_back(polish(big + small + shift, c2, c1, c0));
    }

    double largest = 0.0;
    for (double z : zs) {
        largest = std::max(largest, std::abs(z * S / (2.0 * kerr)));
    }
    for (double z : zs) {
        double n = z * S / (2.0 * kerr);
        if (n < 0.0) {
            if (n < -1e-12 * std::max(largest, 1.0)) {
                continue;
            }
            n = 0.0;
        }
        out.roots.push_back(n);
    }
    std::sort(out.roots.begin(), out.roots.end());
    out.roots.erase(std::unique(out.roots.begin(), out.roots.end()), out.roots.end());
    return out;
}

double cavity_detuning_at(const EffectiveParams& ep, double n_a, double n_b) {
    return ep.omega_c_tilde - ep.chi_a - 2.0 * ep.chi_a * n_a + ep.chi_ab * n_b;
}

double mech_detuning_at(const EffectiveParams& ep, double n_a, double n_b) {
    return ep.Omega_tilde - ep.chi_b - 2.0 * ep.chi_b * n_b + ep.chi_ab * n_a;
}

RootSet mech_cubic_roots(const EffectiveParams& ep, double gamma, double eta, double n_a) {
    if (eta < 0.0) {
        throw InputError("mech_cubic_roots: drive must be non-negative");
    }
    return solve_occupation(0.5 * gamma, ep.Omega_tilde - ep.chi_b + ep.chi_ab * n_a, ep.chi_b,
                            eta * eta);
}

RootSet cavity_cubic_roots(const EffectiveParams& ep, double kappa, double epsilon, double n_b) {
    if (epsilon < 0.0) {
        throw InputError("cavity_cubic_roots: drive must be non-negative");
    }
    return solve_occupation(0.5 * kappa, ep.omega_c_tilde - ep.chi_a + ep.chi_ab * n_b, ep.chi_a,
                            epsilon * epsilon);
}

FixedPoint make_fixed_point(const EffectiveParams& ep, const MeanFieldDrive& drive, double n_a,
                            double n_b) {
    FixedPoint fp;
    fp.n_a = n_a;
    fp.n_b = n_b;
    const Complex den_a(0.5 * drive.kappa, cavity_detuning_at(ep, n_a, n_b));
    const Complex den_b(0.5 * drive.gamma, mech_detuning_at(ep, n_a, n_b));
    fp.alpha = den_a != 0.0 ? drive.epsilon / den_a : Complex(std::sqrt(n_a));
    fp.beta = den_b != 0.0 ? drive.eta / den_b : Complex(std::sqrt(n_b));
    fp.residual_cavity = occupation_residual(0.5 * drive.kappa, ep.omega_c_tilde - ep.chi_a + ep.chi_ab * n_b,
                                             ep.chi_a, drive.epsilon * drive.epsilon, n_a);
    fp.residual_mech = occupation_residual(0.5 * drive.gamma, ep.Omega_tilde - ep.chi_b + ep.chi_ab * n_a,
                                           ep.chi_b, drive.eta * drive.eta, n_b);
    return fp;
}

namespace {

// Newton on the pair of self-consistency equations; returns false if it stalls.
bool newton_polish(const EffectiveParams& ep, const MeanFieldDrive& drive, double& n_a,
                   double& n_b) {
    const double ka2 = 0.25 * drive.kappa * drive.kappa;
    const double gb2 = 0.25 * drive.gamma * drive.gamma;
    const double e2 = drive.epsilon * drive.epsilon;
    const double h2 = drive.eta * drive.eta;
    for (int it = 0; it < 60; ++it) {
        const double da = cavity_detuning_at(ep, n_a, n_b);
        const double db = mech_detuning_at(ep, n_a, n_b);
        Eigen::Vector2d G((ka2 + da * da) * n_a - e2, (gb2 + db * db) * n_b - h2);
        const double ra = std::abs(G(0)) / std::max({e2, (ka2 + da * da) * n_a, 1e-300});
        const double rb = std::abs(G(1)) / std::max({h2, (gb2 + db * db) * n_b, 1e-300});
        if (ra < 1e-14 && rb < 1e-14) {
            return true;
        }
        Eigen::Matrix2d J;
        J(0, 0) = ka2 + da * da - 4.0 * ep.chi_a * da * n_a;
        J(0, 1) = 2.0 * ep.chi_ab * da * n_a;
        J(1, 0) = 2.0 * ep.chi_ab * db * n_b;
        J(1, 1) = gb2 + db * db - 4.0 * ep.chi_b * db * n_b;
        const Eigen::FullPivLU<Eigen::Matrix2d> lu(J);
        if (!lu.isInvertible()) {
            return false;
        }
        const Eigen::Vector2d step = lu.solve(G);
        n_a = std::max(0.0, n_a - step(0));
        n_b = std::max(0.0, n_b - step(1));
        if (!std::isfinite(n_a) || !std::isfinite(n_b)) {
            return false;
        }
    }
    const FixedPoint fp = make_fixed_point(ep, drive, n_a, n_b);
    return fp.residual_cavity < 1e-12 && fp.residual_mech < 1e-12;
}

bool same_point(const FixedPoint& x, const FixedPoint& y, double tol) {
    auto close = [tol](double a, double b) {
        return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300}) ||
               std::abs(a - b) <= 1e-300;
    };
    return close(x.n_a, y.n_a) && close(x.n_b, y.n_b);
}

}  // namespace

FixedPointSet coupled_fixed_points(const EffectiveParams& ep, const MeanFieldDrive& drive,
                                   const FixedPointOptions& opt) {
    if (drive.epsilon < 0.0 || drive.eta < 0.0) {
        throw InputError("coupled_fixed_points: drives must be non-negative");
    }
    FixedPointSet out;

    struct Start {
        double n_b;
        std::size_t branch_a;
        std::size_t branch_b;
    };
    std::vector<Start> starts;
    std::vector<double> seeds_b = {0.0};
    for (double r : mech_cubic_roots(ep, drive.gamma, drive.eta, 0.0).roots) {
        seeds_b.push_back(r);
    }
    for (double nb0 : seeds_b) {
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                starts.push_back({nb0, i, j});
            }
        }
    }

    for (const Start& s : starts) {
        double n_b = s.n_b;
        double n_a = 0.0;
        bool converged = false;
        bool failed = false;
        for (int it = 0; it < opt.max_iterations; ++it) {
            const RootSet ra = cavity_cubic_roots(ep, drive.kappa, drive.epsilon, n_b);
            if (ra.roots.empty()) {
                failed = true;
                break;
            }
            const double na_next = ra.roots[std::min(s.branch_a, ra.roots.size() - 1)];
            const RootSet rb = mech_cubic_roots(ep, drive.gamma, drive.eta, na_next);
            if (rb.roots.empty()) {
                failed = true;
                break;
            }
            const double nb_next = rb.roots[std::min(s.branch_b, rb.roots.size() - 1)];
            const double change =
                std::max(std::abs(na_next - n_a) / std::max(std::abs(na_next), 1e-300),
                         std::abs(nb_next - n_b) / std::max(std::abs(nb_next), 1e-300));
            n_a = na_next;
            n_b = nb_next;
            if (change < opt.convergence || (n_a == 0.0 && n_b == 0.0 && it > 0)) {
                converged = true;
                break;
            }
        }
        const bool polished = !failed && newton_polish(ep, drive, n_a, n_b);
        FixedPoint fp = make_fixed_point(ep, drive, n_a, n_b);
        if (failed || !(fp.residual_cavity <= opt.residual_limit &&
                        fp.residual_mech <= opt.residual_limit)) {
            std::ostringstream os;
            os << "start n_b=" << s.n_b << " branches (" << s.branch_a << ',' << s.branch_b
               << "): " << (converged ? "converged" : "not converged after " +
                                                          std::to_string(opt.max_iterations) +
                                                          " iterations")
               << (polished ? "" : ", Newton polish failed") << ", residuals "
               << fp.residual_cavity << ", " << fp.residual_mech;
            out.discarded.push_back(os.str());
            continue;
        }
        const bool seen = std::any_of(out.points.begin(), out.points.end(), [&](const FixedPoint& q) {
            return same_point(q, fp, opt.dedupe);
        });
        if (!seen) {
            fp.stability = classify_stability(fp, ep, drive.kappa, drive.gamma);
            out.points.push_back(fp);
        }
    }
    std::sort(out.points.begin(), out.points.end(), [](const FixedPoint& x, const FixedPoint& y) {
        return std::tie(x.n_b, x.n_a) < std::tie(y.n_b, y.n_a);
    });
    return out;
}

namespace {

// Real 2x2 block of d f = A dz + B dz* in (Re z, Im z) coordinates.
Eigen::Matrix2d real_block(Complex A, Complex B) {
    Eigen::Matrix2d m;
    m << (A + B).real(), -(A - B).imag(), (A + B).imag(), (A - B).real();
    return m;
}

}  // namespace

Eigen::Matrix4d mean_field_jacobian(const FixedPoint& fp, const EffectiveParams& ep,
                                    double kappa, double gamma) {
    const Complex a = fp.alpha;
    const Complex b = fp.beta;
    const double na = std::norm(a);
    const double nb = std::norm(b);

    const Complex A_aa = -I * (ep.omega_c_tilde - ep.chi_a) - 0.5 * kappa +
                         4.0 * I * ep.chi_a * na - I * ep.chi_ab * nb;
    const Complex B_aa = 2.0 * I * ep.chi_a * a * a;
    const Complex A_ab = -I * ep.chi_ab * std::conj(b) * a;
    const Complex B_ab = -I * ep.chi_ab * b * a;

    const Complex A_bb = -I * (ep.Omega_tilde - ep.chi_b) - 0.5 * gamma +
                         4.0 * I * ep.chi_b * nb - I * ep.chi_ab * na;
    const Complex B_bb = 2.0 * I * ep.chi_b * b * b;
    const Complex A_ba = -I * ep.chi_ab * std::conj(a) * b;
    const Complex B_ba = -I * ep.chi_ab * a * b;

    Eigen::Matrix4d J;
    J.block<2, 2>(0, 0) = real_block(A_aa, B_aa);
    J.block<2, 2>(0, 2) = real_block(A_ab, B_ab);
    J.block<2, 2>(2, 0) = real_block(A_ba, B_ba);
    J.block<2, 2>(2, 2) = real_block(A_bb, B_bb);
    return J;
}

Stability classify_eigenvalues(const Eigen::VectorXcd& eigenvalues) {
    const double scale = eigenvalues.cwiseAbs().maxCoeff();
    const double margin = 1e-12 * scale;
    bool marginal = false;
    for (const Complex& l : eigenvalues) {
        if (l.real() > margin) {
            return Stability::unstable;
        }
        if (l.real() >= -margin) {
            marginal = true;
        }
    }
    return marginal ? Stability::marginal : Stability::stable;
}

Stability classify_stability(const FixedPoint& fp, const EffectiveParams& ep, double kappa,
                             double gamma) {
    const Eigen::Matrix4d J = mean_field_jacobian(fp, ep, kappa, gamma);
    return classify_eigenvalues(Eigen::EigenSolver<Eigen::Matrix4d>(J, false).eigenvalues());
}

Stability classify_pinned(const EffectiveParams& ep, double gamma, double eta, double n_a,
                          double n_b) {
    const Complex den(0.5 * gamma, mech_detuning_at(ep, n_a, n_b));
    const Complex b = den != 0.0 ? eta / den : Complex(std::sqrt(n_b));
    const Complex A = -I * (ep.Omega_tilde - ep.chi_b) - 0.5 * gamma +
                      4.0 * I * ep.chi_b * std::norm(b) - I * ep.chi_ab * n_a;
    const Complex B = 2.0 * I * ep.chi_b * b * b;
    const Eigen::Matrix2d J = real_block(A, B);
    return classify_eigenvalues(Eigen::EigenSolver<Eigen::Matrix2d>(J, false).eigenvalues());
}

// ---- continuation ----

unsigned SweepPoint::stability_mask() const {
    unsigned mask = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].stability == Stability::stable) {
            mask |= 1u << i;
        }
    }
    return mask;
}

std::string BranchTrace::to_csv() const {
    std::ostringstream os;
    os << "sweep_var,n_b_branch,n_a,n_roots,stability_mask,jump_flag\n";
    for (const auto& p : points) {
        os << format_double(p.x) << ',' << format_double(p.n_b()) << ',' << format_double(p.n_a())
           << ',' << p.candidates.size() << ',' << p.stability_mask() << ',' << (p.jump ? 1 : 0)
           << '\n';
    }
    return os.str();
}

namespace {

std::size_t nearest(const std::vector<Candidate>& cands, double value, bool stable_only) {
    std::size_t best = cands.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (stable_only && cands[i].stability != Stability::stable) {
            continue;
        }
        const double dist = std::abs(cands[i].n_b - value);
        if (dist < best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    return best;
}

}  // namespace

BranchTrace continue_branch(std::span<const double> grid, Direction direction,
                            const PointSolver& solver, const std::string& variable,
                            std::optional<double> seed) {
    if (grid.empty()) {
        throw InputError("sweep grid is empty");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw InputError("sweep grid must be strictly increasing");
        }
    }
    BranchTrace trace;
    trace.variable = variable;
    trace.direction = direction;

    auto solve_at = [&](double x, bool& fold) {
        auto cands = solver(x, fold);
        std::sort(cands.begin(), cands.end(),
                  [](const Candidate& a, const Candidate& b) { return a.n_b < b.n_b; });
        return cands;
    };

    const std::size_t n = grid.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double x = direction == Direction::up ? grid[k] : grid[n - 1 - k];
        SweepPoint pt;
        pt.x = x;
        pt.candidates = solve_at(x, pt.fold);
        const bool any_stable =
            std::any_of(pt.candidates.begin(), pt.candidates.end(),
                        [](const Candidate& c) { return c.stability == Stability::stable; });
        if (!any_stable) {
            throw NumericalError("no stable branch at " + variable + " = " + format_double(x));
        }
        if (trace.points.empty()) {
            pt.followed = seed ? nearest(pt.candidates, *seed, true) : nearest(pt.candidates, -1.0, true);
            trace.points.push_back(std::move(pt));
            continue;
        }
        const SweepPoint& prev = trace.points.back();
        if (pt.candidates.size() == prev.candidates.size() &&
            pt.candidates[prev.followed].stability == Stability::stable) {
            pt.followed = prev.followed;
        } else {
            pt.followed = nearest(pt.candidates, prev.n_b(), true);
            const std::size_t matched = nearest(prev.candidates, pt.n_b(), false);
            pt.jump = matched != prev.followed;
        }
        if (pt.jump) {
            Jump j;
            j.x_before = prev.x;
            j.x_after = x;
            j.from = prev.n_b();
            j.to = pt.n_b();
            // Bisect on whether the point is multi-valued to locate the fold.
            bool fold_dummy = false;
            const bool multi_before = prev.candidates.size() >= 2;
            const bool multi_after = pt.candidates.size() >= 2;
            double lo = prev.x;
            double hi = x;
            if (multi_before != multi_after) {
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid == lo || mid == hi) {
                        break;
                    }
                    const bool multi = solve_at(mid, fold_dummy).size() >= 2;
                    (multi == multi_before ? lo : hi) = mid;
                }
            }
            j.location = 0.5 * (lo + hi);
            trace.jumps.push_back(j);
        }
        trace.points.push_back(std::move(pt));
    }
    return trace;
}

std::vector<Candidate> solve_point(const SweepSetup& setup, bool& fold) {
    std::vector<Candidate> out;
    const MeanFieldDrive& d = setup.drive;
    if (setup.pinned_n_a) {
        const double n_a = *setup.pinned_n_a;
        const RootSet roots = mech_cubic_roots(setup.ep, d.gamma, d.eta, n_a);
        fold = roots.fold;
        for (double nb : roots.roots) {
            out.push_back({nb, n_a, classify_pinned(setup.ep, d.gamma, d.eta, n_a, nb)});
        }
        return out;
    }
    fold = false;
    for (const FixedPoint& fp : coupled_fixed_points(setup.ep, d).points) {
        out.push_back({fp.n_b, fp.n_a, fp.stability});
    }
    return out;
}

BranchTrace hysteresis_sweep(const SweepSetup& setup, std::span<const double> eta_grid,
                             Direction direction, std::optional<double> seed) {
    return continue_branch(
        eta_grid, direction,
        [&setup](double eta, bool& fold) {
            SweepSetup s = setup;
            s.drive.eta = eta;
            return solve_point(s, fold);
        },
        "eta", seed);
}

BranchTrace detuning_sweep(const SweepSetup& setup, std::span<const double> delta_grid,
                           Direction direction, std::optional<double> seed) {
    return continue_branch(
        delta_grid, direction,
        [&setup](double delta, bool& fold) {
            SweepSetup s = setup;
            s.ep = setup.ep.with_mech_detuning(delta);
            return solve_point(s, fold);
        },
        "delta", seed);
}

std::vector<double> linear_grid(double start, double stop, int points) {
    if (points < 1) {
        throw InputError("grid needs at least one point");
    }
    std::vector<double> g(static_cast<std::size_t>(points));
    if (points == 1) {
        g[0] = start;
        return g;
    }
    for (int i = 0; i < points; ++i) {
        g[static_cast<std::size_t>(i)] = start + (stop - start) * i / (points - 1);
    }
    g.back() = stop;
    return g;
}

}  // namespace okerr::steady

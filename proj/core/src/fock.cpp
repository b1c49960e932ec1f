#include "optokerr/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "optokerr/error.hpp"
#include "optokerr/format.hpp"

namespace okerr::fock {

namespace {

constexpr Complex I{0.0, 1.0};

Matrix kron(const Matrix& x, const Matrix& y) {
    return Eigen::kroneckerProduct(x, y).eval();
}

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

// a+^p a^q on a single mode: maps |n> to sqrt(n!/(n-q)! (n-q+p)!/(n-q)!) |n-q+p>.
Matrix single_mode_monomial(int dim, int cre, int ann) {
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = ann; n < dim; ++n) {
        const int mid = n - ann;
        const int out = mid + cre;
        if (out >= dim) {
            continue;
        }
        double w = 1.0;
        for (int k = mid + 1; k <= n; ++k) {
            w *= k;
        }
        for (int k = mid + 1; k <= out; ++k) {
            w *= k;
        }
        m(out, n) = std::sqrt(w);
    }
    return m;
}

}  // namespace

FockSpace::FockSpace(int dim_a, int dim_b, int cap) : dim_a_(dim_a), dim_b_(dim_b) {
    if (dim_a < 2 || dim_b < 2) {
        throw InputError("Fock truncation needs at least two levels per mode");
    }
    if (static_cast<long long>(dim_a) * dim_b > cap) {
        throw InputError("Fock space dimension " + std::to_string(dim_a) + "x" +
                         std::to_string(dim_b) + " exceeds cap " + std::to_string(cap));
    }
}

int truncation_for(Complex amp) {
    const double n = std::norm(amp);
    return static_cast<int>(std::ceil(n + 5.0 * std::sqrt(n) + 10.0));
}

Matrix lowering(int dim) {
    Matrix a = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

ModeOperators build_mode_operators(const FockSpace& sp) {
    const Matrix la = lowering(sp.dim_a());
    const Matrix lb = lowering(sp.dim_b());
    ModeOperators ops;
    ops.a = kron(la, identity(sp.dim_b()));
    ops.a_dag = ops.a.adjoint();
    ops.b = kron(identity(sp.dim_a()), lb);
    ops.b_dag = ops.b.adjoint();
    ops.n_a = ops.a_dag * ops.a;
    ops.n_b = ops.b_dag * ops.b;
    return ops;
}

Matrix build_effective_hamiltonian(const EffectiveParams& ep, const DriveParams& d,
                                   const FockSpace& sp) {
    Matrix H = Matrix::Zero(sp.dim(), sp.dim());
    for (int na = 0; na < sp.dim_a(); ++na) {
        for (int nb = 0; nb < sp.dim_b(); ++nb) {
            const double x = na;
            const double y = nb;
            const int i = sp.index(na, nb);
            H(i, i) = ep.omega_c_tilde * x + ep.Omega_tilde * y - ep.chi_a * x * x +
                      ep.chi_ab * x * y - ep.chi_b * y * y;
        }
    }
    if (d.cavity_amp != 0.0 || d.mech_amp != 0.0) {
        const ModeOperators ops = build_mode_operators(sp);
        H += I * d.cavity_amp * (ops.a_dag - ops.a);
        H += I * d.mech_amp * (ops.b_dag - ops.b);
    }
    return H;
}

InteractionHamiltonian::InteractionHamiltonian(const CouplingRates& c, const FockSpace& sp)
    : mech_freq_(c.mech_freq) {
    const int db = sp.dim_b();
    const int padded = db + 4;
    const Matrix B = lowering(padded);
    const Matrix Bd = B.adjoint();

    // powers[n][k + 4]: harmonic-k part of (e^{i phi} B+ + e^{-i phi} B)^n
    std::array<std::array<Matrix, 9>, 5> powers;
    for (auto& row : powers) {
        for (auto& m : row) {
            m = Matrix::Zero(padded, padded);
        }
    }
    powers[0][4] = identity(padded);
    for (int n = 1; n <= 4; ++n) {
        for (int k = -n; k <= n; ++k) {
            Matrix acc = Matrix::Zero(padded, padded);
            if (k - 1 >= -(n - 1)) {
                acc += powers[n - 1][k - 1 + 4] * Bd;
            }
            if (k + 1 <= n - 1) {
                acc += powers[n - 1][k + 1 + 4] * B;
            }
            powers[n][k + 4] = acc;
        }
    }

    const Matrix ia = identity(sp.dim_a());
    const Matrix na = single_mode_monomial(sp.dim_a(), 1, 1);
    for (int k = -4; k <= 4; ++k) {
        Matrix block = (c.cubic / 6.0) * powers[3][k + 4] + (c.quartic / 6.0) * powers[4][k + 4];
        Matrix part = kron(ia, block.topLeftCorner(db, db));
        if (k == 1 || k == -1) {
            part -= c.coupling * kron(na, powers[1][k + 4].topLeftCorner(db, db));
        }
        parts_[static_cast<std::size_t>(k + 4)] = part;
    }
}

Matrix InteractionHamiltonian::at(double t) const {
    Matrix H = parts_[4];
    for (int k = 1; k <= 4; ++k) {
        const Complex phase = std::exp(I * (k * mech_freq_ * t));
        H += phase * parts_[static_cast<std::size_t>(k + 4)] +
             std::conj(phase) * parts_[static_cast<std::size_t>(4 - k)];
    }
    return H;
}

Matrix build_interaction_hamiltonian(double t, const CouplingRates& c, const FockSpace& sp) {
    return InteractionHamiltonian(c, sp).at(t);
}

Matrix build_interaction_hamiltonian(double t, const PhysicalParams& p, const FockSpace& sp) {
    p.validate();
    return build_interaction_hamiltonian(t, angular_couplings(p), sp);
}

Matrix render(const sym::NumericPolynomial& P, const FockSpace& sp, double phase) {
    Matrix out = Matrix::Zero(sp.dim(), sp.dim());
    for (const auto& [m, c] : P.terms()) {
        const Complex weight = c * std::exp(I * (m.harmonic * phase));
        out += weight * kron(single_mode_monomial(sp.dim_a(), m.cre_a, m.ann_a),
                             single_mode_monomial(sp.dim_b(), m.cre_b, m.ann_b));
    }
    return out;
}

// ---- states ----

Vector coherent_amplitudes(int dim, Complex amp) {
    Vector v(dim);
    v(0) = std::exp(-0.5 * std::norm(amp));
    for (int n = 1; n < dim; ++n) {
        v(n) = v(n - 1) * amp / std::sqrt(static_cast<double>(n));
    }
    return v;
}

Vector fock_amplitudes(int dim, int n) {
    if (n < 0 || n >= dim) {
        throw InputError("number state outside truncation");
    }
    Vector v = Vector::Zero(dim);
    v(n) = 1.0;
    return v;
}

Vector product_state(const Vector& mode_a, const Vector& mode_b) {
    Vector out(mode_a.size() * mode_b.size());
    for (Eigen::Index i = 0; i < mode_a.size(); ++i) {
        out.segment(i * mode_b.size(), mode_b.size()) = mode_a(i) * mode_b;
    }
    return out;
}

Matrix density(const Vector& psi) { return psi * psi.adjoint(); }

Matrix thermal_state(int dim, double mean_occupation) {
    if (mean_occupation < 0.0) {
        throw InputError("thermal_state: negative occupation");
    }
    Matrix rho = Matrix::Zero(dim, dim);
    const double r = mean_occupation / (mean_occupation + 1.0);
    double p = 1.0;
    double total = 0.0;
    for (int n = 0; n < dim; ++n) {
        rho(n, n) = p;
        total += p;
        p *= r;
    }
    return rho / total;
}

Matrix partial_trace_b(const Matrix& rho, const FockSpace& sp) {
    Matrix out = Matrix::Zero(sp.dim_a(), sp.dim_a());
    for (int i = 0; i < sp.dim_a(); ++i) {
        for (int j = 0; j < sp.dim_a(); ++j) {
            Complex s = 0.0;
            for (int k = 0; k < sp.dim_b(); ++k) {
                s += rho(sp.index(i, k), sp.index(j, k));
            }
            out(i, j) = s;
        }
    }
    return out;
}

Matrix partial_trace_a(const Matrix& rho, const FockSpace& sp) {
    Matrix out = Matrix::Zero(sp.dim_b(), sp.dim_b());
    for (int k = 0; k < sp.dim_a(); ++k) {
        out += rho.block(sp.index(k, 0), sp.index(k, 0), sp.dim_b(), sp.dim_b());
    }
    return out;
}

double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

double fidelity(const Vector& phi, const Vector& psi) { return std::norm(phi.dot(psi)); }

double fidelity(const Matrix& rho, const Vector& phi) {
    return phi.dot(rho * phi).real();
}

double top_level_occupation(const Matrix& rho, const FockSpace& sp) {
    const Matrix ra = partial_trace_b(rho, sp);
    const Matrix rb = partial_trace_a(rho, sp);
    return std::max(std::abs(ra(sp.dim_a() - 1, sp.dim_a() - 1)),
                    std::abs(rb(sp.dim_b() - 1, sp.dim_b() - 1)));
}

double top_level_occupation(const Vector& psi, const FockSpace& sp) {
    double pa = 0.0;
    double pb = 0.0;
    for (int k = 0; k < sp.dim_b(); ++k) {
        pa += std::norm(psi(sp.index(sp.dim_a() - 1, k)));
    }
    for (int k = 0; k < sp.dim_a(); ++k) {
        pb += std::norm(psi(sp.index(k, sp.dim_b() - 1)));
    }
    return std::max(pa, pb);
}

// ---- unitary propagation ----

Vector apply_exponential(const Matrix& H, double tau, const Vector& psi) {
    const double norm1 = H.cwiseAbs().colwise().sum().maxCoeff() * std::abs(tau);
    const int substeps = std::max(1, static_cast<int>(std::ceil(norm1)));
    const Complex factor = -I * (tau / substeps);
    Vector v = psi;
    for (int s = 0; s < substeps; ++s) {
        Vector term = v;
        Vector sum = v;
        for (int k = 1; k < 200; ++k) {
            term = (factor / static_cast<double>(k)) * (H * term);
            sum += term;
            if (term.cwiseAbs().maxCoeff() <= 1e-17 * sum.cwiseAbs().maxCoeff()) {
                break;
            }
        }
        v = sum;
    }
    return v;
}

Vector propagate_unitary(const TimeDependentHamiltonian& H, const Vector& psi0, double T,
                         const UnitaryOptions& opt) {
    if (!(opt.dt > 0.0)) {
        throw InputError("propagate_unitary: step must be positive");
    }
    const double n0 = psi0.norm();
    if (std::abs(n0 - 1.0) > 1e-10) {
        throw InputError("propagate_unitary: initial state is not normalized");
    }
    const long steps = std::max(1L, static_cast<long>(std::ceil(T / opt.dt - 1e-9)));
    const double h = T / static_cast<double>(steps);
    Vector psi = psi0;
    for (long s = 0; s < steps; ++s) {
        const double t_mid = opt.t0 + (static_cast<double>(s) + 0.5) * h;
        psi = apply_exponential(H(t_mid), h, psi);
        const double drift = std::abs(psi.norm() - 1.0);
        if (drift > opt.norm_tolerance) {
            std::ostringstream os;
            os << "norm drift " << drift << " at t=" << t_mid << " with dt=" << h
               << "; reduce the step size";
            throw NumericalError(os.str());
        }
    }
    return psi;
}

Vector propagate_unitary(const Matrix& H, const Vector& psi0, double T) {
    return apply_exponential(H, T, psi0);
}

Vector propagate_interaction(const InteractionHamiltonian& H, const Vector& psi0, double T,
                             double dt, double t0) {
    const double limit = two_pi / std::abs(H.mech_freq()) / 40.0;
    if (dt > limit * (1.0 + 1e-12)) {
        throw InputError("propagate_interaction: dt must resolve the fourth harmonic (dt <= " +
                         format_double(limit) + ")");
    }
    return propagate_unitary([&H](double t) { return H.at(t); }, psi0, T, {dt, 1e-8, t0});
}

// ---- master equation ----

void LindbladSpec::validate() const {
    if (kappa < 0.0 || gamma < 0.0 || mean_occupation < 0.0) {
        throw InputError("Lindblad rates and occupation must be non-negative");
    }
}

LindbladSpec lindblad_rates(const PhysicalParams& p) {
    p.validate();
    return {to_angular(p.cavity_decay), to_angular(p.mech_decay), resolve_mean_occupation(p)};
}

MasterEquation::MasterEquation(Matrix H, const LindbladSpec& L, const FockSpace& sp)
    : H_(std::move(H)), rates_(L), space_(sp) {
    L.validate();
    if (H_.rows() != sp.dim() || H_.cols() != sp.dim()) {
        throw InputError("MasterEquation: Hamiltonian shape does not match the Fock space");
    }
    h_diag_ = H_.diagonal();
    const Matrix off = H_ - Matrix(h_diag_.asDiagonal());
    diagonal_h_ = off.cwiseAbs().maxCoeff() == 0.0;

    const ModeOperators ops = build_mode_operators(sp);
    a_ = ops.a.sparseView();
    b_ = ops.b.sparseView();
    n_a_ = ops.n_a.diagonal().real();
    n_b_ = ops.n_b.diagonal().real();
}

Matrix MasterEquation::rhs(const Matrix& rho) const {
    const Eigen::Index d = rho.rows();
    if (d != space_.dim() || rho.cols() != d) {
        throw InputError("lindblad_rhs: density matrix shape mismatch");
    }
    Matrix out(d, d);
    if (diagonal_h_) {
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index i = 0; i < d; ++i) {
                out(i, j) = -I * (h_diag_(i) - h_diag_(j)) * rho(i, j);
            }
        }
    } else {
        out.noalias() = -I * (H_ * rho);
        out.noalias() += I * (rho * H_);
    }

    const double kappa = rates_.kappa;
    const double down = rates_.gamma * (rates_.mean_occupation + 1.0);
    const double up = rates_.gamma * rates_.mean_occupation;

    // b b+ in the truncated space: n_b + 1 except on the top level, where it vanishes.
    const int top = space_.dim_b() - 1;
    for (Eigen::Index j = 0; j < d; ++j) {
        const double mbj = (j % space_.dim_b() == top) ? 0.0 : n_b_(j) + 1.0;
        for (Eigen::Index i = 0; i < d; ++i) {
            const double mbi = (i % space_.dim_b() == top) ? 0.0 : n_b_(i) + 1.0;
            const double loss = 0.5 * kappa * (n_a_(i) + n_a_(j)) +
                                0.5 * down * (n_b_(i) + n_b_(j)) + 0.5 * up * (mbi + mbj);
            out(i, j) -= loss * rho(i, j);
        }
    }
    if (kappa != 0.0) {
        out += kappa * (a_ * rho * a_.adjoint());
    }
    if (down != 0.0) {
        out += down * (b_ * rho * b_.adjoint());
    }
    if (up != 0.0) {
        out += up * (b_.adjoint() * rho * b_);
    }
    return out;
}

Matrix lindblad_rhs(const Matrix& rho, const Matrix& H, const LindbladSpec& L,
                    const FockSpace& sp) {
    return MasterEquation(H, L, sp).rhs(rho);
}

Sample observe(const Matrix& rho, const FockSpace& sp, double t) {
    Sample s;
    s.t = t;
    Complex tr = 0.0;
    for (int na = 0; na < sp.dim_a(); ++na) {
        for (int nb = 0; nb < sp.dim_b(); ++nb) {
            const int i = sp.index(na, nb);
            const double p = rho(i, i).real();
            tr += rho(i, i);
            s.n_a += na * p;
            s.n_b += nb * p;
            if (na > 0) {
                s.mean_a += std::sqrt(static_cast<double>(na)) * rho(i, sp.index(na - 1, nb));
            }
            if (nb > 0) {
                s.mean_b += std::sqrt(static_cast<double>(nb)) * rho(i, sp.index(na, nb - 1));
            }
        }
    }
    s.purity = rho.cwiseAbs2().sum();
    s.trace_error = std::abs(tr - 1.0);
    return s;
}

double Trajectory::max_trace_error() const {
    double worst = 0.0;
    for (const auto& s : samples) {
        worst = std::max(worst, s.trace_error);
    }
    return worst;
}

std::string Trajectory::to_csv() const {
    std::ostringstream os;
    os << "t,re_a,im_a,re_b,im_b,n_a,n_b,purity,trace_error\n";
    for (const auto& s : samples) {
        os << format_double(s.t) << ',' << format_double(s.mean_a.real()) << ','
           << format_double(s.mean_a.imag()) << ',' << format_double(s.mean_b.real()) << ','
           << format_double(s.mean_b.imag()) << ',' << format_double(s.n_a) << ','
           << format_double(s.n_b) << ',' << format_double(s.purity) << ','
           << format_double(s.trace_error) << '\n';
    }
    return os.str();
}

Trajectory integrate_master(const Matrix& rho0, const MasterEquation& eq, double T,
                            const MasterOptions& opt) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;

    const FockSpace& sp = eq.space();
    const Eigen::Index d = sp.dim();
    if (rho0.rows() != d || rho0.cols() != d) {
        throw InputError("integrate_master: initial state shape mismatch");
    }
    if (std::abs(rho0.trace() - 1.0) > 1e-8) {
        throw InputError("integrate_master: initial state does not have unit trace");
    }
    if (opt.samples < 2 || !(T > 0.0)) {
        throw InputError("integrate_master: need T > 0 and at least two samples");
    }
    const double dt = opt.dt > 0.0 ? opt.dt : T / 1000.0;

    // A complex matrix viewed as interleaved (re, im) doubles.
    State x(static_cast<std::size_t>(2 * d * d));
    Eigen::Map<Matrix>(reinterpret_cast<Complex*>(x.data()), d, d) = rho0;

    auto system = [&eq, d](const State& in, State& out, double) {
        Eigen::Map<const Matrix> rho(reinterpret_cast<const Complex*>(in.data()), d, d);
        Eigen::Map<Matrix>(reinterpret_cast<Complex*>(out.data()), d, d) = eq.rhs(rho);
    };

    Trajectory traj;
    auto observer = [&](const State& state, double t) {
        Eigen::Map<const Matrix> rho(reinterpret_cast<const Complex*>(state.data()), d, d);
        Sample s = observe(rho, sp, t);
        const Matrix herm = 0.5 * (rho + rho.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
        s.min_eigenvalue = solver.eigenvalues().minCoeff();
        if (s.min_eigenvalue < opt.positivity_floor) {
            std::ostringstream os;
            os << "positivity violated at t=" << t << ": eigenvalue " << s.min_eigenvalue
               << " (truncation " << sp.dim_a() << "x" << sp.dim_b() << ", dt " << dt
               << "); enlarge the truncation or reduce the step";
            throw NumericalError(os.str());
        }
        traj.max_top_occupation = std::max(traj.max_top_occupation, top_level_occupation(Matrix(rho), sp));
        traj.samples.push_back(s);
    };

    std::vector<double> times(static_cast<std::size_t>(opt.samples));
    for (int k = 0; k < opt.samples; ++k) {
        times[static_cast<std::size_t>(k)] = T * k / (opt.samples - 1);
    }

    if (opt.method == Integrator::rk4) {
        odeint::integrate_times(odeint::runge_kutta4<State>(), system, x, times.begin(),
                                times.end(), dt, observer);
    } else {
        auto stepper = odeint::make_dense_output(opt.abs_tolerance, opt.rel_tolerance,
                                                 odeint::runge_kutta_dopri5<State>());
        odeint::integrate_times(stepper, system, x, times.begin(), times.end(), dt, observer);
    }

    traj.final_state = Eigen::Map<const Matrix>(reinterpret_cast<const Complex*>(x.data()), d, d);
    traj.truncation_ok = traj.max_top_occupation < truncation_tolerance;
    return traj;
}

}  // namespace okerr::fock

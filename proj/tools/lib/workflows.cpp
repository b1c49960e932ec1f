#include "workflows.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "optokerr/error.hpp"
#include "optokerr/format.hpp"
#include "parallel.hpp"

namespace okerr::app {

namespace {

using sym::GaussianRational;
using sym::NumberPolynomial;
using sym::NumberPowers;
using sym::Rational;
using sym::SymbolicCoeff;
using sym::SymbolPowers;

SymbolicCoeff term(Rational weight, SymbolPowers s) { return {GaussianRational(weight), s}; }

const PhysicalParams& need_physical(const RunConfig& rc, const char* workflow) {
    if (!rc.physical) {
        throw InputError(std::string("config: ") + workflow + " needs a \"physical\" block");
    }
    return *rc.physical;
}

std::string fmt(double x) { return format_double(x); }

}  // namespace

NumberPolynomial reference_first_order() {
    const SymbolPowers w{0, 0, 1, 0};
    return {{NumberPowers{0, 1}, term(1, w)}, {NumberPowers{0, 2}, term(1, w)}};
}

NumberPolynomial reference_second_order() {
    const SymbolPowers gv{1, 1, 0, 1};
    const SymbolPowers vv{0, 2, 0, 1};
    const SymbolPowers gg{2, 0, 0, 1};
    return {
        {NumberPowers{1, 0}, term(1, gv)},
        {NumberPowers{0, 1}, term(Rational(-5, 6), vv)},
        {NumberPowers{2, 0}, term(-1, gg)},
        {NumberPowers{1, 1}, term(2, gv)},
        {NumberPowers{0, 2}, term(Rational(-5, 6), vv)},
    };
}

// ---- verify-averaging ----

OutputSet verify_averaging(const RunConfig& rc) {
    const auto start = std::chrono::steady_clock::now();
    const AveragingConfig& cfg = rc.averaging;
    const sym::SymbolicPolynomial H = sym::interaction_hamiltonian();
    const sym::AveragedHamiltonian av = sym::bogoliubov_effective(H, cfg.order, cfg.filter);
    const NumberPolynomial first = sym::to_number_basis(av.first_order);
    const NumberPolynomial second = sym::to_number_basis(av.second_order);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    const NumberPolynomial ref_first = reference_first_order();
    const NumberPolynomial ref_second = reference_second_order();
    const bool check_second = cfg.order == 2 && cfg.standard_filter;
    const bool ok = first == ref_first && (!check_second || second == ref_second);

    OutputSet out;
    std::ostringstream text;
    text << "# first order\n" << sym::to_text(av.first_order);
    text << "# second order\n" << sym::to_text(av.second_order);
    text << "# identity terms\nfirst order : " << av.first_order_scalar.str()
         << "\nsecond order : " << av.second_order_scalar.str() << '\n';
    out.add("averaged_terms.txt", text.str());

    std::ostringstream csv;
    std::ostringstream table;
    csv << "order,term,coefficient,reference,match\n";
    auto emit = [&](int order, const NumberPolynomial& got, const NumberPolynomial& ref, bool checked) {
        std::map<NumberPowers, int> keys;
        for (const auto& [k, c] : got) keys[k] = 1;
        if (checked) {
            for (const auto& [k, c] : ref) keys[k] = 1;
        }
        for (const auto& [k, unused] : keys) {
            const auto g = got.count(k) ? got.at(k) : SymbolicCoeff{};
            const auto r = ref.count(k) ? ref.at(k) : SymbolicCoeff{};
            const std::string match = checked ? (g == r ? "yes" : "no") : "unchecked";
            csv << order << ',' << k.str() << ",\"" << g.str() << "\",\""
                << (checked ? r.str() : "") << "\"," << match << '\n';
            table << "  order " << order << "  " << k.str() << " : " << g.str();
            if (checked && !(g == r)) {
                table << "   (expected " << r.str() << ")";
            }
            table << '\n';
        }
    };
    emit(1, first, ref_first, true);
    if (cfg.order == 2) {
        emit(2, second, ref_second, check_second);
    }
    out.add("number_terms.csv", csv.str());

    if (rc.physical) {
        const DriveParams d = rc.drive.resolve(*rc.physical);
        const EffectiveParams ep = derive_effective(*rc.physical, d);
        nlohmann::json j;
        j["omega_c_tilde_hz"] = to_ordinary(ep.omega_c_tilde);
        j["Omega_tilde_hz"] = to_ordinary(ep.Omega_tilde);
        j["chi_a_hz"] = to_ordinary(ep.chi_a);
        j["chi_b_hz"] = to_ordinary(ep.chi_b);
        j["chi_ab_hz"] = to_ordinary(ep.chi_ab);
        j["mean_occupation"] = ep.mean_occupation;
        j["valid_averaging"] = rc.physical->valid_averaging(rc.averaging_threshold);
        out.add("effective_params.json", dump(j));
    }

    std::ostringstream summary;
    summary << "averaged terms (number basis, n_a = a+a, n_b = b+b):\n" << table.str();
    summary << "derived in " << fmt(std::round(ms * 10.0) / 10.0) << " ms\n";
    if (!check_second && cfg.order == 2) {
        summary << "non-standard neglect filter: second order not compared\n";
    }
    summary << (ok ? "PASS" : "FAIL") << '\n';
    out.summary = summary.str();
    if (!ok) {
        throw NumericalError("averaged Hamiltonian differs from the reference terms\n" + table.str());
    }
    return out;
}

// ---- dynamics ----

namespace {

fock::Vector mode_vector(const ModeState& m, int dim) {
    switch (m.kind) {
        case ModeState::Kind::fock:
            return fock::fock_amplitudes(dim, m.n);
        case ModeState::Kind::coherent: {
            fock::Vector v = fock::coherent_amplitudes(dim, m.amp);
            return v / v.norm();
        }
        case ModeState::Kind::thermal:
            break;
    }
    throw InputError("config: a thermal initial state needs the master mode");
}

fock::Matrix mode_density(const ModeState& m, int dim) {
    if (m.kind == ModeState::Kind::thermal) {
        return fock::thermal_state(dim, m.mean_occupation);
    }
    return fock::density(mode_vector(m, dim));
}

OutputSet dynamics_compare(const RunConfig& rc, const DynamicsConfig& d) {
    const CouplingRates& c = d.rates;
    const fock::FockSpace sp(d.dim_a, d.dim_b);
    fock::Vector psi0 = fock::product_state(mode_vector(d.cavity, d.dim_a), mode_vector(d.mech, d.dim_b));
    psi0 /= psi0.norm();
    const double dt = d.dt.value_or(two_pi / std::abs(c.mech_freq) / 40.0);

    const sym::SymbolValues values{c.coupling, c.cubic, c.quartic, c.mech_freq};
    const sym::SymbolicPolynomial Hs = sym::interaction_hamiltonian();
    const auto configured = sym::bogoliubov_effective(Hs, rc.averaging.order, rc.averaging.filter);
    const auto complete = sym::bogoliubov_effective(Hs, 2, sym::NeglectFilter::none());
    const fock::Matrix H_cfg = fock::render(sym::evaluate(configured.operators(), values), sp);
    const fock::Matrix H_all = fock::render(sym::evaluate(complete.operators(), values), sp);
    const sym::NumericPolynomial kick =
        sym::evaluate(sym::integrate_oscillating(Hs - sym::time_average(Hs)), values);
    const fock::Matrix kick0 = fock::render(kick, sp, 0.0);
    const fock::InteractionHamiltonian H(c, sp);

    std::ostringstream csv;
    csv << "t,infidelity,infidelity_second_order,infidelity_micromotion,norm,top_occupation\n";
    fock::Vector psi = psi0;
    double t = 0.0;
    double worst_top = 0.0;
    double final_cfg = 0.0, final_all = 0.0, final_kick = 0.0;
    for (int i = 0; i < d.samples; ++i) {
        const double target = d.duration * i / (d.samples - 1);
        if (target > t) {
            psi = fock::propagate_interaction(H, psi, target - t, dt, t);
            t = target;
        }
        const fock::Vector eff_cfg = fock::propagate_unitary(H_cfg, psi0, t);
        const fock::Vector eff_all = fock::propagate_unitary(H_all, psi0, t);
        const fock::Matrix kick_t = fock::render(kick, sp, c.mech_freq * t);
        const fock::Vector eff_kick = fock::apply_exponential(
            kick_t, 1.0, fock::propagate_unitary(H_all, fock::apply_exponential(kick0, -1.0, psi0), t));
        final_cfg = 1.0 - fock::fidelity(psi, eff_cfg);
        final_all = 1.0 - fock::fidelity(psi, eff_all);
        final_kick = 1.0 - fock::fidelity(psi, eff_kick);
        const double top = fock::top_level_occupation(psi, sp);
        worst_top = std::max(worst_top, top);
        csv << fmt(t) << ',' << fmt(final_cfg) << ',' << fmt(final_all) << ',' << fmt(final_kick)
            << ',' << fmt(psi.norm()) << ',' << fmt(top) << '\n';
    }

    OutputSet out;
    out.add("dynamics_compare.csv", csv.str());
    nlohmann::json j;
    j["mode"] = "compare";
    j["dims"] = {d.dim_a, d.dim_b};
    j["duration"] = d.duration;
    j["dt"] = dt;
    j["final_infidelity"] = final_cfg;
    j["final_infidelity_second_order"] = final_all;
    j["final_infidelity_micromotion"] = final_kick;
    j["max_top_occupation"] = worst_top;
    j["truncation_ok"] = worst_top < fock::truncation_tolerance;
    out.add("dynamics_summary.json", dump(j));
    std::ostringstream s;
    s << "full vs averaged dynamics at t = " << fmt(d.duration) << ": infidelity " << fmt(final_cfg)
      << " (complete second order " << fmt(final_all) << ", with micromotion " << fmt(final_kick)
      << ")\n";
    if (!(worst_top < fock::truncation_tolerance)) {
        s << "warning: top-level occupation " << fmt(worst_top) << " exceeds the truncation tolerance\n";
    }
    out.summary = s.str();
    return out;
}

OutputSet dynamics_master(const RunConfig& rc, const DynamicsConfig& d) {
    const PhysicalParams& p = need_physical(rc, "dynamics (master)");
    const DriveParams drive = rc.drive.resolve(p);
    const EffectiveParams ep = derive_effective(p, drive);
    const fock::FockSpace sp(d.dim_a, d.dim_b);
    const fock::Matrix H = fock::build_effective_hamiltonian(ep, drive, sp);
    const fock::LindbladSpec L = fock::lindblad_rates(p);
    const fock::Matrix rho0 =
        Eigen::kroneckerProduct(mode_density(d.cavity, d.dim_a), mode_density(d.mech, d.dim_b)).eval();

    fock::MasterOptions opt;
    opt.method = d.method;
    opt.dt = d.dt.value_or(0.0);
    opt.abs_tolerance = d.abs_tolerance;
    opt.rel_tolerance = d.rel_tolerance;
    opt.samples = d.samples;
    const fock::Trajectory traj = fock::integrate_master(rho0, fock::MasterEquation(H, L, sp), d.duration, opt);

    OutputSet out;
    out.add("trajectory.csv", traj.to_csv());
    double min_eig = 0.0;
    for (const auto& s : traj.samples) {
        min_eig = std::min(min_eig, s.min_eigenvalue);
    }
    const fock::Sample& last = traj.samples.back();
    nlohmann::json j;
    j["mode"] = "master";
    j["dims"] = {d.dim_a, d.dim_b};
    j["duration_s"] = d.duration;
    j["final_n_a"] = last.n_a;
    j["final_n_b"] = last.n_b;
    j["max_trace_error"] = traj.max_trace_error();
    j["min_eigenvalue"] = min_eig;
    j["max_top_occupation"] = traj.max_top_occupation;
    j["truncation_ok"] = traj.truncation_ok;
    out.add("dynamics_summary.json", dump(j));
    std::ostringstream s;
    s << "master equation to t = " << fmt(d.duration) << " s: <a+a> = " << fmt(last.n_a)
      << ", <b+b> = " << fmt(last.n_b) << ", trace error " << fmt(traj.max_trace_error()) << '\n';
    if (!traj.truncation_ok) {
        s << "warning: top-level occupation " << fmt(traj.max_top_occupation)
          << " exceeds the truncation tolerance\n";
    }
    out.summary = s.str();
    return out;
}

}  // namespace

OutputSet run_dynamics(const RunConfig& rc) {
    const DynamicsConfig d = rc.dynamics.value_or(DynamicsConfig{});
    return d.mode == DynamicsConfig::Mode::compare ? dynamics_compare(rc, d) : dynamics_master(rc, d);
}

// ---- steady-sweep ----

namespace {

struct SweepLine {
    double label = 0.0;  // normalized cross-Kerr value
    EffectiveParams ep;
    std::optional<double> pinned;
};

nlohmann::json roots_sidecar(const steady::BranchTrace& trace) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : trace.points) {
        nlohmann::json roots = nlohmann::json::array();
        for (const auto& c : p.candidates) {
            roots.push_back({{"n_b", c.n_b}, {"n_a", c.n_a}, {"stability", steady::to_string(c.stability)}});
        }
        pts.push_back({{"x", p.x}, {"fold", p.fold}, {"followed", p.followed}, {"roots", roots}});
    }
    return {{"variable", trace.variable}, {"direction", steady::to_string(trace.direction)},
            {"points", pts}};
}

nlohmann::json jumps_json(const steady::BranchTrace& trace) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& j : trace.jumps) {
        out.push_back({{"x_before", j.x_before}, {"x_after", j.x_after}, {"location", j.location},
                       {"from", j.from}, {"to", j.to}});
    }
    return out;
}

}  // namespace

OutputSet steady_sweep(const RunConfig& rc, int threads) {
    const PhysicalParams& p = need_physical(rc, "steady-sweep");
    if (!rc.sweep) {
        throw InputError("config: steady-sweep needs a \"sweep\" block");
    }
    const SweepConfig& sw = *rc.sweep;
    const DriveParams drive = rc.drive.resolve(p);
    const EffectiveParams ep = derive_effective(p, drive);
    const double kappa = to_angular(p.cavity_decay);
    const double gamma = to_angular(p.mech_decay);
    if (!(kappa > 0.0) || !(gamma > 0.0)) {
        throw InputError("config: steady-sweep needs positive cavity_decay and mech_decay");
    }
    const bool eta_sweep = sw.variable == SweepConfig::Variable::eta;
    const double unit_hz = sw.cross_kerr_unit.value_or(to_ordinary(ep.chi_ab));
    if (!sw.cross_kerr.empty() && unit_hz == 0.0) {
        throw InputError("config: sweep.cross_kerr needs cross_kerr_unit when the derived cross-Kerr rate is zero");
    }

    std::vector<SweepLine> lines;
    if (sw.cross_kerr.empty()) {
        lines.push_back({unit_hz == 0.0 ? 0.0 : 1.0, ep, std::nullopt});
    }
    for (double value : sw.cross_kerr) {
        SweepLine line{value, ep, std::nullopt};
        line.ep.chi_ab = to_angular(value * unit_hz);
        lines.push_back(line);
    }
    for (auto& line : lines) {
        if (sw.cavity == SweepConfig::Cavity::pinned) {
            line.pinned = sw.pinned_occupation;
        } else if (sw.cavity == SweepConfig::Cavity::solve) {
            const auto roots = steady::cavity_cubic_roots(line.ep, kappa, drive.cavity_amp, 0.0);
            if (roots.roots.empty()) {
                throw NumericalError("cavity occupation equation has no root");
            }
            line.pinned = roots.roots.front();
        }
    }

    const std::vector<double> grid = steady::linear_grid(sw.start, sw.stop, sw.points);
    const std::size_t n_dir = sw.directions.size();
    std::vector<steady::BranchTrace> traces(lines.size() * n_dir);
    parallel_for(traces.size(), threads, [&](std::size_t task) {
        const SweepLine& line = lines[task / n_dir];
        const steady::Direction dir = sw.directions[task % n_dir];
        const steady::SweepSetup setup{line.ep, {kappa, gamma, drive.cavity_amp, drive.mech_amp}, line.pinned};
        steady::PointSolver solver = [&setup, eta_sweep, gamma](double x, bool& fold) {
            steady::SweepSetup s = setup;
            if (eta_sweep) {
                s.drive.eta = x * gamma;
            } else {
                s.ep = setup.ep.with_mech_detuning(to_angular(x));
            }
            return steady::solve_point(s, fold);
        };
        traces[task] = steady::continue_branch(grid, dir, solver, eta_sweep ? "eta_over_gamma" : "delta_hz");
    });

    OutputSet out;
    nlohmann::json summary;
    summary["variable"] = eta_sweep ? "eta_over_gamma" : "delta_hz";
    summary["cross_kerr_unit_hz"] = unit_hz;
    summary["lines"] = nlohmann::json::array();
    std::ostringstream text;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const SweepLine& line = lines[li];
        nlohmann::json lj;
        lj["cross_kerr"] = line.label;
        lj["chi_ab_hz"] = to_ordinary(line.ep.chi_ab);
        lj["pinned_n_a"] = line.pinned ? nlohmann::json(*line.pinned) : nlohmann::json(nullptr);
        lj["sweeps"] = nlohmann::json::array();
        std::optional<double> up_jump, down_jump;
        double multi_lo = std::numeric_limits<double>::infinity();
        double multi_hi = -std::numeric_limits<double>::infinity();
        text << "line " << li << " (cross-Kerr " << fmt(line.label) << "):";
        for (std::size_t di = 0; di < n_dir; ++di) {
            const steady::BranchTrace& tr = traces[li * n_dir + di];
            const std::string stem = "sweep_l" + std::to_string(li) + "_" + steady::to_string(tr.direction);
            out.add(stem + ".csv", tr.to_csv());
            out.add(stem + "_roots.json", dump(roots_sidecar(tr)));
            lj["sweeps"].push_back({{"direction", steady::to_string(tr.direction)},
                                    {"file", stem + ".csv"},
                                    {"jumps", jumps_json(tr)}});
            if (tr.jumps.size() == 1) {
                (tr.direction == steady::Direction::up ? up_jump : down_jump) = tr.jumps.front().location;
            }
            for (const auto& pt : tr.points) {
                if (pt.candidates.size() >= 2) {
                    multi_lo = std::min(multi_lo, pt.x);
                    multi_hi = std::max(multi_hi, pt.x);
                }
            }
            text << ' ' << steady::to_string(tr.direction) << " jumps " << tr.jumps.size();
            for (const auto& j : tr.jumps) {
                text << " @" << fmt(j.location);
            }
            text << ';';
        }
        lj["hysteresis_window"] =
            up_jump && down_jump ? nlohmann::json(*up_jump - *down_jump) : nlohmann::json(nullptr);
        lj["multivalued_grid_range"] = multi_lo <= multi_hi ? nlohmann::json({multi_lo, multi_hi})
                                                            : nlohmann::json(nullptr);
        summary["lines"].push_back(lj);
        text << (multi_lo <= multi_hi ? " bistable" : " single-valued") << '\n';
    }
    out.add("sweep_summary.json", dump(summary));
    out.summary = text.str();
    return out;
}

// ---- cat ----

OutputSet run_cat(const RunConfig& rc, int threads) {
    const CatConfig c = rc.cat.value_or(CatConfig{});
    const cats::CoherentSpec spec{c.alpha, c.beta};
    const int dim = c.dim.value_or(fock::truncation_for(c.alpha));
    if (!cats::truncation_adequate(c.alpha, dim)) {
        throw InputError("config: cat.dim " + std::to_string(dim) + " is too small for alpha");
    }

    std::optional<EffectiveParams> ep;
    if (rc.physical) {
        ep = derive_effective(*rc.physical, rc.drive.resolve(*rc.physical));
    }
    double mech_ratio = 0.0;
    if (c.mech_ratio) {
        mech_ratio = *c.mech_ratio;
    } else if (ep && ep->chi_ab != 0.0) {
        mech_ratio = ep->chi_b / ep->chi_ab;
    }

    std::vector<cats::RevivalReport> reports(c.ratios.size());
    std::vector<std::vector<double>> curves(c.ratios.size());
    parallel_for(c.ratios.size(), threads, [&](std::size_t i) {
        reports[i] = cats::revival_analysis(spec, c.ratios[i], dim, mech_ratio);
        for (int k = 0; k < c.purity_samples; ++k) {
            const double t = 2.0 * std::numbers::pi * k / (c.purity_samples - 1);
            curves[i].push_back(fock::purity(cats::reduced_cavity_dm(spec, t, c.ratios[i], 1.0, dim, c.convention)));
        }
    });

    nlohmann::json j;
    j["alpha"] = {c.alpha.real(), c.alpha.imag()};
    j["beta"] = {c.beta.real(), c.beta.imag()};
    j["dim"] = dim;
    j["convention"] = c.convention == cats::OverlapConvention::beta_sq ? "beta_sq" : "alpha_sq";
    j["kerr_cat_half_pi_vs_superposition"] =
        fock::fidelity(cats::kerr_cat(c.alpha, std::numbers::pi / 2.0, dim), cats::ys_cat(c.alpha, dim));
    {
        const double t = std::numbers::pi / 2.0;
        const double r = c.ratios.front();
        const auto a = cats::reduced_cavity_dm(spec, t, r, 1.0, dim, cats::OverlapConvention::beta_sq);
        const auto b = cats::reduced_cavity_dm(spec, t, r, 1.0, dim, cats::OverlapConvention::alpha_sq);
        j["convention_discrepancy_quarter_period"] = (a - b).cwiseAbs().maxCoeff();
    }
    j["revivals"] = nlohmann::json::array();
    std::ostringstream text;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        j["revivals"].push_back({{"ratio", c.ratios[i]},
                                 {"fidelity_plus_alpha", r.fidelity_plus_alpha},
                                 {"fidelity_minus_alpha", r.fidelity_minus_alpha},
                                 {"fidelity_cat", r.fidelity_cat},
                                 {"purity", r.purity},
                                 {"mech_phase", r.mech_phase},
                                 {"mech_phase_residual", r.mech_phase_residual},
                                 {"mech_fidelity", r.mech_fidelity}});
        text << "ratio " << fmt(c.ratios[i]) << ": F(+alpha) " << fmt(r.fidelity_plus_alpha)
             << ", F(-alpha) " << fmt(r.fidelity_minus_alpha) << ", F(cat) " << fmt(r.fidelity_cat)
             << ", purity " << fmt(r.purity) << '\n';
    }
    if (rc.physical && rc.physical->cavity_decay > 0.0 && rc.physical->mech_decay > 0.0) {
        const auto ct = cats::coherence_times(*rc.physical, spec);
        auto finite = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json("unbounded"); };
        j["coherence_times"] = {{"tau_a_s", finite(ct.tau_a)},
                                {"tau_b_s", finite(ct.tau_b)},
                                {"cavity_ratio", ct.cavity_ratio},
                                {"mech_ratio", ct.mech_ratio}};
        text << "tau_a = " << fmt(ct.tau_a) << " s, tau_b = " << fmt(ct.tau_b) << " s\n";
    }

    std::ostringstream csv;
    csv << "ratio,t_scaled,purity\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        for (int k = 0; k < c.purity_samples; ++k) {
            csv << fmt(c.ratios[i]) << ',' << fmt(2.0 * std::numbers::pi * k / (c.purity_samples - 1))
                << ',' << fmt(curves[i][static_cast<std::size_t>(k)]) << '\n';
        }
    }
    OutputSet out;
    out.add("cat_report.json", dump(j));
    out.add("cat_purity.csv", csv.str());
    out.summary = text.str();
    return out;
}

OutputSet run_workflow(Workflow w, const RunConfig& rc, int threads) {
    switch (w) {
        case Workflow::verify_averaging: return verify_averaging(rc);
        case Workflow::dynamics: return run_dynamics(rc);
        case Workflow::steady_sweep: return steady_sweep(rc, threads);
        case Workflow::cat: return run_cat(rc, threads);
    }
    throw InputError("unknown workflow");
}

}  // namespace okerr::app

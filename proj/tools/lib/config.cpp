#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "optokerr/error.hpp"

namespace okerr::app {

const char* to_string(Workflow w) {
    switch (w) {
        case Workflow::verify_averaging: return "verify-averaging";
        case Workflow::dynamics: return "dynamics";
        case Workflow::steady_sweep: return "steady-sweep";
        case Workflow::cat: return "cat";
    }
    return "?";
}

std::optional<Workflow> parse_workflow(const std::string& name) {
    for (Workflow w : {Workflow::verify_averaging, Workflow::dynamics, Workflow::steady_sweep,
                       Workflow::cat}) {
        if (name == to_string(w)) {
            return w;
        }
    }
    return std::nullopt;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw InputError("config: " + path + ": " + what);
}

// Object reader that remembers which keys were consumed so leftovers can be rejected.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            fail(path_, "expected an object");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    std::string at(const std::string& key) const { return path_ + "." + key; }

    const json* get(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::optional<double> number(const std::string& key) {
        const json* v = get(key);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_number()) {
            fail(at(key), "expected a number");
        }
        const double x = v->get<double>();
        if (!std::isfinite(x)) {
            fail(at(key), "must be finite");
        }
        return x;
    }

    std::optional<long long> integer(const std::string& key) {
        const json* v = get(key);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_number_integer()) {
            fail(at(key), "expected an integer");
        }
        return v->get<long long>();
    }

    std::optional<std::string> string(const std::string& key) {
        const json* v = get(key);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_string()) {
            fail(at(key), "expected a string");
        }
        return v->get<std::string>();
    }

    std::optional<std::complex<double>> complex(const std::string& key) {
        const json* v = get(key);
        if (!v) {
            return std::nullopt;
        }
        if (v->is_number()) {
            return std::complex<double>(v->get<double>(), 0.0);
        }
        if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
            fail(at(key), "expected a number or [re, im]");
        }
        return std::complex<double>((*v)[0].get<double>(), (*v)[1].get<double>());
    }

    std::vector<double> numbers(const std::string& key) {
        std::vector<double> out;
        const json* v = get(key);
        if (!v) {
            return out;
        }
        if (!v->is_array()) {
            fail(at(key), "expected an array of numbers");
        }
        for (const auto& x : *v) {
            if (!x.is_number()) {
                fail(at(key), "expected an array of numbers");
            }
            out.push_back(x.get<double>());
        }
        return out;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                fail(at(it.key()), "unknown key");
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

PhysicalParams parse_physical(Section s) {
    PhysicalParams p;
    auto need = [&s](const char* key) {
        auto x = s.number(key);
        if (!x) {
            fail(s.at(key), "missing");
        }
        return *x;
    };
    p.cavity_freq = s.number("cavity_freq").value_or(0.0);
    p.mech_freq = need("mech_freq");
    p.coupling = need("coupling");
    p.cavity_decay = need("cavity_decay");
    p.mech_decay = need("mech_decay");
    p.bath_temp = s.number("bath_temp");
    p.mean_occupation = s.number("mean_occupation");

    const bool direct = s.has("cubic") || s.has("quartic");
    if (const json* raw = s.get("raw_anharmonicity")) {
        if (direct) {
            fail(s.at("raw_anharmonicity"), "give either cubic/quartic or raw_anharmonicity");
        }
        Section r(*raw, s.at("raw_anharmonicity"));
        RawAnharmonicity ra;
        ra.v0 = r.number("v0").value_or(0.0);
        ra.w0 = r.number("w0").value_or(0.0);
        ra.mass = r.number("mass").value_or(0.0);
        r.finish();
        auto [v, w] = convert_raw_anharmonicity(ra, p.mech_freq);
        p.cubic = v;
        p.quartic = w;
    } else {
        p.cubic = need("cubic");
        p.quartic = need("quartic");
    }
    s.finish();
    p.validate();
    return p;
}

DriveInput parse_drive(Section s) {
    DriveInput d;
    d.cavity_amp_hz = s.number("cavity_amp");
    d.cavity_amp_ratio = s.number("cavity_amp_ratio");
    d.mech_amp_hz = s.number("mech_amp");
    d.mech_amp_ratio = s.number("mech_amp_ratio");
    d.cavity_detuning_hz = s.number("cavity_detuning");
    d.cavity_detuning_ratio = s.number("cavity_detuning_ratio");
    d.mech_detuning_hz = s.number("mech_detuning");
    d.mech_detuning_ratio = s.number("mech_detuning_ratio");
    s.finish();
    auto exclusive = [&s](const auto& a, const auto& b, const char* key) {
        if (a && b) {
            fail(s.at(key), "give the absolute value or the ratio, not both");
        }
    };
    exclusive(d.cavity_amp_hz, d.cavity_amp_ratio, "cavity_amp");
    exclusive(d.mech_amp_hz, d.mech_amp_ratio, "mech_amp");
    exclusive(d.cavity_detuning_hz, d.cavity_detuning_ratio, "cavity_detuning");
    exclusive(d.mech_detuning_hz, d.mech_detuning_ratio, "mech_detuning");
    return d;
}

AveragingConfig parse_averaging(Section s) {
    AveragingConfig a;
    if (auto order = s.integer("order")) {
        if (*order != 1 && *order != 2) {
            fail(s.at("order"), "must be 1 or 2");
        }
        a.order = static_cast<int>(*order);
    }
    if (const json* n = s.get("neglect")) {
        if (n->is_string() && (*n == "standard" || *n == "none")) {
            a.standard_filter = *n == "standard";
            a.filter = a.standard_filter ? sym::NeglectFilter::standard() : sym::NeglectFilter::none();
        } else if (n->is_array()) {
            a.filter = sym::NeglectFilter::none();
            for (const auto& item : *n) {
                if (!item.is_string()) {
                    fail(s.at("neglect"), "expected strings such as \"v*w\"");
                }
                a.filter.dropped.push_back(sym::NeglectFilter::parse(item.get<std::string>()));
            }
            std::sort(a.filter.dropped.begin(), a.filter.dropped.end());
            auto standard = sym::NeglectFilter::standard().dropped;
            std::sort(standard.begin(), standard.end());
            a.standard_filter = a.filter.dropped == standard;
        } else {
            fail(s.at("neglect"), "expected \"standard\", \"none\" or a list of products");
        }
    }
    s.finish();
    return a;
}

ModeState parse_mode_state(Section s) {
    ModeState m;
    int given = 0;
    if (auto n = s.integer("fock")) {
        if (*n < 0) {
            fail(s.at("fock"), "must be non-negative");
        }
        m.kind = ModeState::Kind::fock;
        m.n = static_cast<int>(*n);
        ++given;
    }
    if (auto amp = s.complex("coherent")) {
        m.kind = ModeState::Kind::coherent;
        m.amp = *amp;
        ++given;
    }
    if (auto nbar = s.number("thermal")) {
        if (*nbar < 0.0) {
            fail(s.at("thermal"), "must be non-negative");
        }
        m.kind = ModeState::Kind::thermal;
        m.mean_occupation = *nbar;
        ++given;
    }
    s.finish();
    if (given != 1) {
        fail(s.at("*"), "exactly one of fock, coherent, thermal");
    }
    return m;
}

int positive_int(Section& s, const char* key, int fallback, int lo = 1) {
    auto v = s.integer(key);
    if (!v) {
        return fallback;
    }
    if (*v < lo || *v > 1'000'000'000) {
        fail(s.at(key), "must be an integer >= " + std::to_string(lo));
    }
    return static_cast<int>(*v);
}

DynamicsConfig parse_dynamics(Section s) {
    DynamicsConfig d;
    const std::string mode = s.string("mode").value_or("compare");
    if (mode == "compare") {
        d.mode = DynamicsConfig::Mode::compare;
    } else if (mode == "master") {
        d.mode = DynamicsConfig::Mode::master;
        d.cavity = {ModeState::Kind::fock, 0, {}, 0.0};
        d.mech = {ModeState::Kind::fock, 0, {}, 0.0};
        d.samples = 101;
    } else {
        fail(s.at("mode"), "expected \"compare\" or \"master\"");
    }
    if (const json* dims = s.get("dims")) {
        if (!dims->is_array() || dims->size() != 2 || !(*dims)[0].is_number_integer() ||
            !(*dims)[1].is_number_integer()) {
            fail(s.at("dims"), "expected [dim_a, dim_b]");
        }
        d.dim_a = (*dims)[0].get<int>();
        d.dim_b = (*dims)[1].get<int>();
        try {
            fock::FockSpace check(d.dim_a, d.dim_b);
        } catch (const InputError& e) {
            fail(s.at("dims"), e.what());
        }
    }
    if (auto T = s.number("duration")) {
        if (!(*T > 0.0)) {
            fail(s.at("duration"), "must be positive");
        }
        d.duration = *T;
    } else if (d.mode == DynamicsConfig::Mode::master) {
        fail(s.at("duration"), "missing");
    }
    if (auto dt = s.number("dt")) {
        if (!(*dt > 0.0)) {
            fail(s.at("dt"), "must be positive");
        }
        d.dt = dt;
    }
    d.samples = positive_int(s, "samples", d.samples, 2);
    if (const json* init = s.get("initial")) {
        Section i(*init, s.at("initial"));
        if (const json* c = i.get("cavity")) {
            d.cavity = parse_mode_state(Section(*c, i.at("cavity")));
        }
        if (const json* m = i.get("mech")) {
            d.mech = parse_mode_state(Section(*m, i.at("mech")));
        }
        i.finish();
    }
    if (const json* r = s.get("rates")) {
        if (d.mode != DynamicsConfig::Mode::compare) {
            fail(s.at("rates"), "only used in compare mode");
        }
        Section rs(*r, s.at("rates"));
        d.rates.mech_freq = rs.number("mech_freq").value_or(d.rates.mech_freq);
        d.rates.coupling = rs.number("coupling").value_or(d.rates.coupling);
        d.rates.cubic = rs.number("cubic").value_or(d.rates.cubic);
        d.rates.quartic = rs.number("quartic").value_or(d.rates.quartic);
        rs.finish();
        if (!(d.rates.mech_freq > 0.0)) {
            fail(s.at("rates.mech_freq"), "must be positive");
        }
    }
    if (auto m = s.string("method")) {
        if (*m == "rk4") {
            d.method = fock::Integrator::rk4;
        } else if (*m == "adaptive") {
            d.method = fock::Integrator::adaptive;
        } else {
            fail(s.at("method"), "expected \"rk4\" or \"adaptive\"");
        }
    }
    d.abs_tolerance = s.number("abs_tolerance").value_or(d.abs_tolerance);
    d.rel_tolerance = s.number("rel_tolerance").value_or(d.rel_tolerance);
    if (!(d.abs_tolerance > 0.0) || !(d.rel_tolerance > 0.0)) {
        fail(s.at("tolerance"), "tolerances must be positive");
    }
    if (d.mode == DynamicsConfig::Mode::master && d.method == fock::Integrator::rk4 && !d.dt) {
        fail(s.at("dt"), "rk4 needs a step");
    }
    s.finish();
    return d;
}

SweepConfig parse_sweep(Section s) {
    SweepConfig w;
    const std::string var = s.string("variable").value_or("eta");
    if (var == "eta") {
        w.variable = SweepConfig::Variable::eta;
    } else if (var == "delta") {
        w.variable = SweepConfig::Variable::delta;
    } else {
        fail(s.at("variable"), "expected \"eta\" or \"delta\"");
    }
    auto start = s.number("start");
    auto stop = s.number("stop");
    auto points = s.integer("points");
    if (!start || !stop || !points) {
        fail(s.at("grid"), "start, stop and points are required");
    }
    if (*points < 1) {
        fail(s.at("points"), "sweep grid is empty");
    }
    if (*points > 10'000'000) {
        fail(s.at("points"), "too many points");
    }
    if (*points > 1 && !(*stop > *start)) {
        fail(s.at("stop"), "must exceed start");
    }
    w.start = *start;
    w.stop = *stop;
    w.points = static_cast<int>(*points);
    if (const json* dirs = s.get("directions")) {
        if (!dirs->is_array() || dirs->empty()) {
            fail(s.at("directions"), "expected a non-empty list of \"up\"/\"down\"");
        }
        w.directions.clear();
        for (const auto& d : *dirs) {
            if (d == "up") {
                w.directions.push_back(steady::Direction::up);
            } else if (d == "down") {
                w.directions.push_back(steady::Direction::down);
            } else {
                fail(s.at("directions"), "expected \"up\" or \"down\"");
            }
        }
    }
    w.cross_kerr = s.numbers("cross_kerr");
    w.cross_kerr_unit = s.number("cross_kerr_unit");
    if (w.cross_kerr_unit && *w.cross_kerr_unit == 0.0) {
        fail(s.at("cross_kerr_unit"), "must be nonzero");
    }
    if (const json* c = s.get("cavity")) {
        if (c->is_number()) {
            w.cavity = SweepConfig::Cavity::pinned;
            w.pinned_occupation = c->get<double>();
            if (!(w.pinned_occupation >= 0.0)) {
                fail(s.at("cavity"), "pinned occupation must be non-negative");
            }
        } else if (*c == "coupled") {
            w.cavity = SweepConfig::Cavity::coupled;
        } else if (*c == "solve") {
            w.cavity = SweepConfig::Cavity::solve;
        } else {
            fail(s.at("cavity"), "expected an occupation, \"solve\" or \"coupled\"");
        }
    }
    s.finish();
    return w;
}

CatConfig parse_cat(Section s) {
    CatConfig c;
    c.alpha = s.complex("alpha").value_or(c.alpha);
    c.beta = s.complex("beta").value_or(c.beta);
    if (auto dim = s.integer("dim")) {
        if (*dim < 2 || *dim > 4096) {
            fail(s.at("dim"), "must be in [2, 4096]");
        }
        c.dim = static_cast<int>(*dim);
    }
    if (s.has("ratios")) {
        c.ratios = s.numbers("ratios");
        if (c.ratios.empty()) {
            fail(s.at("ratios"), "must not be empty");
        }
    }
    c.mech_ratio = s.number("mech_ratio");
    if (auto conv = s.string("convention")) {
        if (*conv == "beta_sq") {
            c.convention = cats::OverlapConvention::beta_sq;
        } else if (*conv == "alpha_sq") {
            c.convention = cats::OverlapConvention::alpha_sq;
        } else {
            fail(s.at("convention"), "expected \"beta_sq\" or \"alpha_sq\"");
        }
    }
    c.purity_samples = positive_int(s, "purity_samples", c.purity_samples, 2);
    s.finish();
    return c;
}

}  // namespace

DriveParams DriveInput::resolve(const PhysicalParams& p) const {
    DriveParams d;
    const double kappa = to_angular(p.cavity_decay);
    const double gamma = to_angular(p.mech_decay);
    const double Omega = to_angular(p.mech_freq);
    d.cavity_amp = cavity_amp_ratio ? *cavity_amp_ratio * kappa : to_angular(cavity_amp_hz.value_or(0.0));
    d.mech_amp = mech_amp_ratio ? *mech_amp_ratio * gamma : to_angular(mech_amp_hz.value_or(0.0));
    d.cavity_detuning = cavity_detuning_ratio ? *cavity_detuning_ratio * Omega
                                              : to_angular(cavity_detuning_hz.value_or(0.0));
    d.mech_detuning = mech_detuning_ratio ? *mech_detuning_ratio * Omega
                                          : to_angular(mech_detuning_hz.value_or(0.0));
    d.validate();
    return d;
}

RunConfig parse_config(const json& doc) {
    RunConfig rc;
    rc.document = doc;
    Section top(doc, "$");
    if (auto w = top.string("workflow")) {
        rc.workflow = parse_workflow(*w);
        if (!rc.workflow) {
            fail(top.at("workflow"), "unknown workflow \"" + *w + "\"");
        }
    }
    if (const json* p = top.get("physical")) {
        rc.physical = parse_physical(Section(*p, top.at("physical")));
    }
    if (const json* d = top.get("drive")) {
        rc.drive = parse_drive(Section(*d, top.at("drive")));
    }
    if (auto t = top.number("averaging_threshold")) {
        if (!(*t > 0.0)) {
            fail(top.at("averaging_threshold"), "must be positive");
        }
        rc.averaging_threshold = *t;
    }
    if (auto seed = top.integer("seed")) {
        if (*seed < 0) {
            fail(top.at("seed"), "must be non-negative");
        }
        rc.seed = static_cast<std::uint64_t>(*seed);
    }
    if (const json* a = top.get("averaging")) {
        rc.averaging = parse_averaging(Section(*a, top.at("averaging")));
    }
    if (const json* d = top.get("dynamics")) {
        rc.dynamics = parse_dynamics(Section(*d, top.at("dynamics")));
    }
    if (const json* s = top.get("sweep")) {
        rc.sweep = parse_sweep(Section(*s, top.at("sweep")));
    }
    if (const json* c = top.get("cat")) {
        rc.cat = parse_cat(Section(*c, top.at("cat")));
    }
    top.finish();
    if (rc.physical) {
        rc.drive.resolve(*rc.physical);  // rejects negative amplitudes early
    }
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("config: cannot open " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    return parse_config(doc);
}

std::string canonical_text(const json& doc) { return doc.dump(); }

}  // namespace okerr::app

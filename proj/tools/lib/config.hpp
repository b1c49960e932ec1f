#ifndef OPTOKERR_APP_CONFIG_HPP
#define OPTOKERR_APP_CONFIG_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "optokerr/cats.hpp"
#include "optokerr/fock.hpp"
#include "optokerr/params.hpp"
#include "optokerr/steady.hpp"
#include "optokerr/symalg.hpp"

namespace okerr::app {

using json = nlohmann::json;

enum class Workflow { verify_averaging, dynamics, steady_sweep, cat };

const char* to_string(Workflow w);
std::optional<Workflow> parse_workflow(const std::string& name);

// Drive block before the rates are known: each amplitude either absolute (Hz) or a ratio.
struct DriveInput {
    std::optional<double> cavity_amp_hz, cavity_amp_ratio;   // epsilon, epsilon / kappa
    std::optional<double> mech_amp_hz, mech_amp_ratio;       // eta, eta / gamma
    std::optional<double> cavity_detuning_hz, cavity_detuning_ratio;  // Delta, Delta / Omega
    std::optional<double> mech_detuning_hz, mech_detuning_ratio;      // delta, delta / Omega

    /// Angular drive parameters for the given laboratory inputs.
    DriveParams resolve(const PhysicalParams& p) const;
};

struct AveragingConfig {
    int order = 2;
    sym::NeglectFilter filter = sym::NeglectFilter::standard();
    bool standard_filter = true;
};

/// One mode of an initial state.
struct ModeState {
    enum class Kind { fock, coherent, thermal } kind = Kind::fock;
    int n = 0;
    std::complex<double> amp;
    double mean_occupation = 0.0;
};

struct DynamicsConfig {
    enum class Mode { compare, master } mode = Mode::compare;
    int dim_a = 6;
    int dim_b = 16;
    double duration = 200.0;
    std::optional<double> dt;
    int samples = 11;
    ModeState cavity{ModeState::Kind::fock, 1, {}, 0.0};
    ModeState mech{ModeState::Kind::coherent, 0, {1.0, 0.0}, 0.0};
    // compare mode: dimensionless angular rates
    CouplingRates rates{1.0, 0.02, 0.02, 0.01};
    // master mode
    fock::Integrator method = fock::Integrator::adaptive;
    double abs_tolerance = 1e-10;
    double rel_tolerance = 1e-8;
};

struct SweepConfig {
    enum class Variable { eta, delta } variable = Variable::eta;
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
    std::vector<steady::Direction> directions{steady::Direction::up, steady::Direction::down};
    std::vector<double> cross_kerr;          // normalized values; empty = derived value only
    std::optional<double> cross_kerr_unit;   // Hz
    enum class Cavity { coupled, pinned, solve } cavity = Cavity::coupled;
    double pinned_occupation = 0.0;
};

struct CatConfig {
    std::complex<double> alpha{std::sqrt(2.0), 0.0};
    std::complex<double> beta{std::sqrt(2.0), 0.0};
    std::optional<int> dim;
    std::vector<double> ratios{1.0, 0.5, 0.25};
    std::optional<double> mech_ratio;
    cats::OverlapConvention convention = cats::OverlapConvention::beta_sq;
    int purity_samples = 101;
};

struct RunConfig {
    std::optional<Workflow> workflow;
    std::optional<PhysicalParams> physical;
    DriveInput drive;
    double averaging_threshold = default_averaging_threshold;
    std::uint64_t seed = 0;
    AveragingConfig averaging;
    std::optional<DynamicsConfig> dynamics;
    std::optional<SweepConfig> sweep;
    std::optional<CatConfig> cat;

    json document;  // as parsed, used for hashing
};

/// Parses and validates a config document. Throws InputError with a key path on any problem.
RunConfig parse_config(const json& doc);
RunConfig load_config(const std::string& path);

/// Sorted-key compact dump of the document.
std::string canonical_text(const json& doc);

}  // namespace okerr::app

#endif

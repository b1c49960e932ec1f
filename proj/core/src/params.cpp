#include "optokerr/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "optokerr/error.hpp"

namespace okerr {

void PhysicalParams::validate() const {
    if (!(mech_freq > 0.0)) {
        throw InputError("mechanical frequency must be positive");
    }
    if (cavity_decay < 0.0 || mech_decay < 0.0) {
        throw InputError("decay rates must be non-negative");
    }
    if (bath_temp.has_value() == mean_occupation.has_value()) {
        throw InputError("exactly one of bath temperature and mean occupation must be given");
    }
    if (bath_temp && *bath_temp < 0.0) {
        throw InputError("bath temperature must be non-negative");
    }
    if (mean_occupation && *mean_occupation < 0.0) {
        throw InputError("mean occupation must be non-negative");
    }
}

bool PhysicalParams::valid_averaging(double threshold) const {
    const double largest = std::max({std::abs(coupling), std::abs(cubic), std::abs(quartic)});
    return largest / mech_freq < threshold;
}

void DriveParams::validate() const {
    if (cavity_amp < 0.0 || mech_amp < 0.0) {
        throw InputError("drive amplitudes must be non-negative");
    }
}

CouplingRates angular_couplings(const PhysicalParams& p) {
    return {to_angular(p.mech_freq), to_angular(p.coupling), to_angular(p.cubic),
            to_angular(p.quartic)};
}

EffectiveParams EffectiveParams::with_cavity_detuning(double detuning) const {
    EffectiveParams out = *this;
    out.omega_c_tilde = detuning + cavity_shift;
    return out;
}

EffectiveParams EffectiveParams::with_mech_detuning(double detuning) const {
    EffectiveParams out = *this;
    out.Omega_tilde = detuning + mech_shift;
    return out;
}

double thermal_occupation(double mech_freq_hz, double temp_k) {
    if (!(mech_freq_hz > 0.0)) {
        throw InputError("thermal_occupation: frequency must be positive");
    }
    if (temp_k < 0.0) {
        throw InputError("thermal_occupation: temperature must be non-negative");
    }
    if (temp_k == 0.0) {
        return 0.0;
    }
    const double x = hbar * to_angular(mech_freq_hz) / (k_boltzmann * temp_k);
    return 1.0 / std::expm1(x);
}

double resolve_mean_occupation(const PhysicalParams& p) {
    if (p.mean_occupation) {
        return *p.mean_occupation;
    }
    if (p.bath_temp) {
        return thermal_occupation(p.mech_freq, *p.bath_temp);
    }
    throw InputError("neither bath temperature nor mean occupation given");
}

EffectiveParams derive_effective(const CouplingRates& c, double cavity_detuning,
                                 double mech_detuning, double mean_occupation) {
    if (c.mech_freq == 0.0) {
        throw InputError("derive_effective: mechanical frequency is zero");
    }
    const double Omega = c.mech_freq;
    const double g = c.coupling;
    const double v = c.cubic;
    const double w = c.quartic;

    EffectiveParams e;
    e.cavity_shift = g * v / Omega;
    e.mech_shift = -5.0 * v * v / (6.0 * Omega) + w;
    e.omega_c_tilde = cavity_detuning + e.cavity_shift;
    e.Omega_tilde = mech_detuning + e.mech_shift;
    e.chi_a = g * g / Omega;
    e.chi_b = 5.0 * v * v / (6.0 * Omega) - w;
    e.chi_ab = 2.0 * g * v / Omega;
    e.mean_occupation = mean_occupation;
    const double largest = std::max({std::abs(g), std::abs(v), std::abs(w)});
    e.valid_averaging = largest / std::abs(Omega) < default_averaging_threshold;
    return e;
}

EffectiveParams derive_effective(const PhysicalParams& p, const DriveParams& d) {
    p.validate();
    d.validate();
    EffectiveParams e = derive_effective(angular_couplings(p), d.cavity_detuning,
                                         d.mech_detuning, resolve_mean_occupation(p));
    e.valid_averaging = p.valid_averaging();
    return e;
}

std::pair<double, double> convert_raw_anharmonicity(const RawAnharmonicity& r,
                                                    double mech_freq_hz) {
    if (!(r.mass > 0.0)) {
        throw InputError("convert_raw_anharmonicity: mass must be positive");
    }
    if (!(mech_freq_hz > 0.0)) {
        throw InputError("convert_raw_anharmonicity: frequency must be positive");
    }
    const double x_zpf = std::sqrt(hbar / (2.0 * r.mass * to_angular(mech_freq_hz)));
    const double v = r.v0 * x_zpf * x_zpf * x_zpf / hbar;
    const double w = r.w0 * x_zpf * x_zpf * x_zpf * x_zpf / hbar;
    return {to_ordinary(v), to_ordinary(w)};
}

}  // namespace okerr

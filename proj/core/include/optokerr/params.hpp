#ifndef OPTOKERR_PARAMS_HPP
#define OPTOKERR_PARAMS_HPP

#include <numbers>
#include <optional>
#include <utility>

namespace okerr {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_boltzmann = 1.380649e-23;    // J / K

/// Default bound on max(|g|, |v|, |w|) / Omega for the averaged model to be trusted.
inline constexpr double default_averaging_threshold = 0.1;

inline constexpr double to_angular(double hz) { return two_pi * hz; }
inline constexpr double to_ordinary(double rad_per_s) { return rad_per_s / two_pi; }

/*
 * Laboratory-frame inputs. Every frequency here is an ordinary frequency in Hz
 * (the "X/2pi" numbers quoted for real devices). Exactly one of bath_temp and
 * mean_occupation must be set.
 */
struct PhysicalParams {
    double cavity_freq = 0.0;
    double mech_freq = 0.0;
    double coupling = 0.0;       // g
    double cubic = 0.0;          // v
    double quartic = 0.0;        // w
    double cavity_decay = 0.0;   // kappa
    double mech_decay = 0.0;     // gamma
    std::optional<double> bath_temp;        // kelvin
    std::optional<double> mean_occupation;  // Nbar

    /// Throws InputError on a violated invariant.
    void validate() const;

    bool valid_averaging(double threshold = default_averaging_threshold) const;
};

/// Potential coefficients in SI units: v0 in J/m^3, w0 in J/m^4, mass in kg.
struct RawAnharmonicity {
    double v0 = 0.0;
    double w0 = 0.0;
    double mass = 0.0;
};

/// Drive amplitudes and detunings, all angular rates (rad/s).
struct DriveParams {
    double cavity_amp = 0.0;       // epsilon
    double mech_amp = 0.0;         // eta
    double cavity_detuning = 0.0;  // Delta = omega_c - omega_d
    double mech_detuning = 0.0;    // delta = Omega - Omega_d

    void validate() const;
};

/// Angular-unit view of the couplings entering the interaction Hamiltonian.
struct CouplingRates {
    double mech_freq = 0.0;  // Omega
    double coupling = 0.0;   // g
    double cubic = 0.0;      // v
    double quartic = 0.0;    // w
};

CouplingRates angular_couplings(const PhysicalParams& p);

/// Rotating-frame parameters of the averaged Hamiltonian, in rad/s.
struct EffectiveParams {
    double omega_c_tilde = 0.0;  // Delta + g v / Omega
    double Omega_tilde = 0.0;    // delta - 5 v^2 / (6 Omega) + w
    double chi_a = 0.0;          // g^2 / Omega
    double chi_b = 0.0;          // 5 v^2 / (6 Omega) - w
    double chi_ab = 0.0;         // 2 g v / Omega
    double mean_occupation = 0.0;

    // Detuning-independent parts of omega_c_tilde and Omega_tilde.
    double cavity_shift = 0.0;
    double mech_shift = 0.0;

    bool valid_averaging = true;

    EffectiveParams with_cavity_detuning(double detuning) const;
    EffectiveParams with_mech_detuning(double detuning) const;
};

double thermal_occupation(double mech_freq_hz, double temp_k);

/// Nbar as supplied, or computed from the bath temperature.
double resolve_mean_occupation(const PhysicalParams& p);

EffectiveParams derive_effective(const PhysicalParams& p, const DriveParams& d);

/// Same formulas for callers that already work in angular (or dimensionless) units.
EffectiveParams derive_effective(const CouplingRates& c, double cavity_detuning,
                                 double mech_detuning, double mean_occupation = 0.0);

/*
 * Zero-point scaling of the potential coefficients:
 *   v = v0 x_zpf^3 / hbar,  w = w0 x_zpf^4 / hbar,  x_zpf = sqrt(hbar / (2 m Omega)),
 * with Omega angular. Returned as ordinary frequencies (Hz) to match PhysicalParams.
 */
std::pair<double, double> convert_raw_anharmonicity(const RawAnharmonicity& r,
                                                    double mech_freq_hz);

}  // namespace okerr

#endif

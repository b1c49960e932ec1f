#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "optokerr/error.hpp"
#include "optokerr/params.hpp"

using namespace okerr;

namespace {

PhysicalParams lab() {
    PhysicalParams p;
    p.mech_freq = 36.2e6;
    p.coupling = 0.83;
    p.cubic = 1.0;
    p.quartic = 0.05;
    p.cavity_decay = 242e3;
    p.mech_decay = 228.0;
    p.mean_occupation = 7.6;
    return p;
}

bool same_bits(double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; }

}  // namespace

TEST(DeriveEffective, CrossKerrForLabParameters) {
    const EffectiveParams ep = derive_effective(lab(), {});
    EXPECT_NEAR(to_ordinary(ep.chi_ab), 4.59e-8, 0.005e-8);
}

TEST(DeriveEffective, SelfKerrMatchesHandArithmetic) {
    // 0.83^2 / 36.2e6 Hz, evaluated at 40 digits
    const EffectiveParams ep = derive_effective(lab(), {});
    EXPECT_NEAR(to_ordinary(ep.chi_a), 1.9030386740331491713e-8, 1e-20);
    EXPECT_NEAR(to_ordinary(ep.chi_ab), 4.5856353591160220994e-8, 1e-20);
}

TEST(DeriveEffective, NoCubicTermLeavesOnlyQuartic) {
    PhysicalParams p = lab();
    p.cubic = 0.0;
    DriveParams d;
    d.cavity_detuning = 123.0;
    d.mech_detuning = -7.0;
    const EffectiveParams ep = derive_effective(p, d);
    EXPECT_EQ(ep.chi_ab, 0.0);
    EXPECT_DOUBLE_EQ(ep.chi_b, -to_angular(p.quartic));
    EXPECT_EQ(ep.omega_c_tilde, 123.0);
    EXPECT_DOUBLE_EQ(ep.Omega_tilde, -7.0 + to_angular(p.quartic));
}

TEST(DeriveEffective, DefiningFormulas) {
    const CouplingRates c{3.0, 0.2, -0.1, 0.05};
    const EffectiveParams ep = derive_effective(c, 0.4, -0.3);
    EXPECT_DOUBLE_EQ(ep.omega_c_tilde, 0.4 + 0.2 * -0.1 / 3.0);
    EXPECT_DOUBLE_EQ(ep.Omega_tilde, -0.3 - 5.0 * 0.01 / 18.0 + 0.05);
    EXPECT_DOUBLE_EQ(ep.chi_a, 0.04 / 3.0);
    EXPECT_DOUBLE_EQ(ep.chi_b, 5.0 * 0.01 / 18.0 - 0.05);
    EXPECT_DOUBLE_EQ(ep.chi_ab, 2.0 * 0.2 * -0.1 / 3.0);
}

TEST(DeriveEffective, DetuningRebuildKeepsShifts) {
    const EffectiveParams ep = derive_effective(CouplingRates{2.0, 0.1, 0.3, 0.02}, 1.0, 2.0);
    const EffectiveParams moved = ep.with_mech_detuning(5.0).with_cavity_detuning(-1.0);
    EXPECT_DOUBLE_EQ(moved.Omega_tilde, ep.Omega_tilde + 3.0);
    EXPECT_DOUBLE_EQ(moved.omega_c_tilde, ep.omega_c_tilde - 2.0);
    EXPECT_EQ(moved.chi_b, ep.chi_b);
}

TEST(DeriveEffective, Errors) {
    EXPECT_THROW(derive_effective(CouplingRates{0.0, 1.0, 1.0, 1.0}, 0.0, 0.0), InputError);
    PhysicalParams p = lab();
    p.bath_temp = 0.01;  // both given
    EXPECT_THROW(derive_effective(p, {}), InputError);
    p = lab();
    p.mean_occupation.reset();  // neither
    EXPECT_THROW(derive_effective(p, {}), InputError);
    p = lab();
    p.mech_freq = 0.0;
    EXPECT_THROW(derive_effective(p, {}), InputError);
    p = lab();
    p.mech_decay = -1.0;
    EXPECT_THROW(derive_effective(p, {}), InputError);
    DriveParams d;
    d.mech_amp = -1.0;
    EXPECT_THROW(derive_effective(lab(), d), InputError);
}

TEST(DeriveEffective, PerturbativeFlag) {
    PhysicalParams p = lab();
    EXPECT_TRUE(p.valid_averaging());
    p.coupling = 0.2 * p.mech_freq;
    EXPECT_FALSE(p.valid_averaging());
    EXPECT_TRUE(p.valid_averaging(0.3));
    EXPECT_FALSE(derive_effective(p, {}).valid_averaging);
}

TEST(ThermalOccupation, LabValue) {
    EXPECT_NEAR(thermal_occupation(36.2e6, 0.014), 7.6, 0.1);
    // Bose function at 40 digits
    EXPECT_NEAR(thermal_occupation(36.2e6, 0.014), 7.5686995648108956857, 1e-12);
}

TEST(ThermalOccupation, HigherTemperatureOracle) {
    EXPECT_NEAR(thermal_occupation(36.2e6, 0.028), 15.62189226504969833, 1e-11);
}

TEST(ThermalOccupation, ZeroTemperature) { EXPECT_EQ(thermal_occupation(36.2e6, 0.0), 0.0); }

TEST(ThermalOccupation, Errors) {
    EXPECT_THROW(thermal_occupation(0.0, 0.01), InputError);
    EXPECT_THROW(thermal_occupation(1e6, -0.01), InputError);
}

TEST(ThermalOccupation, ResolveUsesTemperature) {
    PhysicalParams p = lab();
    p.mean_occupation.reset();
    p.bath_temp = 0.028;
    EXPECT_DOUBLE_EQ(resolve_mean_occupation(p), thermal_occupation(36.2e6, 0.028));
    EXPECT_DOUBLE_EQ(derive_effective(p, {}).mean_occupation, thermal_occupation(36.2e6, 0.028));
}

TEST(ConvertRaw, ZeroAnharmonicity) {
    const auto [v, w] = convert_raw_anharmonicity({0.0, 0.0, 1e-15}, 36.2e6);
    EXPECT_EQ(v, 0.0);
    EXPECT_EQ(w, 0.0);
}

TEST(ConvertRaw, MassScaling) {
    const auto [v1, w1] = convert_raw_anharmonicity({2.5e3, 4e12, 1e-15}, 36.2e6);
    const auto [v2, w2] = convert_raw_anharmonicity({2.5e3, 4e12, 2e-15}, 36.2e6);
    EXPECT_NEAR(v2 / v1, std::pow(2.0, -1.5), 1e-14);
    EXPECT_NEAR(w2 / w1, 0.25, 1e-14);
}

TEST(ConvertRaw, ArbitraryPrecisionOracle) {
    // x_zpf = sqrt(hbar / (2 m Omega)), v = v0 x^3 / hbar / 2pi, w = w0 x^4 / hbar / 2pi at 40 digits
    const auto [v, w] = convert_raw_anharmonicity({2.5e3, 4e12, 1e-15}, 36.2e6);
    EXPECT_NEAR(v, 1.3317434482880969192e-5, 1e-5 * 1e-12);
    EXPECT_NEAR(w, 3.2442881082172066665e-10, 3.2e-10 * 1e-12);
}

TEST(ConvertRaw, Errors) {
    EXPECT_THROW(convert_raw_anharmonicity({1.0, 1.0, 0.0}, 1e6), InputError);
    EXPECT_THROW(convert_raw_anharmonicity({1.0, 1.0, 1.0}, 0.0), InputError);
}

// ---- properties ----

class ParamsProperty : public ::testing::Test {
protected:
    std::mt19937_64 rng{7};
    double draw(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    PhysicalParams random_params() {
        PhysicalParams p;
        p.mech_freq = draw(1e5, 1e8);
        p.coupling = draw(-10.0, 10.0);
        p.cubic = draw(-10.0, 10.0);
        p.quartic = draw(-1.0, 1.0);
        p.cavity_decay = draw(0.0, 1e6);
        p.mech_decay = draw(0.0, 1e3);
        p.mean_occupation = draw(0.0, 20.0);
        return p;
    }
};

TEST_F(ParamsProperty, DerivationIsBitReproducible) {
    for (int i = 0; i < 200; ++i) {
        const PhysicalParams p = random_params();
        const DriveParams d{draw(0, 1e3), draw(0, 1e3), draw(-1e4, 1e4), draw(-1e4, 1e4)};
        const EffectiveParams x = derive_effective(p, d), y = derive_effective(p, d);
        EXPECT_TRUE(same_bits(x.omega_c_tilde, y.omega_c_tilde));
        EXPECT_TRUE(same_bits(x.Omega_tilde, y.Omega_tilde));
        EXPECT_TRUE(same_bits(x.chi_a, y.chi_a));
        EXPECT_TRUE(same_bits(x.chi_b, y.chi_b));
        EXPECT_TRUE(same_bits(x.chi_ab, y.chi_ab));
    }
}

TEST_F(ParamsProperty, CubicSignLaw) {
    for (int i = 0; i < 200; ++i) {
        PhysicalParams p = random_params();
        const EffectiveParams x = derive_effective(p, {});
        p.cubic = -p.cubic;
        const EffectiveParams y = derive_effective(p, {});
        EXPECT_EQ(y.chi_ab, -x.chi_ab);
        EXPECT_EQ(y.omega_c_tilde, -x.omega_c_tilde);  // zero cavity detuning: only the g v shift
        EXPECT_EQ(y.chi_b, x.chi_b);
        EXPECT_EQ(y.chi_a, x.chi_a);
    }
}

TEST_F(ParamsProperty, UnitsAreHomogeneous) {
    for (int i = 0; i < 200; ++i) {
        const PhysicalParams p = random_params();
        const EffectiveParams angular = derive_effective(p, {});
        const EffectiveParams ordinary =
            derive_effective(CouplingRates{p.mech_freq, p.coupling, p.cubic, p.quartic}, 0.0, 0.0);
        EXPECT_NEAR(to_ordinary(angular.chi_a), ordinary.chi_a, 1e-13 * std::abs(ordinary.chi_a) + 1e-300);
        EXPECT_NEAR(to_ordinary(angular.chi_b), ordinary.chi_b, 1e-13 * std::abs(ordinary.chi_b) + 1e-300);
        EXPECT_NEAR(to_ordinary(angular.chi_ab), ordinary.chi_ab, 1e-13 * std::abs(ordinary.chi_ab) + 1e-300);
    }
}

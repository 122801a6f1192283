// Dressed response factors and susceptibility ratios.
//
// Limit identities used as oracles:
//   chi1/chi10 == Gamma01/P01 whenever G12 = 0 (exact cancellation),
//   chi4/chi30 == Gamma03/P03 when both strong fields are off,
//   chi4nl -> 1 at all-resonant, fields-off, v = 0 (normalization).
// Raman saturation at line center (G23- = 0, all resonant, v = 0):
//   chi1 = Gamma01 Gamma02 / (Gamma01 Gamma02 + |G12|^2).

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dfwm/response.hpp"
#include "dfwm/scheme.hpp"

using namespace dfwm;

namespace {

FieldSet zero_detuned_fields(const SchemeConfig& s) {
    FieldSet f = detail::base_fields(s);
    f.e2.detuning_mhz = 0.0;
    f.e3p.detuning_mhz = 0.0;
    f.e3m.detuning_mhz = 0.0;
    return f;
}

struct RandomDraw {
    SchemeConfig scheme;
    FieldSet fields;
    double omega1;
    double v;
};

RandomDraw random_draw(std::mt19937& rng) {
    std::uniform_real_distribution<double> width(0.5, 60.0);
    std::uniform_real_distribution<double> lambda(300.0, 1200.0);
    std::uniform_real_distribution<double> det(-5e4, 5e4);
    std::uniform_real_distribution<double> rabi(0.0, 2e4);
    std::uniform_real_distribution<double> vel(-3e3, 3e3);
    std::uniform_real_distribution<double> speed(200.0, 900.0);
    const double g1 = width(rng), g2 = width(rng), g3 = width(rng);
    RandomDraw d{make_scheme({lambda(rng), lambda(rng), lambda(rng), lambda(rng)},
                             {g1 / 2, (g1 + g2) / 2, (g2 + g3) / 2, g3 / 2}, speed(rng)),
                 {}, det(rng), vel(rng)};
    d.fields = detail::base_fields(d.scheme);
    d.fields.e2.detuning_mhz = det(rng);
    d.fields.e3p.detuning_mhz = det(rng);
    d.fields.e3m.detuning_mhz = det(rng);
    d.fields.e2.rabi_mhz = rabi(rng);
    d.fields.e3m.rabi_mhz = rabi(rng);
    d.fields.e3p.rabi_mhz = rabi(rng) / 100.0;
    return d;
}

}  // namespace

TEST_CASE("p_factors rejects non-positive half-widths") {
    SchemeConfig s = sodium_preset();
    const FieldSet f = zero_detuned_fields(s);
    s.gamma02_mhz = 0.0;  // bypass make_scheme validation deliberately
    CHECK_THROWS_AS(p_factors(s, f, 0.0, 0.0), config_error);
}

TEST_CASE("P01 at rest and on resonance is purely real") {
    const SchemeConfig s = sodium_preset();
    const FieldSet f = zero_detuned_fields(s);
    const PFactors p = p_factors(s, f, 0.0, 0.0);
    CHECK(p.p01 == cplx(20.69, 0.0));
    const PFactors p2 = p_factors(s, f, 100.0, 0.0);
    CHECK(p2.p01 == cplx(20.69, 100.0));
}

TEST_CASE("P01 Doppler shift: 100 m/s at 661 nm is 151.29 MHz") {
    const SchemeConfig s = sodium_preset();
    const FieldSet f = zero_detuned_fields(s);
    const PFactors p = p_factors(s, f, 0.0, 100.0);
    const double shift = 100.0 / 661.0 * 1.0e3;  // hand arithmetic: 151.2859 MHz
    CHECK(p.p01.real() == Catch::Approx(20.69).epsilon(1e-14));
    CHECK(p.p01.imag() == Catch::Approx(-shift).epsilon(1e-12));
    CHECK(shift == Catch::Approx(151.2859).margin(1e-4));
}

TEST_CASE("P factor real parts equal the half-widths; P02~ assembles exactly") {
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        const RandomDraw d = random_draw(rng);
        const PFactors p = p_factors(d.scheme, d.fields, d.omega1, d.v);
        CHECK(p.p01.real() == d.scheme.gamma01_mhz());
        CHECK(p.p01m.real() == d.scheme.gamma01_mhz());
        CHECK(p.p02.real() == d.scheme.gamma02_mhz);
        CHECK(p.p02m.real() == d.scheme.gamma02_mhz);
        CHECK(p.p03.real() == d.scheme.gamma03_mhz());
        CHECK(p.p03m.real() == d.scheme.gamma03_mhz());
        const double g12sq = d.fields.e2.rabi_mhz * d.fields.e2.rabi_mhz;
        const double g23msq = d.fields.e3m.rabi_mhz * d.fields.e3m.rabi_mhz;
        const cplx assembled = p.p02 + g12sq / p.p01 + g23msq / p.p03m;
        CHECK(p.p02tilde == assembled);
    }
}

TEST_CASE("combined detunings and wave numbers") {
    const SchemeConfig s = sodium_preset();
    const FieldSet f = fig1b_fields(s);
    const double omega1 = 1.0e5;
    const PFactors p = p_factors(s, f, omega1, 0.0);
    CHECK(p.omega4_mhz == Catch::Approx(omega1 - 92.3e3 - 7.3e3).epsilon(1e-14));
    CHECK(p.omega4m_mhz == Catch::Approx(omega1 - 92.3e3 + 73.2e3).epsilon(1e-14));
    CHECK(p.omega1m_mhz == Catch::Approx(p.omega4_mhz - 73.2e3 + 92.3e3).epsilon(1e-14));
    // Doppler rates: P03- moves with kS- = k1 - k2 - k3-, P01- with k4 + k3- + k2
    const double v = 250.0;
    const PFactors pv = p_factors(s, f, omega1, v);
    const double ksm = (1.0 / 661.0 - 1.0 / 746.0 - 1.0 / 514.0) * 1e3 * v;
    CHECK(pv.p03m.imag() - p.p03m.imag() == Catch::Approx(-ksm).epsilon(1e-9));
    const double k1m = (s.inv_generated_nm() + 1.0 / 514.0 + 1.0 / 746.0) * 1e3 * v;
    CHECK(pv.p01m.imag() - p.p01m.imag() == Catch::Approx(-k1m).epsilon(1e-9));
    const double k2m = (s.inv_generated_nm() + 1.0 / 514.0) * 1e3 * v;
    CHECK(pv.p02m.imag() - p.p02m.imag() == Catch::Approx(-k2m).epsilon(1e-9));
}

TEST_CASE("chi1 reduces to a bare Lorentzian at fields off and on resonance") {
    const SchemeConfig s = sodium_preset();
    const FieldSet f = zero_detuned_fields(s);
    const cplx r = chi1_ratio(p_factors(s, f, 0.0, 0.0), f);
    CHECK(r.real() == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(r.imag() == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("chi1 cancellation identity at G12 = 0 (1000 random draws)") {
    std::mt19937 rng(1234);
    for (int i = 0; i < 1000; ++i) {
        RandomDraw d = random_draw(rng);
        d.fields.e2.rabi_mhz = 0.0;
        const PFactors p = p_factors(d.scheme, d.fields, d.omega1, d.v);
        const cplx full = chi1_ratio(p, d.fields);
        const cplx bare = d.scheme.gamma01_mhz() / p.p01;
        CHECK(std::abs(full - bare) <= 1e-12 * std::abs(bare));
    }
}

TEST_CASE("chi1 Raman saturation value at line center") {
    // G12 = 74.2 MHz, G23- = 0, Omega1 = Omega2 = 0, v = 0, Gamma02 = 2.38:
    // chi1 = Gamma01 Gamma02 / (Gamma01 Gamma02 + |G12|^2) ~ 0.00887
    const SchemeConfig s = sodium_preset();
    FieldSet f = zero_detuned_fields(s);
    f.e2.rabi_mhz = 74.2;
    const cplx r = chi1_ratio(p_factors(s, f, 0.0, 0.0), f);
    const double expected = (20.69 * 2.38) / (20.69 * 2.38 + 74.2 * 74.2);
    CHECK(r.real() == Catch::Approx(expected).epsilon(1e-12));
    CHECK(expected == Catch::Approx(0.00887).margin(2e-5));
    CHECK(r.imag() == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("chi4 reduces to Gamma03/P03 at all-weak fields (1000 random draws)") {
    std::mt19937 rng(4321);
    for (int i = 0; i < 1000; ++i) {
        RandomDraw d = random_draw(rng);
        d.fields.e2.rabi_mhz = 0.0;
        d.fields.e3m.rabi_mhz = 0.0;
        const PFactors p = p_factors(d.scheme, d.fields, d.omega1, d.v);
        const cplx full = chi4_ratio(p, d.fields);
        const cplx bare = d.scheme.gamma03_mhz() / p.p03;
        CHECK(std::abs(full - bare) <= 1e-12 * std::abs(bare));
    }
}

TEST_CASE("chi4 single-Lorentzian value at Omega4 = 50 MHz") {
    const SchemeConfig s = sodium_preset();
    const FieldSet f = zero_detuned_fields(s);
    const cplx r = chi4_ratio(p_factors(s, f, 50.0, 0.0), f);  // Omega4 = Omega1 here
    const cplx expected = 15.92 / cplx(15.92, 50.0);
    CHECK(std::abs(r - expected) <= 1e-14);
}

TEST_CASE("chi4nl is normalized and decays monotonically in the far wing") {
    const SchemeConfig s = sodium_preset();
    const FieldSet f = zero_detuned_fields(s);
    const cplx r0 = chi4nl_ratio(p_factors(s, f, 0.0, 0.0), f);
    CHECK(std::abs(r0 - cplx(1.0, 0.0)) <= 1e-14);
    double prev = 1.0;
    for (double w : {1e4, 3e4, 1e5, 3e5, 1e6}) {
        const double mag = std::abs(chi4nl_ratio(p_factors(s, f, w, 0.0), f));
        CHECK(mag < prev);
        prev = mag;
    }
}

TEST_CASE("regression anchors: dressed values at the figure operating points") {
    const SchemeConfig s = sodium_preset();
    // fig1c, v = 0, probe at the induced Doppler-free resonance
    const FieldSet f1c = fig1c_fields(s);
    const double w1c = df_resonance_omega1(s, f1c);
    CHECK(w1c == Catch::Approx(2501.204542745918).margin(1e-3));
    const cplx c4 = chi4_ratio(p_factors(s, f1c, w1c, 0.0), f1c);
    CHECK(c4.real() == Catch::Approx(9.39876086852683e-05).epsilon(1e-9));
    CHECK(c4.imag() == Catch::Approx(0.00967089288959599).epsilon(1e-9));

    // fig1b, v = 0, probe at the induced Doppler-free resonance
    const FieldSet f1b = fig1b_fields(s);
    const double w1b = df_resonance_omega1(s, f1b);
    CHECK(w1b == Catch::Approx(100136.621587931892).margin(1e-3));
    const cplx c4nl = chi4nl_ratio(p_factors(s, f1b, w1b, 0.0), f1b);
    CHECK(std::abs(c4nl) == Catch::Approx(2.15320984334505e-07).epsilon(1e-9));
}

TEST_CASE("induced resonance: no dressing returns (Gamma02, Omega1 - Omega2)") {
    const SchemeConfig s = sodium_preset();
    FieldSet f = detail::base_fields(s);
    f.e2.detuning_mhz = 1500.0;
    f.e3m.detuning_mhz = 800.0;
    const InducedResonance ir = induced_resonance(s, f, 1750.0);
    CHECK(ir.gamma_mhz == Catch::Approx(s.gamma02_mhz).epsilon(1e-14));
    CHECK(ir.position_mhz == Catch::Approx(250.0).epsilon(1e-14));
}

TEST_CASE("induced resonance: far-detuned control gives the -|G|^2/Omega4m ac-Stark shift") {
    const SchemeConfig s = sodium_preset();
    FieldSet f = detail::base_fields(s);
    f.e2.detuning_mhz = 92.3e3;
    f.e3m.detuning_mhz = 73.2e3;
    f.e3m.rabi_mhz = 25.2e3;
    // Omega1 = Omega2 so that Omega4m = Omega3m = 73.2 GHz exactly
    const InducedResonance ir = induced_resonance(s, f, 92.3e3);
    const double omega4m = 73.2e3;
    const double expected =
        -25.2e3 * 25.2e3 * omega4m / (15.92 * 15.92 + omega4m * omega4m);  // = -8675.4 MHz
    CHECK(ir.position_mhz - 0.0 == Catch::Approx(expected).epsilon(1e-9));
    CHECK(std::abs(expected) == Catch::Approx(8.68e3).epsilon(1e-3));
}

TEST_CASE("induced resonance: drive power shift is negligible at fig1b detunings") {
    const SchemeConfig s = sodium_preset();
    FieldSet f = detail::base_fields(s);
    f.e2.detuning_mhz = 92.0e3;
    f.e2.rabi_mhz = 128.5;
    // probe 92 GHz from one-photon resonance: shift = Im(|G12|^2/P01) ~ |G12|^2/Omega1
    const InducedResonance ir = induced_resonance(s, f, 92.0e3);
    const double shift = ir.position_mhz - (92.0e3 - 92.0e3);
    CHECK(std::abs(shift) == Catch::Approx(128.5 * 128.5 / 92.0e3).epsilon(1e-3));
    CHECK(std::abs(shift) < 0.2);
}

TEST_CASE("linearized Im P02~ slope matches the compensation bracket at large detunings") {
    const SchemeConfig s = sodium_preset();
    FieldSet f = detail::base_fields(s);
    // one-photon detunings >= 20x all Doppler shifts and widths
    f.e2.detuning_mhz = 60.0e3;
    f.e2.rabi_mhz = 500.0;
    f.e3m.detuning_mhz = 40.0e3;
    f.e3m.rabi_mhz = 8.0e3;
    const double omega1 = 61.0e3;
    const double omega4m = omega1 - f.e2.detuning_mhz + f.e3m.detuning_mhz;
    const double k1 = 1.0 / 661.0, k2 = 1.0 / 746.0, k3 = 1.0 / 514.0;
    const double g12sq = 500.0 * 500.0, g23msq = 8.0e3 * 8.0e3;
    const double bracket = (g12sq / (omega1 * omega1)) * k1 +
                           (1.0 + g23msq / (omega4m * omega4m)) * (k1 - k2) -
                           (g23msq / (omega4m * omega4m)) * k3;
    const double h = 0.5;  // m/s
    const double im_plus = p_factors(s, f, omega1, h).p02tilde.imag();
    const double im_minus = p_factors(s, f, omega1, -h).p02tilde.imag();
    const double slope = (im_plus - im_minus) / (2.0 * h);  // MHz per m/s
    CHECK(slope == Catch::Approx(-bracket * 1e3).epsilon(0.05));
}

TEST_CASE("responses stay finite over velocity/detuning grids") {
    const SchemeConfig s = sodium_preset();
    for (const FieldSet& f : {fig1b_fields(s), fig1c_fields(s)}) {
        const double center = df_resonance_omega1(s, f);
        for (double dv = -3.0; dv <= 3.0; dv += 0.37) {
            for (double dw = -2000.0; dw <= 2000.0; dw += 211.0) {
                const ResponsePoint rp = evaluate_response(s, f, center + dw, dv * s.u_mps);
                CHECK(std::isfinite(rp.chi1_ratio.real()));
                CHECK(std::isfinite(rp.chi1_ratio.imag()));
                CHECK(std::isfinite(rp.chi4_ratio.real()));
                CHECK(std::isfinite(rp.chi4_ratio.imag()));
                CHECK(std::isfinite(rp.chi4nl_ratio.real()));
                CHECK(std::isfinite(rp.chi4nl_ratio.imag()));
            }
        }
    }
}

TEST_CASE("df_resonance_omega1 zeroes Im P02~") {
    const SchemeConfig s = sodium_preset();
    for (const FieldSet& f : {fig1b_fields(s), fig1c_fields(s)}) {
        for (double v : {0.0, 200.0, -450.0}) {
            const double root = df_resonance_omega1(s, f, v);
            const double im = p_factors(s, f, root, v).p02tilde.imag();
            CHECK(std::abs(im) < 1e-5 * std::max(1.0, std::abs(root)) * 1e-3 + 1e-4);
        }
    }
}

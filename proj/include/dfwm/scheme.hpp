#pragma once

// Four-level Raman four-wave-mixing scheme: domain types, unit conventions
// and the Na2 preset.
//
// Unit conventions used throughout the library:
//   - detunings, Rabi frequencies and widths are ordinary frequencies in MHz
//     (half-widths Gamma_ij are HWHM),
//   - wavelengths in nm, inverse wavelengths in 1/nm,
//   - velocities in m/s; the Doppler shift of wave j for velocity v is
//     direction_j * v / lambda_j (1e3 * v * (1/lambda) in MHz),
//   - Maxwell weight W(v) = exp(-v^2/u^2) / (sqrt(pi) u) with u the
//     most-probable speed, so the Doppler HWHM of a line is (u/lambda) sqrt(ln 2).
//
// Level labels: 0 (populated ground), 1, 2, 3. Wave roles: E1 probes 0-1,
// E2 drives 1-2, E3+ (weak) and E3- (strong, counter-propagating) couple 2-3,
// E4 is generated on 3-0 at omega4 = omega1 - omega2 + omega3+.

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "dfwm/errors.hpp"
#include "dfwm/numeric.hpp"

namespace dfwm {

struct Transition {
    std::string label;       // one of "01", "12", "23", "03"
    double wavelength_nm = 0.0;
    double gamma_mhz = 0.0;  // homogeneous half-width
    double doppler_hwhm_mhz = 0.0;  // derived: 1e3 * (u / lambda) * sqrt(ln 2)

    double inv_wavelength_nm() const { return 1.0 / wavelength_nm; }
};

struct SchemeConfig {
    std::array<Transition, 4> transitions{};  // order: 01, 12, 23, 03
    double u_mps = 0.0;            // thermal (most probable) velocity
    double gamma02_mhz = 0.0;      // Raman coherence half-width
    double dipole_ratio_sq = 1.0;  // |d03|^2 / |d01|^2
    double alpha01 = 1.0;          // resonant absorption scale (optical-thickness unit)

    const Transition& t01() const { return transitions[0]; }
    const Transition& t12() const { return transitions[1]; }
    const Transition& t23() const { return transitions[2]; }
    const Transition& t03() const { return transitions[3]; }

    double gamma01_mhz() const { return t01().gamma_mhz; }
    double gamma03_mhz() const { return t03().gamma_mhz; }

    // The generated wave's inverse wavelength is recomputed from frequency
    // conservation, not read from lambda03 (the rounded table value violates
    // conservation in the 4th digit).
    double inv_generated_nm() const {
        return t01().inv_wavelength_nm() - t12().inv_wavelength_nm() + t23().inv_wavelength_nm();
    }

    double doppler_hwhm_generated_mhz() const {
        return kMHzPerMpsInvNm * u_mps * inv_generated_nm() * kSqrtLn2;
    }
};

// Five wave roles of the mixing scheme.
enum class FieldRole { E1, E2, E3plus, E3minus, E4 };

struct Field {
    FieldRole role = FieldRole::E1;
    double rabi_mhz = 0.0;      // |G|, phase fixed to zero
    double detuning_mhz = std::numeric_limits<double>::quiet_NaN();
    int direction = +1;         // +1 co-propagating with E1, -1 counter-propagating
    double inv_wavelength_nm = 0.0;

    // Signed wave number used in all Doppler-shift arithmetic.
    double kappa_nm() const { return direction * inv_wavelength_nm; }
};

struct FieldSet {
    Field e1, e2, e3p, e3m, e4;

    bool omega1_set() const { return !std::isnan(e1.detuning_mhz); }
    FieldSet with_omega1(double omega1_mhz) const {
        FieldSet out = *this;
        out.e1.detuning_mhz = omega1_mhz;
        return out;
    }
    FieldSet without_control() const {
        FieldSet out = *this;
        out.e3m.rabi_mhz = 0.0;
        return out;
    }
};

namespace detail {

inline void validate_transition(const Transition& t) {
    if (!(t.wavelength_nm > 0.0))
        throw config_error("transition " + t.label + ": wavelength must be > 0");
    if (!(t.gamma_mhz > 0.0))
        throw config_error("transition " + t.label + ": gamma must be > 0");
}

}  // namespace detail

inline void validate(const SchemeConfig& s) {
    for (const auto& t : s.transitions) detail::validate_transition(t);
    if (!(s.u_mps > 0.0)) throw config_error("scheme.u_mps must be > 0");
    if (!(s.gamma02_mhz > 0.0)) throw config_error("scheme.gamma02_mhz must be > 0");
    if (!(s.dipole_ratio_sq > 0.0)) throw config_error("scheme.dipole_ratio_sq must be > 0");
    // Pairwise width consistency of the relaxation model (gamma0 = 0):
    // Gamma01 + Gamma23 == Gamma12 + Gamma03.
    const double mismatch = s.t01().gamma_mhz + s.t23().gamma_mhz - s.t12().gamma_mhz - s.t03().gamma_mhz;
    if (std::abs(mismatch) > 0.02)
        throw config_error("scheme.transitions: half-widths violate gamma01+gamma23 = gamma12+gamma03 by " +
                           std::to_string(mismatch) + " MHz (tolerance 0.02)");
}

inline void validate(const FieldSet& f) {
    for (const Field* p : {&f.e1, &f.e2, &f.e3p, &f.e3m, &f.e4}) {
        if (p->rabi_mhz < 0.0) throw config_error("field rabi frequency must be >= 0");
        if (p->direction != 1 && p->direction != -1)
            throw config_error("field direction must be +1 or -1");
        if (!(p->inv_wavelength_nm > 0.0))
            throw config_error("field inverse wavelength must be > 0");
    }
    if (f.e1.direction != 1 || f.e2.direction != 1 || f.e3p.direction != 1 || f.e4.direction != 1)
        throw config_error("E1, E2, E3plus and E4 must co-propagate (direction +1)");
}

// Assemble a scheme from wavelengths and half-widths; Doppler HWHMs are
// derived from u, gamma02 from the gamma0 = 0 decomposition unless given.
inline SchemeConfig make_scheme(const std::array<double, 4>& wavelengths_nm,
                                const std::array<double, 4>& gammas_mhz, double u_mps,
                                double gamma02_mhz = 0.0, double dipole_ratio_sq = 1.0,
                                double alpha01 = 1.0) {
    SchemeConfig s;
    static const std::array<std::string, 4> labels{"01", "12", "23", "03"};
    for (std::size_t i = 0; i < 4; ++i) {
        s.transitions[i].label = labels[i];
        s.transitions[i].wavelength_nm = wavelengths_nm[i];
        s.transitions[i].gamma_mhz = gammas_mhz[i];
        s.transitions[i].doppler_hwhm_mhz =
            kMHzPerMpsInvNm * u_mps / wavelengths_nm[i] * kSqrtLn2;
    }
    s.u_mps = u_mps;
    // Gamma_ij = (gamma_i + gamma_j)/2 with gamma_0 = 0 gives
    // Gamma02 = Gamma23 - Gamma03.
    s.gamma02_mhz = gamma02_mhz > 0.0 ? gamma02_mhz : gammas_mhz[2] - gammas_mhz[3];
    s.dipole_ratio_sq = dipole_ratio_sq;
    s.alpha01 = alpha01;
    validate(s);
    return s;
}

// Na2 transition set: lambda = {661, 746, 514, 473} nm,
// Gamma = {20.69, 23.08, 18.30, 15.92} MHz, Doppler HWHM(01) = 0.678 GHz.
// u is fixed by transition 01: u = 678 MHz * 661 nm / sqrt(ln 2).
inline SchemeConfig sodium_preset() {
    const double doppler01_mhz = 678.0;
    const double lambda01_nm = 661.0;
    const double u = doppler01_mhz * lambda01_nm / kSqrtLn2 / kMHzPerMpsInvNm;
    return make_scheme({661.0, 746.0, 514.0, 473.0}, {20.69, 23.08, 18.30, 15.92}, u);
}

namespace detail {

inline FieldSet base_fields(const SchemeConfig& s) {
    FieldSet f;
    f.e1 = {FieldRole::E1, 0.0, std::numeric_limits<double>::quiet_NaN(), +1,
            s.t01().inv_wavelength_nm()};
    f.e2 = {FieldRole::E2, 0.0, 0.0, +1, s.t12().inv_wavelength_nm()};
    f.e3p = {FieldRole::E3plus, 0.0, 0.0, +1, s.t23().inv_wavelength_nm()};
    f.e3m = {FieldRole::E3minus, 0.0, 0.0, -1, s.t23().inv_wavelength_nm()};
    f.e4 = {FieldRole::E4, 0.0, 0.0, +1, s.inv_generated_nm()};
    return f;
}

}  // namespace detail

// Field configuration of Fig. 1b: G12 = 128.5 MHz, G23- = 25.2 GHz,
// Omega2 = 92.3 GHz, Omega3+ = -7.3 GHz, Omega3- = 73.2 GHz, G23+ = 5.78 MHz.
// Omega1 is left unset (chosen by a scan or by the DF designer).
inline FieldSet fig1b_fields(const SchemeConfig& s) {
    FieldSet f = detail::base_fields(s);
    f.e2.rabi_mhz = 128.5;
    f.e2.detuning_mhz = 92.3e3;
    f.e3p.rabi_mhz = 5.78;
    f.e3p.detuning_mhz = -7.3e3;
    f.e3m.rabi_mhz = 25.2e3;
    f.e3m.detuning_mhz = 73.2e3;
    return f;
}

// Field configuration of Fig. 1c: G12 = 74.2 MHz, G23- = 635.8 MHz,
// Omega2 = 2.3 GHz, Omega3+ = -1.96 GHz, Omega3- = 1.83 GHz, G23+ = 5.78 MHz.
inline FieldSet fig1c_fields(const SchemeConfig& s) {
    FieldSet f = detail::base_fields(s);
    f.e2.rabi_mhz = 74.2;
    f.e2.detuning_mhz = 2.3e3;
    f.e3p.rabi_mhz = 5.78;
    f.e3p.detuning_mhz = -1.96e3;
    f.e3m.rabi_mhz = 635.8;
    f.e3m.detuning_mhz = 1.83e3;
    return f;
}

}  // namespace dfwm

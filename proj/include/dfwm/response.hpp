#pragma once

// Per-velocity complex response of the dressed scheme: the P factors, the
// dressed two-photon denominator and the three susceptibility ratios
//
//   chi1/chi10   = Gamma01 (P03- P02 + |G23-|^2) / (P01 P03- P02~),
//   chi4/chi30   = (Gamma03/P03) (P01- P02- + |G12|^2)
//                    / (P01- {P02- + |G23-|^2/P03 + |G12|^2/P01-}),
//   chi4nl ratio = Gamma01 Gamma02 Gamma03 / (P01 P02~ (P03 + |G23-|^2/P02-)),
//
// the last being the FWM susceptibility normalized to its fields-off,
// all-resonant, v = 0 value so the dipole/hbar prefactor drops out.
//
// Combination detunings and wave numbers (signed kappas, see scheme.hpp):
//   Omega4  = Omega1 - Omega2 + Omega3+        kS  = k1 - k2 + k3+  (= k4)
//   Omega4- = Omega1 - Omega2 + Omega3-        kS- = k1 - k2 + kappa3-
//   Omega1- = Omega4 - Omega3- + Omega2        k1- = k4 - kappa3- + k2
// For the counter-propagating control (kappa3- = -k3-) these reduce to the
// printed kS- = k1 - k2 - k3- and k1- = k4 + k3- + k2.

#include <complex>

#include "dfwm/numeric.hpp"
#include "dfwm/scheme.hpp"

namespace dfwm {

struct PFactors {
    cplx p01, p01m, p02, p02m, p03, p03m;
    cplx p02tilde;          // P02 + |G12|^2/P01 + |G23-|^2/P03-
    double omega4_mhz = 0;  // Omega1 - Omega2 + Omega3+
    double omega4m_mhz = 0; // Omega1 - Omega2 + Omega3-
    double omega1m_mhz = 0; // Omega4 - Omega3- + Omega2
};

struct ResponsePoint {
    cplx chi1_ratio;
    cplx chi4_ratio;
    cplx chi4nl_ratio;
    double v_mps = 0;
    double probe_detuning_mhz = 0;
};

// Energy conservation of the generated wave is enforced: Omega4 is always
// derived as Omega1 - Omega2 + Omega3+, never an independent input.
inline double omega4_of(const FieldSet& f, double omega1_mhz) {
    return omega1_mhz - f.e2.detuning_mhz + f.e3p.detuning_mhz;
}

inline PFactors p_factors(const SchemeConfig& s, const FieldSet& f, double omega1_mhz,
                          double v_mps) {
    if (!(s.gamma01_mhz() > 0.0) || !(s.gamma02_mhz > 0.0) || !(s.gamma03_mhz() > 0.0))
        throw config_error("p_factors: half-widths must be positive");

    const double g01 = s.gamma01_mhz();
    const double g02 = s.gamma02_mhz;
    const double g03 = s.gamma03_mhz();

    const double k1 = f.e1.kappa_nm();
    const double k2 = f.e2.kappa_nm();
    const double k3p = f.e3p.kappa_nm();
    const double k3m = f.e3m.kappa_nm();   // negative for the counter-propagating control
    const double k4 = k1 - k2 + k3p;       // conservation; equals the scheme's 1/lambda4

    PFactors p;
    p.omega4_mhz = omega4_of(f, omega1_mhz);
    p.omega4m_mhz = omega1_mhz - f.e2.detuning_mhz + f.e3m.detuning_mhz;
    p.omega1m_mhz = p.omega4_mhz - f.e3m.detuning_mhz + f.e2.detuning_mhz;

    auto shifted = [v_mps](double gamma, double omega, double kappa) {
        return cplx(gamma, omega - doppler_shift_mhz(kappa, v_mps));
    };

    p.p01 = shifted(g01, omega1_mhz, k1);
    p.p02 = shifted(g02, omega1_mhz - f.e2.detuning_mhz, k1 - k2);
    p.p03 = shifted(g03, p.omega4_mhz, k4);
    p.p03m = shifted(g03, p.omega4m_mhz, k1 - k2 + k3m);           // kS-
    p.p02m = shifted(g02, p.omega4_mhz - f.e3m.detuning_mhz, k4 - k3m);
    p.p01m = shifted(g01, p.omega1m_mhz, k4 - k3m + k2);           // k1-

    const double g12sq = f.e2.rabi_mhz * f.e2.rabi_mhz;
    const double g23msq = f.e3m.rabi_mhz * f.e3m.rabi_mhz;
    p.p02tilde = p.p02 + g12sq / p.p01 + g23msq / p.p03m;
    return p;
}

inline cplx chi1_ratio(const PFactors& p, const FieldSet& f) {
    const double g01 = p.p01.real();
    const double g23msq = f.e3m.rabi_mhz * f.e3m.rabi_mhz;
    return g01 * (p.p03m * p.p02 + g23msq) / (p.p01 * p.p03m * p.p02tilde);
}

inline cplx chi4_ratio(const PFactors& p, const FieldSet& f) {
    const double g03 = p.p03.real();
    const double g12sq = f.e2.rabi_mhz * f.e2.rabi_mhz;
    const double g23msq = f.e3m.rabi_mhz * f.e3m.rabi_mhz;
    const cplx dressed = p.p02m + g23msq / p.p03 + g12sq / p.p01m;
    return (g03 / p.p03) * (p.p01m * p.p02m + g12sq) / (p.p01m * dressed);
}

inline cplx chi4nl_ratio(const PFactors& p, const FieldSet& f) {
    const double g01 = p.p01.real();
    const double g02 = p.p02.real();
    const double g03 = p.p03.real();
    const double g23msq = f.e3m.rabi_mhz * f.e3m.rabi_mhz;
    return g01 * g02 * g03 / (p.p01 * p.p02tilde * (p.p03 + g23msq / p.p02m));
}

inline ResponsePoint evaluate_response(const SchemeConfig& s, const FieldSet& f,
                                       double omega1_mhz, double v_mps) {
    const PFactors p = p_factors(s, f, omega1_mhz, v_mps);
    return {chi1_ratio(p, f), chi4_ratio(p, f), chi4nl_ratio(p, f), v_mps, omega1_mhz};
}

struct InducedResonance {
    double gamma_mhz = 0;     // half-width of the induced two-photon resonance
    double position_mhz = 0;  // Im P02~ at v = 0: zero at the induced resonance
};

// Half-width and position indicator of the dressed two-photon resonance,
// evaluated at v = 0 for the given probe detuning:
//   Gamma02~ = Gamma02 + Re(|G12|^2/P01 + |G23-|^2/P03-),
//   Omega02~ = (Omega1 - Omega2) + Im(|G12|^2/P01 + |G23-|^2/P03-).
inline InducedResonance induced_resonance(const SchemeConfig& s, const FieldSet& f,
                                          double omega1_hint_mhz) {
    const PFactors p = p_factors(s, f, omega1_hint_mhz, 0.0);
    const cplx shift = p.p02tilde - p.p02;
    return {s.gamma02_mhz + shift.real(),
            omega1_hint_mhz - f.e2.detuning_mhz + shift.imag()};
}

// Probe detuning at which Im P02~(v, .) vanishes, i.e. the dressed two-photon
// resonance for the velocity class v. Fixed point on
//   Omega1 = Omega2 + (k1 - k2) v - Im(|G12|^2/P01 + |G23-|^2/P03-),
// which contracts because the power shifts vary on the one-photon detuning
// scale; bisection fallback for awkward field configurations.
inline double df_resonance_omega1(const SchemeConfig& s, const FieldSet& f,
                                  double v_mps = 0.0,
                                  double omega1_hint_mhz = std::numeric_limits<double>::quiet_NaN()) {
    const double two_photon_shift =
        doppler_shift_mhz(f.e1.kappa_nm() - f.e2.kappa_nm(), v_mps);
    double omega1 = std::isnan(omega1_hint_mhz) ? f.e2.detuning_mhz + two_photon_shift
                                                : omega1_hint_mhz;
    auto im_p02t = [&](double w) { return p_factors(s, f, w, v_mps).p02tilde.imag(); };
    auto next = [&](double w) {
        const PFactors p = p_factors(s, f, w, v_mps);
        const cplx shift = p.p02tilde - p.p02;
        return f.e2.detuning_mhz + two_photon_shift - shift.imag();
    };
    for (int it = 0; it < 200; ++it) {
        const double updated = next(omega1);
        if (std::abs(updated - omega1) <= 1e-10 * std::max(1.0, std::abs(updated))) {
            return updated;
        }
        omega1 = updated;
    }
    // Bisection on Im P02~, expanding the bracket around the last iterate.
    double lo = omega1, hi = omega1;
    double span = std::max(1.0, 1e-3 * std::abs(omega1));
    for (int it = 0; it < 80; ++it) {
        lo = omega1 - span;
        hi = omega1 + span;
        if (im_p02t(lo) * im_p02t(hi) < 0.0) break;
        span *= 2.0;
    }
    double flo = im_p02t(lo), fhi = im_p02t(hi);
    if (flo * fhi > 0.0) throw numeric_error("df_resonance_omega1: no bracket for Im P02~ root");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = im_p02t(mid);
        if (fmid == 0.0 || (hi - lo) <= 1e-10 * std::max(1.0, std::abs(mid))) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace dfwm

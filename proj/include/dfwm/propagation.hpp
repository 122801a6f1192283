#pragma once

// Propagation through the optically thick medium: power-dependent absorption
// indices, complex phase mismatch and quantum conversion efficiency.
//
// All lengths are optical thicknesses alpha01*z. The absorption indices are
//   alpha_j = alpha0j Re<ratio_j> / base_j,   base_j = Re<Gamma0j/P0j> (fields
// off, zero detuning), with alpha04/alpha01 = |d03|^2/|d01|^2: the
// Doppler-averaged resonant absorption scales as |d|^2/u independent of the
// homogeneous width. The induced dispersion enters as
//   dphase_j = -(alpha0j/2) Im<ratio_j> / base_j.
//
// Complex mismatch per the printed wave numbers K_j = k_j - i alpha_j/2 with
// the collinear geometric part cancelled by frequency conservation:
//   dK = (dphase4 - dphase1) - i (alpha4 - alpha1)/2.
//
// The conversion efficiency is shipped two ways: the closed form
//   eta_q = (w1/w4) |sigma|^2 / |dK|^2 exp(-alpha4 z) |exp(-i dK z) - 1|^2
// taken verbatim, and an envelope ODE oracle
//   dA4/dz = i sigma exp(-alpha1 z/2) exp(i Re(dK) z) - (alpha4/2) A4
// integrated adaptively. The two bookkeepings of alpha4 inside/outside the
// exponential agree when alpha1 = alpha4 and Re dK = 0 and can differ
// otherwise; disagreements beyond 5% are flagged rather than hidden.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "dfwm/doppler.hpp"
#include "dfwm/numeric.hpp"
#include "dfwm/response.hpp"
#include "dfwm/scheme.hpp"

namespace dfwm {

struct AbsorptionSet {
    double alpha1 = 0, alpha4 = 0;    // absorption indices, units of alpha01
    double dphase1 = 0, dphase4 = 0;  // induced dispersion, units of alpha01
    double base1 = 0, base4 = 0;      // fields-off resonant normalizers
};

struct ConversionResult {
    std::vector<double> thickness;  // alpha01 * z
    std::vector<double> eta;        // quantum conversion efficiency
    cplx delta_k{};                 // units of alpha01
    cplx coupling{};                // sigma, units of alpha01
    std::string method;             // "closed-form" | "ode"
};

namespace detail {

// Fields-off copy used for the resonant normalizers.
inline FieldSet fields_off(const FieldSet& f) {
    FieldSet off = f;
    off.e1.rabi_mhz = off.e2.rabi_mhz = off.e3p.rabi_mhz = off.e3m.rabi_mhz = 0.0;
    return off;
}

}  // namespace detail

inline AbsorptionSet absorption_set(const SchemeConfig& s, const FieldSet& f, double omega1_mhz,
                                    const VelocityGrid& grid) {
    const FieldSet off = detail::fields_off(f);
    AbsorptionSet a;
    // base1: probe on resonance (Omega1 = 0); base4: generated wave on
    // resonance (Omega4 = 0, i.e. Omega1 = Omega2 - Omega3+). Both reduce to
    // Gamma/P and take the same guarded-quadrature path as the dressed
    // ratios, so the fields-off anchor alpha1 = alpha01 holds exactly.
    a.base1 = guarded_average(s, off, ResponseKind::chi1, 0.0, grid).real();
    a.base4 = guarded_average(s, off, ResponseKind::chi4,
                              off.e2.detuning_mhz - off.e3p.detuning_mhz, grid)
                  .real();

    const cplx ratio1 = guarded_average(s, f, ResponseKind::chi1, omega1_mhz, grid);
    const cplx ratio4 = guarded_average(s, f, ResponseKind::chi4, omega1_mhz, grid);
    const double alpha04 = s.alpha01 * s.dipole_ratio_sq;
    a.alpha1 = s.alpha01 * ratio1.real() / a.base1;
    a.dphase1 = -0.5 * s.alpha01 * ratio1.imag() / a.base1;
    a.alpha4 = alpha04 * ratio4.real() / a.base4;
    a.dphase4 = -0.5 * alpha04 * ratio4.imag() / a.base4;
    return a;
}

inline cplx phase_mismatch(const SchemeConfig&, const AbsorptionSet& a) {
    return {a.dphase4 - a.dphase1, -0.5 * (a.alpha4 - a.alpha1)};
}

// Nonlinear drive in Rabi-amplitude form, normalized to alpha01:
//   sigma = (alpha01/2) (|d03|^2/|d01|^2) (Dnu4D/sqrt(pi ln2)) G12 G23+ <1/D>
// with D(v) = P01 P02~ (P03 + |G23-|^2/P02-), the denominator of the FWM
// susceptibility. <1/D> = <chi4nl>/(Gamma01 Gamma02 Gamma03).
inline cplx nonlinear_coupling(const SchemeConfig& s, const FieldSet& f, double omega1_mhz,
                               const VelocityGrid& grid) {
    const cplx avg = guarded_average(s, f, ResponseKind::chi4nl, omega1_mhz, grid);
    const cplx inv_d = avg / (s.gamma01_mhz() * s.gamma02_mhz * s.gamma03_mhz());
    const double dnu4 = s.doppler_hwhm_generated_mhz();
    return 0.5 * s.alpha01 * s.dipole_ratio_sq * (dnu4 / std::sqrt(kPi * kLn2)) *
           f.e2.rabi_mhz * f.e3p.rabi_mhz * inv_d;
}

inline ConversionResult qce_closed_form(cplx sigma, cplx dk, double alpha4,
                                        const std::vector<double>& thickness,
                                        double omega1_over_omega4) {
    ConversionResult r;
    r.thickness = thickness;
    r.delta_k = dk;
    r.coupling = sigma;
    r.method = "closed-form";
    r.eta.reserve(thickness.size());
    const double drive = omega1_over_omega4 * std::norm(sigma);
    for (double z : thickness) {
        double eta;
        if (dk == cplx(0.0, 0.0)) {
            eta = drive * z * z * std::exp(-alpha4 * z);
        } else {
            const cplx bracket = cexpm1(cplx(0.0, -1.0) * dk * z);
            eta = drive / std::norm(dk) * std::exp(-alpha4 * z) * std::norm(bracket);
        }
        r.eta.push_back(eta);
    }
    return r;
}

// Envelope-integration oracle. a0 allows seeding a nonzero input amplitude
// (pure Beer-decay test mode).
inline ConversionResult qce_ode(cplx sigma, double alpha1, double alpha4, double dk_real,
                                const std::vector<double>& thickness, double omega1_over_omega4,
                                cplx a0 = cplx(0.0, 0.0)) {
    namespace odeint = boost::numeric::odeint;
    using state_type = std::array<double, 2>;

    ConversionResult r;
    r.thickness = thickness;
    r.delta_k = cplx(dk_real, 0.0);
    r.coupling = sigma;
    r.method = "ode";
    if (thickness.empty()) return r;
    for (std::size_t i = 1; i < thickness.size(); ++i)
        if (!(thickness[i] > thickness[i - 1]))
            throw numeric_error("qce_ode: thickness values must be strictly increasing");
    if (thickness.front() < 0.0) throw numeric_error("qce_ode: negative optical thickness");

    auto rhs = [&](const state_type& y, state_type& dydz, double z) {
        const cplx a(y[0], y[1]);
        const cplx d = cplx(0.0, 1.0) * sigma * std::exp(-0.5 * alpha1 * z) *
                           std::exp(cplx(0.0, dk_real * z)) -
                       0.5 * alpha4 * a;
        dydz[0] = d.real();
        dydz[1] = d.imag();
    };

    std::vector<double> times = thickness;
    state_type y{a0.real(), a0.imag()};
    r.eta.reserve(times.size());
    if (times.front() > 0.0) times.insert(times.begin(), 0.0);
    const bool skip_first = times.size() != thickness.size();

    const double z_end = times.back();
    const double dt0 = z_end > 0.0 ? std::max(1e-12, z_end / 1024.0) : 1e-3;
    std::size_t emitted = 0;
    try {
        auto stepper = odeint::make_controlled(1e-13, 1e-10,
                                               odeint::runge_kutta_dopri5<state_type>());
        odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), dt0,
                                [&](const state_type& yy, double) {
                                    if (skip_first && emitted == 0) {
                                        ++emitted;
                                        return;
                                    }
                                    ++emitted;
                                    r.eta.push_back(omega1_over_omega4 *
                                                    (yy[0] * yy[0] + yy[1] * yy[1]));
                                });
    } catch (const std::exception& e) {
        throw numeric_error(std::string("qce_ode: integration failed: ") + e.what());
    }
    return r;
}

struct ConversionScan {
    ConversionResult closed;
    ConversionResult ode;
    AbsorptionSet absorption;
    cplx delta_k{};
    cplx coupling{};
    double omega1_mhz = 0;
    double omega1_over_omega4 = 0;
    double max_rel_gap = 0;          // max |eta_closed - eta_ode| / max eta_ode
    bool method_discrepancy = false; // true when the two bookkeepings differ > 5%
};

inline ConversionScan conversion_scan(const SchemeConfig& s, const FieldSet& f, double omega1_mhz,
                                      double z_max, int n_z, const VelocityGrid& grid) {
    if (z_max < 0.0) throw config_error("conversion_scan: z_max must be >= 0");
    if (n_z < 1) throw config_error("conversion_scan: need at least one thickness sample");

    ConversionScan scan;
    scan.omega1_mhz = omega1_mhz;
    scan.omega1_over_omega4 = f.e1.inv_wavelength_nm / s.inv_generated_nm();
    scan.absorption = absorption_set(s, f, omega1_mhz, grid);
    scan.delta_k = phase_mismatch(s, scan.absorption);
    scan.coupling = nonlinear_coupling(s, f, omega1_mhz, grid);

    const std::vector<double> ts =
        z_max > 0.0 ? linspace(0.0, z_max, n_z) : std::vector<double>{0.0};
    scan.closed = qce_closed_form(scan.coupling, scan.delta_k, scan.absorption.alpha4, ts,
                                  scan.omega1_over_omega4);
    scan.ode = qce_ode(scan.coupling, scan.absorption.alpha1, scan.absorption.alpha4,
                       scan.delta_k.real(), ts, scan.omega1_over_omega4);

    double peak = 0.0;
    for (double e : scan.ode.eta) peak = std::max(peak, e);
    if (peak > 0.0) {
        double gap = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i)
            gap = std::max(gap, std::abs(scan.closed.eta[i] - scan.ode.eta[i]));
        scan.max_rel_gap = gap / peak;
    }
    scan.method_discrepancy = scan.max_rel_gap > 0.05;
    return scan;
}

}  // namespace dfwm

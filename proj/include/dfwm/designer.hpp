#pragma once

// Doppler-compensation designer. The linear-in-v coefficient of Im P02~,
//
//   B = (|G12|^2/Omega1^2) k1 + (1 + |G23-|^2/Omega4-^2)(k1 - k2)
//       - (|G23-|^2/Omega4-^2) k3-,
//
// vanishes when the control-field power shift cancels the two-photon Doppler
// shift. B is affine in |G23-|^2, so the compensating Rabi frequency has a
// closed form; it is iterated to self-consistency because Omega4- depends on
// the induced resonance position, which itself depends on |G23-|^2. A
// numerical refinement then minimizes the spread of the per-velocity
// resonance centers, argmax_Omega1 |chi4nl(v, Omega1)|.
//
// Since k2 < k1, B > 0 for any drive strength when the control is off: the
// scheme has no Doppler-free point without the counter-propagating control.

#include <cmath>
#include <functional>

#include "dfwm/doppler.hpp"
#include "dfwm/numeric.hpp"
#include "dfwm/response.hpp"
#include "dfwm/scheme.hpp"

namespace dfwm {

struct CompensationReport {
    double bracket_mhz_per_mps = 0;          // B at the solution, per-velocity units
    double solved_rabi_mhz = 0;              // G23-
    double self_consistent_detuning_mhz = 0; // Omega4- at the solution
    double center_spread_mhz = 0;            // max-min of per-velocity centers, |v| <= 2u
    int iterations = 0;
    bool validity_warning = false;
};

// Validity domain of the linearization: one-photon detunings well above the
// corresponding Doppler widths.
inline bool compensation_validity_warning(const SchemeConfig& s, const FieldSet& f,
                                          double omega1_mhz) {
    const double omega4m = omega1_mhz - f.e2.detuning_mhz + f.e3m.detuning_mhz;
    return std::abs(omega1_mhz) < 5.0 * s.t01().doppler_hwhm_mhz ||
           std::abs(omega4m) < 5.0 * s.t03().doppler_hwhm_mhz;
}

// Eq.-(9) bracket in 1/nm (multiply by 1e3 for MHz per m/s).
inline double compensation_residual(const SchemeConfig& s, const FieldSet& f, double omega1_mhz,
                                    bool* warning = nullptr) {
    const double k1 = f.e1.kappa_nm();
    const double k2 = f.e2.kappa_nm();
    const double ksm = k1 - k2 + f.e3m.kappa_nm();
    const double omega4m = omega1_mhz - f.e2.detuning_mhz + f.e3m.detuning_mhz;
    const double g12sq = f.e2.rabi_mhz * f.e2.rabi_mhz;
    const double g23msq = f.e3m.rabi_mhz * f.e3m.rabi_mhz;
    if (warning) *warning = compensation_validity_warning(s, f, omega1_mhz);
    return (g12sq / (omega1_mhz * omega1_mhz)) * k1 + (k1 - k2) +
           (g23msq / (omega4m * omega4m)) * ksm;
}

namespace detail {

inline double argmax_chi4nl(const SchemeConfig& s, const FieldSet& f, double v_mps,
                            double window_center_mhz, double window_halfwidth_mhz,
                            double xtol_mhz) {
    auto objective = [&](double omega1) {
        return std::abs(chi4nl_ratio(p_factors(s, f, omega1, v_mps), f));
    };
    return golden_section_max(objective, window_center_mhz - window_halfwidth_mhz,
                              window_center_mhz + window_halfwidth_mhz, xtol_mhz);
}

}  // namespace detail

// Dressed two-photon resonance center for one velocity class:
// argmax over Omega1 of |chi4nl(v, Omega1)|, searched around the root of
// Im P02~(v, .) within a window of a few induced half-widths.
inline double per_velocity_center(const SchemeConfig& s, const FieldSet& f, double v_mps,
                                  double window_mhz = 0.0) {
    const double pred = df_resonance_omega1(s, f, v_mps);
    const double gl = induced_resonance(s, f, df_resonance_omega1(s, f, 0.0)).gamma_mhz;
    const double w = window_mhz > 0.0 ? window_mhz : 12.0 * gl;
    return detail::argmax_chi4nl(s, f, v_mps, pred, w, 1e-4 * gl);
}

// Per-velocity centers on a symmetric grid, followed by continuation from
// v = 0 outward. Velocity classes one-photon resonant with the control
// combination split the two-photon peak (Autler-Townes); anchoring each
// search window to the neighbouring class keeps the centers on one branch
// instead of hopping between split components.
inline std::vector<std::pair<double, double>> per_velocity_centers(
    const SchemeConfig& s, const FieldSet& f, double v_max_mps, int v_samples = 9,
    double window_mhz = 0.0) {
    if (v_samples < 2) throw config_error("per_velocity_centers: need at least 2 velocity samples");
    const std::vector<double> vs = linspace(-v_max_mps, v_max_mps, v_samples);
    const double gl = induced_resonance(s, f, df_resonance_omega1(s, f, 0.0)).gamma_mhz;
    const double w = window_mhz > 0.0 ? window_mhz : 12.0 * gl;
    const double xtol = 1e-4 * gl;

    std::vector<std::pair<double, double>> centers(vs.size());
    const std::size_t mid = vs.size() / 2;
    const double c0 = detail::argmax_chi4nl(s, f, vs[mid], df_resonance_omega1(s, f, vs[mid]), w, xtol);
    centers[mid] = {vs[mid], c0};
    auto march = [&](std::size_t from, long step) {
        double prev = centers[from].second;
        double increment = 0.0;
        for (long i = static_cast<long>(from) + step; i >= 0 && i < static_cast<long>(vs.size());
             i += step) {
            const double guess = prev + increment;
            const double halfwidth = std::max(w, 2.0 * std::abs(increment));
            const double c = detail::argmax_chi4nl(s, f, vs[static_cast<std::size_t>(i)], guess,
                                                   halfwidth, xtol);
            centers[static_cast<std::size_t>(i)] = {vs[static_cast<std::size_t>(i)], c};
            increment = c - prev;
            prev = c;
        }
    };
    march(mid, +1);
    march(mid, -1);
    return centers;
}

// max - min of the per-velocity centers over |v| <= v_max.
inline double center_spread(const SchemeConfig& s, const FieldSet& f, double v_max_mps,
                            int v_samples = 9, double window_mhz = 0.0) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& [v, c] : per_velocity_centers(s, f, v_max_mps, v_samples, window_mhz)) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    return hi - lo;
}

// Closed-form compensating |G23-|^2, iterated to self-consistency with the
// induced-resonance position (omega1 tracks the Doppler-free resonance).
inline CompensationReport solve_control_rabi(const SchemeConfig& s, const FieldSet& fields,
                                             double omega1_hint_mhz =
                                                 std::numeric_limits<double>::quiet_NaN()) {
    FieldSet f = fields;
    f.e3m.rabi_mhz = 0.0;

    const double k1 = f.e1.kappa_nm();
    const double k2 = f.e2.kappa_nm();
    const double ksm = k1 - k2 + f.e3m.kappa_nm();
    if (!(ksm < 0.0))
        throw design_error("no compensation geometry: requires a counter-propagating control with "
                           "k3- > k1 - k2");

    double omega1 = std::isnan(omega1_hint_mhz) ? df_resonance_omega1(s, f) : omega1_hint_mhz;
    const double g12sq = f.e2.rabi_mhz * f.e2.rabi_mhz;
    double g23msq = 0.0;
    int iterations = 0;
    bool converged = false;
    for (; iterations < 50; ++iterations) {
        omega1 = df_resonance_omega1(s, f, 0.0, omega1);
        const double omega4m = omega1 - f.e2.detuning_mhz + f.e3m.detuning_mhz;
        const double numerator = (g12sq / (omega1 * omega1)) * k1 + (k1 - k2);
        const double next = -numerator * omega4m * omega4m / ksm;
        if (!(next > 0.0))
            throw design_error("no compensation geometry: |G23-|^2 must be positive "
                               "(is the control detuned? Omega4- = " +
                               std::to_string(omega4m) + " MHz)");
        f.e3m.rabi_mhz = std::sqrt(next);
        if (std::abs(next - g23msq) <= 1e-6 * next) {
            g23msq = next;
            converged = true;
            break;
        }
        g23msq = next;
    }
    if (!converged)
        throw design_error("control-field solver did not converge in 50 iterations");

    omega1 = df_resonance_omega1(s, f, 0.0, omega1);
    CompensationReport rep;
    rep.solved_rabi_mhz = std::sqrt(g23msq);
    rep.self_consistent_detuning_mhz = omega1 - f.e2.detuning_mhz + f.e3m.detuning_mhz;
    rep.bracket_mhz_per_mps =
        kMHzPerMpsInvNm * compensation_residual(s, f, omega1, &rep.validity_warning);
    rep.iterations = iterations + 1;
    rep.center_spread_mhz = center_spread(s, f, 2.0 * s.u_mps);
    return rep;
}

// Refine the control Rabi frequency by directly flattening the per-velocity
// resonance centers: scalar minimization of the center spread, starting from
// [0.7, 1.3] x the bracketing solution carried in fields.e3m. Close to the
// intermediate resonances the flattest point can sit well below the Eq.-(9)
// value (higher orders in kv/Omega shrink the trapped velocity interval), so
// an edge minimum expands the bracket before giving up.
inline CompensationReport refine_numeric(const SchemeConfig& s, const FieldSet& fields,
                                         double omega1_window_mhz = 0.0, int v_samples = 9) {
    const double g0 = fields.e3m.rabi_mhz;
    if (!(g0 > 0.0))
        throw design_error("refine_numeric: needs a bracketing solution (G23- > 0) in the field set");

    auto spread_of = [&](double rabi) {
        FieldSet f = fields;
        f.e3m.rabi_mhz = rabi;
        return center_spread(s, f, 2.0 * s.u_mps, v_samples, omega1_window_mhz);
    };

    double lo = 0.7 * g0, hi = 1.3 * g0;
    int iterations = 0;
    double best = 0.0;
    bool interior = false;
    for (int expansion = 0; expansion < 8; ++expansion) {
        int it = 0;
        best = golden_section_min(spread_of, lo, hi, 1e-4 * g0, 200, &it);
        iterations += it;
        const bool at_lo = best - lo < 5e-3 * g0;
        const bool at_hi = hi - best < 5e-3 * g0;
        if (!at_lo && !at_hi) {
            interior = true;
            break;
        }
        if (at_lo && lo > 0.05 * g0)
            lo *= 0.7;
        else if (at_hi && hi < 8.0 * g0)
            hi *= 1.3;
        else
            break;
    }
    if (!interior) throw design_error("refine_numeric: no interior minimum in the search bracket");

    FieldSet f = fields;
    f.e3m.rabi_mhz = best;
    const double omega1 = df_resonance_omega1(s, f);
    CompensationReport rep;
    rep.solved_rabi_mhz = best;
    rep.self_consistent_detuning_mhz = omega1 - f.e2.detuning_mhz + f.e3m.detuning_mhz;
    rep.bracket_mhz_per_mps =
        kMHzPerMpsInvNm * compensation_residual(s, f, omega1, &rep.validity_warning);
    rep.iterations = iterations;
    rep.center_spread_mhz = spread_of(best);
    return rep;
}

}  // namespace dfwm

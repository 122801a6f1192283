#pragma once

// CSV emission. Every file starts with a '#' header carrying the fully
// resolved parameter set, then a column-name line with explicit units.
// Formatting is fixed ("%.12g") so reruns are byte-identical.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "dfwm/doppler.hpp"
#include "dfwm/errors.hpp"
#include "dfwm/propagation.hpp"

namespace dfwm {

inline std::string fmt_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file: " + path);
    return out;
}

}  // namespace detail

inline void write_spectrum_csv(const std::string& path, const ComplexSpectrum& spec,
                               const std::string& provenance) {
    auto out = detail::open_out(path);
    out << "# " << provenance << "\n";
    out << "detuning_MHz,re,im,abs2\n";
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        const cplx v = spec.values[i];
        out << fmt_g(spec.detunings_mhz[i]) << ',' << fmt_g(v.real()) << ',' << fmt_g(v.imag())
            << ',' << fmt_g(std::norm(v)) << "\n";
    }
}

// Per-velocity response surface: one row per (v, omega1) pair.
inline void write_surface_csv(const std::string& path, const std::vector<double>& v_mps,
                              const std::vector<double>& omega1_mhz,
                              const std::vector<std::vector<cplx>>& chi1,
                              const std::vector<std::vector<cplx>>& chi4nl,
                              const std::string& provenance) {
    auto out = detail::open_out(path);
    out << "# " << provenance << "\n";
    out << "v_mps,detuning_MHz,chi1_re,chi1_im,chi4nl_re,chi4nl_im,chi4nl_abs2\n";
    for (std::size_t i = 0; i < v_mps.size(); ++i) {
        for (std::size_t j = 0; j < omega1_mhz.size(); ++j) {
            const cplx c1 = chi1[i][j];
            const cplx c4 = chi4nl[i][j];
            out << fmt_g(v_mps[i]) << ',' << fmt_g(omega1_mhz[j]) << ',' << fmt_g(c1.real())
                << ',' << fmt_g(c1.imag()) << ',' << fmt_g(c4.real()) << ',' << fmt_g(c4.imag())
                << ',' << fmt_g(std::norm(c4)) << "\n";
        }
    }
}

inline void write_conversion_csv(const std::string& path, const ConversionScan& scan,
                                 const std::string& provenance) {
    auto out = detail::open_out(path);
    out << "# " << provenance << "\n";
    out << "alpha01_z,eta_closed,eta_ode,alpha1,alpha4,re_dk,im_dk\n";
    for (std::size_t i = 0; i < scan.closed.thickness.size(); ++i) {
        out << fmt_g(scan.closed.thickness[i]) << ',' << fmt_g(scan.closed.eta[i]) << ','
            << fmt_g(scan.ode.eta[i]) << ',' << fmt_g(scan.absorption.alpha1) << ','
            << fmt_g(scan.absorption.alpha4) << ',' << fmt_g(scan.delta_k.real()) << ','
            << fmt_g(scan.delta_k.imag()) << "\n";
    }
}

}  // namespace dfwm

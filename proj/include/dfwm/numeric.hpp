#pragma once

// Small numeric utilities shared across the library: unit constants,
// deterministic pairwise summation, golden-section searches, a stable
// complex expm1 and linspace.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "dfwm/errors.hpp"

namespace dfwm {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.7724538509055160273;
inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kSqrtLn2 = 0.83255461115769775635;

// Doppler shift of a wave with inverse wavelength 1/lambda [1/nm] seen by an
// atom moving at v [m/s]:  shift[MHz] = 1e3 * v * (1/lambda).
inline constexpr double kMHzPerMpsInvNm = 1.0e3;

inline double doppler_shift_mhz(double inv_wavelength_nm, double v_mps) {
    return kMHzPerMpsInvNm * inv_wavelength_nm * v_mps;
}

// Pairwise (cascade) summation: deterministic reduction order, error O(log n).
template <typename T>
T pairwise_sum(std::vector<T> terms) {
    if (terms.empty()) return T{};
    std::size_t n = terms.size();
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
        if (n % 2 == 1) {
            terms[half] = terms[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return terms[0];
}

// exp(w) - 1 without cancellation for |w| << 1.
inline cplx cexpm1(cplx w) {
    if (std::abs(w) < 1e-4) {
        // w (1 + w/2 (1 + w/3 (1 + w/4))): relative error ~ |w|^4
        return w * (1.0 + w / 2.0 * (1.0 + w / 3.0 * (1.0 + w / 4.0)));
    }
    return std::exp(w) - 1.0;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw numeric_error("linspace: need at least one sample");
    std::vector<double> xs(static_cast<std::size_t>(n));
    if (n == 1) {
        xs[0] = lo;
        return xs;
    }
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + h * i;
    xs.back() = hi;
    return xs;
}

// Golden-section minimization on [a, b]; f must be unimodal there.
// Stops when the bracket shrinks below xtol (absolute).
inline double golden_section_min(const std::function<double(double)>& f, double a, double b,
                                 double xtol, int max_iter = 200, int* iterations = nullptr) {
    if (!(b > a)) throw numeric_error("golden_section_min: empty bracket");
    constexpr double invphi = 0.6180339887498948482;  // 1/phi
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    int it = 0;
    while ((b - a) > xtol && it < max_iter) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
        ++it;
    }
    if (iterations) *iterations = it;
    return 0.5 * (a + b);
}

inline double golden_section_max(const std::function<double(double)>& f, double a, double b,
                                 double xtol, int max_iter = 200, int* iterations = nullptr) {
    return golden_section_min([&f](double x) { return -f(x); }, a, b, xtol, max_iter, iterations);
}

}  // namespace dfwm

#pragma once

// Maxwell-distribution quadrature and velocity averaging.
//
// Two quadrature kinds are provided: Gauss-Hermite (default, weights absorb
// W(v) = exp(-v^2/u^2)/(sqrt(pi) u)) and a uniform trapezoid rule on
// [-5u, 5u] with explicit Maxwell weights, kept as the independent oracle.
//
// Dressed responses can contain velocity classes much narrower than any
// practical Gauss-Hermite spacing (e.g. a one-photon resonant class of width
// Gamma/k ~ 10 m/s). A narrow-feature guard scans the response denominators
// for such classes and silently escalates to a fine trapezoid grid when the
// requested grid cannot resolve them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "dfwm/numeric.hpp"
#include "dfwm/response.hpp"
#include "dfwm/scheme.hpp"

namespace dfwm {

enum class GridKind { gauss_hermite, adaptive_trapezoid };

struct VelocityGrid {
    std::vector<double> nodes_mps;
    std::vector<double> weights;  // normalized: sum = 1
    double u_mps = 0;
    GridKind kind = GridKind::gauss_hermite;

    std::size_t size() const { return nodes_mps.size(); }
};

namespace detail {

// Orthonormal Hermite polynomials w.r.t. exp(-x^2): stable up to high order.
// Returns (p_n(x), sum_{k<n} p_k(x)^2); the latter is the inverse Christoffel
// weight.
inline std::pair<double, double> hermite_orthonormal(int n, double x) {
    double pm1 = 0.0;
    double p = 0.75112554446494248286;  // pi^{-1/4}
    double sumsq = 0.0;
    for (int k = 0; k < n; ++k) {
        sumsq += p * p;
        const double pnext = x * std::sqrt(2.0 / (k + 1)) * p - std::sqrt(double(k) / (k + 1)) * pm1;
        pm1 = p;
        p = pnext;
    }
    return {p, sumsq};
}

inline double hermite_value(int n, double x) { return hermite_orthonormal(n, x).first; }

// Positive roots of the orthonormal Hermite polynomial of degree n,
// bracketed by a scan and polished by Newton (p_n' = sqrt(2n) p_{n-1}).
inline std::vector<double> hermite_positive_roots(int n) {
    std::vector<double> roots;
    const double xmax = std::sqrt(2.0 * n + 1.0) + 0.5;
    const double min_gap = kPi / std::sqrt(2.0 * n + 1.0);
    const double h = min_gap / 4.0;
    double x_prev = (n % 2 == 1) ? h / 2.0 : 0.0;  // skip the root at 0 for odd n
    double f_prev = hermite_value(n, x_prev);
    for (double x = x_prev + h; x <= xmax + h; x += h) {
        const double fx = hermite_value(n, x);
        if (f_prev == 0.0) {
            roots.push_back(x_prev);
        } else if (f_prev * fx < 0.0) {
            // Safeguarded Newton: classify the iterate onto a bracket side
            // first, then step; fall back to the midpoint of the *updated*
            // bracket when Newton exits it.
            double lo = x_prev, hi = x, flo = f_prev;
            double r = 0.5 * (lo + hi);
            for (int it = 0; it < 200; ++it) {
                const double pn = hermite_value(n, r);
                if (pn == 0.0) break;
                if ((pn < 0.0) == (flo < 0.0)) {
                    lo = r;
                    flo = pn;
                } else {
                    hi = r;
                }
                const double dpn = std::sqrt(2.0 * n) * hermite_value(n - 1, r);
                double next = dpn != 0.0 ? r - pn / dpn : 0.5 * (lo + hi);
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                if (hi - lo <= 4e-16 * (1.0 + hi) ||
                    std::abs(next - r) <= 4e-16 * (1.0 + std::abs(next))) {
                    r = next;
                    break;
                }
                r = next;
            }
            roots.push_back(r);
        }
        x_prev = x;
        f_prev = fx;
    }
    return roots;
}

}  // namespace detail

inline VelocityGrid make_grid(double u_mps, int n, GridKind kind) {
    if (n < 8) throw config_error("make_grid: need at least 8 nodes");
    if (!(u_mps > 0.0)) throw config_error("make_grid: u must be > 0");
    VelocityGrid g;
    g.u_mps = u_mps;
    g.kind = kind;
    if (kind == GridKind::gauss_hermite) {
        if (n > 4096) throw config_error("make_grid: gauss-hermite capped at 4096 nodes");
        const auto pos = detail::hermite_positive_roots(n);
        std::vector<double> xs;
        if (n % 2 == 1) xs.push_back(0.0);
        for (double r : pos) {
            xs.push_back(r);
            xs.push_back(-r);
        }
        std::sort(xs.begin(), xs.end());
        g.nodes_mps.reserve(xs.size());
        g.weights.reserve(xs.size());
        for (double x : xs) {
            const double inv_w = detail::hermite_orthonormal(n, x).second;
            g.nodes_mps.push_back(u_mps * x);
            g.weights.push_back(1.0 / inv_w);  // Christoffel number; sums to sqrt(pi)
        }
    } else {
        const double vmax = 5.0 * u_mps;
        const double h = 2.0 * vmax / (n - 1);
        g.nodes_mps.reserve(static_cast<std::size_t>(n));
        g.weights.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double v = -vmax + h * i;
            const double w = std::exp(-(v / u_mps) * (v / u_mps)) / (kSqrtPi * u_mps);
            const double trap = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            g.nodes_mps.push_back(v);
            g.weights.push_back(w * h * trap);
        }
    }
    const double total = pairwise_sum(g.weights);
    for (double& w : g.weights) w /= total;
    return g;
}

template <typename F>
cplx velocity_average(const VelocityGrid& grid, F&& f) {
    std::vector<cplx> terms(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        terms[i] = grid.weights[i] * f(grid.nodes_mps[i]);
    return pairwise_sum(std::move(terms));
}

enum class ResponseKind { chi1, chi4, chi4nl, chi4nl_sq };

inline ResponseKind response_kind_from(const std::string& name) {
    if (name == "chi1") return ResponseKind::chi1;
    if (name == "chi4") return ResponseKind::chi4;
    if (name == "chi4nl") return ResponseKind::chi4nl;
    if (name == "chi4nl_sq") return ResponseKind::chi4nl_sq;
    throw config_error("unknown response selector: " + name);
}

namespace detail {

inline cplx response_value(const SchemeConfig& s, const FieldSet& f, ResponseKind kind,
                           double omega1, double v) {
    const PFactors p = p_factors(s, f, omega1, v);
    switch (kind) {
        case ResponseKind::chi1:
            return chi1_ratio(p, f);
        case ResponseKind::chi4:
            return chi4_ratio(p, f);
        case ResponseKind::chi4nl:
            return chi4nl_ratio(p, f);
        case ResponseKind::chi4nl_sq: {
            const cplx c = chi4nl_ratio(p, f);
            return cplx(std::norm(c), 0.0);
        }
    }
    return {};
}

// Denominator factors whose velocity resonances bound the quadrature
// resolution for the given response.
inline std::vector<std::function<cplx(double)>> sharp_factors(const SchemeConfig& s,
                                                              const FieldSet& f,
                                                              ResponseKind kind,
                                                              double omega1) {
    const double g12sq = f.e2.rabi_mhz * f.e2.rabi_mhz;
    const double g23msq = f.e3m.rabi_mhz * f.e3m.rabi_mhz;
    auto at = [=, &s, &f](double v) { return p_factors(s, f, omega1, v); };
    std::vector<std::function<cplx(double)>> factors;
    switch (kind) {
        case ResponseKind::chi1:
            factors.push_back([at](double v) { return at(v).p01; });
            factors.push_back([at](double v) { return at(v).p03m; });
            factors.push_back([at](double v) { return at(v).p02tilde; });
            break;
        case ResponseKind::chi4:
            factors.push_back([at](double v) { return at(v).p03; });
            factors.push_back([at](double v) { return at(v).p01m; });
            factors.push_back([at](double v) { return at(v).p02m; });
            factors.push_back([at, g12sq, g23msq](double v) {
                const PFactors p = at(v);
                return p.p02m + g23msq / p.p03 + g12sq / p.p01m;
            });
            break;
        case ResponseKind::chi4nl:
        case ResponseKind::chi4nl_sq:
            factors.push_back([at](double v) { return at(v).p01; });
            factors.push_back([at](double v) { return at(v).p02tilde; });
            factors.push_back([at](double v) { return at(v).p02m; });
            factors.push_back([at, g23msq](double v) {
                const PFactors p = at(v);
                return p.p03 + g23msq / p.p02m;
            });
            break;
    }
    return factors;
}

struct VelocityFeature {
    double width_mps = std::numeric_limits<double>::infinity();
    double center_mps = 0.0;
};

// Narrowest velocity resonance (zero of Im F) of the response's denominator
// factors within |v| <= 5.2 u. Widths follow from |Re F| / |d Im F / dv|.
inline VelocityFeature narrowest_feature(const SchemeConfig& s, const FieldSet& f,
                                         ResponseKind kind, double omega1) {
    VelocityFeature best;
    const double u = s.u_mps;
    const double vspan = 5.5 * u;
    const int nscan = 4096;
    const double h = 2.0 * vspan / nscan;
    for (const auto& factor : sharp_factors(s, f, kind, omega1)) {
        double v_prev = -vspan;
        double im_prev = factor(v_prev).imag();
        for (int i = 1; i <= nscan; ++i) {
            const double v = -vspan + h * i;
            const double im = factor(v).imag();
            if (im_prev == 0.0 || im_prev * im < 0.0) {
                double lo = v_prev, hi = v;
                double flo = im_prev;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fmid = factor(mid).imag();
                    if ((fmid < 0.0) == (flo < 0.0)) {
                        lo = mid;
                        flo = fmid;
                    } else {
                        hi = mid;
                    }
                }
                const double vstar = 0.5 * (lo + hi);
                if (std::abs(vstar) <= 5.2 * u) {
                    const double dv = std::max(1e-7 * u, 1e-3 * h);
                    const double slope =
                        (factor(vstar + dv).imag() - factor(vstar - dv).imag()) / (2.0 * dv);
                    if (slope != 0.0) {
                        const double width = std::abs(factor(vstar).real() / slope);
                        if (width < best.width_mps) best = {width, vstar};
                    }
                }
            }
            v_prev = v;
            im_prev = im;
        }
    }
    return best;
}

// Local node spacing of a grid around velocity v.
inline double local_spacing(const VelocityGrid& g, double v) {
    const auto& xs = g.nodes_mps;
    auto it = std::lower_bound(xs.begin(), xs.end(), v);
    if (it == xs.begin()) return xs[1] - xs[0];
    if (it == xs.end()) return xs[xs.size() - 1] - xs[xs.size() - 2];
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    return xs[i] - xs[i - 1];
}

}  // namespace detail

struct GuardInfo {
    bool escalated = false;
    std::size_t nodes_used = 0;
    double feature_width_mps = std::numeric_limits<double>::infinity();
};

// Grid actually used for a velocity average: the requested one, or a fine
// trapezoid grid when a sub-grid velocity feature is detected.
inline VelocityGrid guarded_grid(const SchemeConfig& s, const FieldSet& f, ResponseKind kind,
                                 const std::vector<double>& omega1_samples,
                                 const VelocityGrid& requested, GuardInfo* info = nullptr) {
    detail::VelocityFeature feature;
    for (double w : omega1_samples) {
        const auto cand = detail::narrowest_feature(s, f, kind, w);
        if (cand.width_mps < feature.width_mps) feature = cand;
    }
    GuardInfo g;
    g.feature_width_mps = feature.width_mps;
    g.nodes_used = requested.size();
    if (std::isfinite(feature.width_mps) &&
        feature.width_mps < 3.0 * detail::local_spacing(requested, feature.center_mps)) {
        const double needed_spacing = feature.width_mps / 3.0;
        const double span = 10.0 * s.u_mps;
        std::size_t n = 8192;
        while (span / (n - 1) > needed_spacing && n < (1u << 18)) n *= 2;
        if (span / (n - 1) > needed_spacing)
            throw numeric_error("velocity feature of width " + std::to_string(feature.width_mps) +
                                " m/s is below the quadrature resolution limit");
        g.escalated = true;
        g.nodes_used = n;
        if (info) *info = g;
        return make_grid(s.u_mps, static_cast<int>(n), GridKind::adaptive_trapezoid);
    }
    if (info) *info = g;
    return requested;
}

// Velocity average of one response at a single probe detuning, guarded.
inline cplx guarded_average(const SchemeConfig& s, const FieldSet& f, ResponseKind kind,
                            double omega1, const VelocityGrid& grid, GuardInfo* info = nullptr) {
    const VelocityGrid use = guarded_grid(s, f, kind, {omega1}, grid, info);
    return velocity_average(use, [&](double v) { return detail::response_value(s, f, kind, omega1, v); });
}

struct ComplexSpectrum {
    std::vector<double> detunings_mhz;  // strictly increasing probe detunings
    std::vector<cplx> values;
    std::string label;
    bool guard_escalated = false;
    std::size_t quadrature_nodes = 0;
};

inline ComplexSpectrum averaged_spectrum(const SchemeConfig& s, const FieldSet& f,
                                         const std::vector<double>& omega1_mhz,
                                         const VelocityGrid& grid, ResponseKind kind) {
    if (omega1_mhz.empty()) throw config_error("averaged_spectrum: empty detuning range");
    for (std::size_t i = 1; i < omega1_mhz.size(); ++i)
        if (!(omega1_mhz[i] > omega1_mhz[i - 1]))
            throw config_error("averaged_spectrum: detunings must be strictly increasing");

    GuardInfo info;
    const std::vector<double> probes = {omega1_mhz.front(),
                                        omega1_mhz[omega1_mhz.size() / 2],
                                        omega1_mhz.back()};
    const VelocityGrid use = guarded_grid(s, f, kind, probes, grid, &info);

    ComplexSpectrum spec;
    spec.detunings_mhz = omega1_mhz;
    spec.values.resize(omega1_mhz.size());
    spec.guard_escalated = info.escalated;
    spec.quadrature_nodes = use.size();
    switch (kind) {
        case ResponseKind::chi1: spec.label = "chi1"; break;
        case ResponseKind::chi4: spec.label = "chi4"; break;
        case ResponseKind::chi4nl: spec.label = "chi4nl"; break;
        case ResponseKind::chi4nl_sq: spec.label = "chi4nl_sq"; break;
    }
    for (std::size_t i = 0; i < omega1_mhz.size(); ++i) {
        const double w = omega1_mhz[i];
        const cplx val =
            velocity_average(use, [&](double v) { return detail::response_value(s, f, kind, w, v); });
        if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
            throw numeric_error("averaged_spectrum: non-finite value at detuning " + std::to_string(w));
        spec.values[i] = val;
    }
    return spec;
}

struct LineMetrics {
    double peak_position_mhz = 0;
    double peak_value = 0;                      // |value| at the interpolated peak
    double hwhm_mhz = 0;
    std::vector<double> secondary_peaks_mhz{};  // other local maxima above 50% of the global one
};

// Peak by quadratic interpolation of |value| around the maximum sample,
// HWHM by linear interpolation of the half-maximum crossings.
inline LineMetrics line_metrics(const ComplexSpectrum& spec) {
    const std::size_t n = spec.values.size();
    if (n < 3) throw numeric_error("line_metrics: need at least 3 samples");
    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(spec.values[i]);
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (mag[i] > mag[imax]) imax = i;
    if (imax == 0 || imax == n - 1)
        throw numeric_error("line_metrics: peak of '" + spec.label + "' lies on the scan boundary");

    // Vertex of the parabola through three neighbouring samples (Newton form).
    auto parabola_vertex = [&](std::size_t i) {
        const double x0 = spec.detunings_mhz[i - 1], x1 = spec.detunings_mhz[i],
                     x2 = spec.detunings_mhz[i + 1];
        const double y0 = mag[i - 1], y1 = mag[i], y2 = mag[i + 1];
        const double c1 = (y1 - y0) / (x1 - x0);
        const double c2 = ((y2 - y1) / (x2 - x1) - c1) / (x2 - x0);
        if (c2 >= 0.0) return std::pair<double, double>(x1, y1);  // flat or non-concave
        const double xq = 0.5 * (x0 + x1 - c1 / c2);
        const double yq = y0 + c1 * (xq - x0) + c2 * (xq - x0) * (xq - x1);
        return std::pair<double, double>(xq, yq);
    };

    LineMetrics m;
    const auto [xpk, ypk] = parabola_vertex(imax);
    m.peak_position_mhz = xpk;
    m.peak_value = ypk;

    const double half = 0.5 * m.peak_value;
    auto cross_left = [&]() {
        for (std::size_t i = imax; i-- > 0;) {
            if (mag[i] <= half) {
                const double t = (half - mag[i]) / (mag[i + 1] - mag[i]);
                return spec.detunings_mhz[i] + t * (spec.detunings_mhz[i + 1] - spec.detunings_mhz[i]);
            }
        }
        throw numeric_error("line_metrics: left half-maximum crossing not inside the scan");
    };
    auto cross_right = [&]() {
        for (std::size_t i = imax + 1; i < n; ++i) {
            if (mag[i] <= half) {
                const double t = (mag[i - 1] - half) / (mag[i - 1] - mag[i]);
                return spec.detunings_mhz[i - 1] + t * (spec.detunings_mhz[i] - spec.detunings_mhz[i - 1]);
            }
        }
        throw numeric_error("line_metrics: right half-maximum crossing not inside the scan");
    };
    const double left = cross_left();
    const double right = cross_right();
    m.hwhm_mhz = 0.5 * (right - left);

    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (i == imax) continue;
        if (mag[i] >= mag[i - 1] && mag[i] > mag[i + 1] && mag[i] > 0.5 * mag[imax]) {
            const auto [xs, ys] = parabola_vertex(i);
            (void)ys;
            m.secondary_peaks_mhz.push_back(xs);
        }
    }
    return m;
}

}  // namespace dfwm

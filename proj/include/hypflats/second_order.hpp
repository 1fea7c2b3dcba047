#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hypflats/moments.hpp"
#include "hypflats/skeleton.hpp"
#include "hypflats/volumes.hpp"

namespace hypflats {

// Parameters for the analytic K-function and pair correlation of the i- and
// j-skeleton fibre processes, in curvature kappa in {-1, 0, 1}.
struct k_params {
    int d = 2;
    int i = 0;
    int j = 0;
    double t = 1.0;
    int kappa = -1;

    void validate() const {
        if (d < 2)
            throw std::invalid_argument("k_params: d must be >= 2");
        if (i < 0 || i >= d || j < 0 || j >= d)
            throw std::invalid_argument("k_params: i, j outside [0,d-1]");
        if (!(t > 0.0))
            throw std::invalid_argument("k_params: t must be positive");
        if (kappa < -1 || kappa > 1)
            throw std::invalid_argument("k_params: kappa must be -1, 0 or 1");
    }

    int m() const { return std::min({d - i, d - j, d - 1}); }
};

// Intensity of the i-skeleton: expected i-volume per unit volume.
inline double intensity_lambda(int d, int i, double t) {
    if (i < 0 || i >= d)
        throw std::invalid_argument("intensity_lambda: i outside [0,d-1]");
    if (t < 0.0)
        throw std::invalid_argument("intensity_lambda: negative intensity");
    const moment_constants mc(d);
    return mc.c_dk(i) * std::pow(t, d - i) / detail::factorial(d - i);
}

namespace detail {

inline double sn_kappa(int kappa, double s) {
    if (kappa == -1)
        return std::sinh(s);
    if (kappa == 0)
        return s;
    return std::sin(s);
}

// int_0^r sn_kappa^n(s) ds in closed form for each curvature
inline double sn_power_integral(int kappa, int n, double r) {
    if (kappa == -1)
        return sinh_power_integral(n, r);
    if (kappa == 0)
        return std::pow(r, n + 1) / (n + 1);
    return sin_power_integral(n, r);
}

} // namespace detail

// K_{ij}(r): expected j-volume within distance r of a typical point of the
// i-skeleton, scaled by the intensities.  Truncating the sum at
// m = min(d-i, d-j, d-1) drops the vanishing n = d summand of the point
// process case i = j = 0.
inline double k_function(const k_params& p, double r) {
    p.validate();
    if (!(r > 0.0))
        throw std::invalid_argument("k_function: r must be positive");
    if (p.kappa == 1 && r >= M_PI)
        throw std::invalid_argument("k_function: r must be < pi when kappa=1");
    const moment_constants mc(p.d);
    const int d = p.d;
    double sum = 0.0;
    for (int n = 0; n <= p.m(); ++n) {
        const double coeff = detail::factorial(n) *
                             detail::binomial(d - p.i, n) *
                             detail::binomial(d - p.j, n) *
                             (mc.omegas[d + 1] * omega(d - n) / omega(d - n + 1)) *
                             std::pow(mc.omegas[d] / (mc.omegas[d + 1] * p.t), n);
        sum += coeff * detail::sn_power_integral(p.kappa, d - n - 1, r);
    }
    return sum;
}

// g_{ij}(r) = K'_{ij}(r) / (omega_d sn_kappa^{d-1}(r)), in closed form.
inline double pair_correlation(const k_params& p, double r) {
    p.validate();
    if (!(r > 0.0))
        throw std::invalid_argument("pair_correlation: r must be positive");
    if (p.kappa == 1 && r >= M_PI)
        throw std::invalid_argument(
            "pair_correlation: r must be < pi when kappa=1");
    const moment_constants mc(p.d);
    const int d = p.d;
    const double sn = detail::sn_kappa(p.kappa, r);
    double sum = 1.0;
    for (int n = 1; n <= p.m(); ++n) {
        sum += detail::factorial(n) * detail::binomial(d - p.i, n) *
               detail::binomial(d - p.j, n) *
               (omega(d - n) / omega(d - n + 1)) *
               std::pow(mc.omegas[d] / mc.omegas[d + 1], n - 1) /
               std::pow(p.t * sn, n);
    }
    return sum;
}

struct k_estimate {
    double r = 0.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
};

// Minus-sampling estimator of K_00 from simulated vertex processes: ordered
// pairs with the first vertex in the observation ball B_w, normalized by
// lambda_0^2 vol(B_w).  Unbiased as long as w + max(r) stays inside the
// simulation radius.
inline std::vector<k_estimate>
empirical_k0(const std::vector<realization>& realizations,
             const std::vector<double>& r_values, double r_window) {
    if (realizations.empty())
        throw std::invalid_argument("empirical_k0: no realizations");
    const process_params& pp = realizations.front().params;
    if (pp.d != 2 && pp.d != 3)
        throw std::invalid_argument("empirical_k0: only d=2 and d=3 supported");
    if (r_values.empty())
        throw std::invalid_argument("empirical_k0: no r values");
    if (!(r_window > 0.0))
        throw std::invalid_argument("empirical_k0: window must be positive");
    double r_max = 0.0;
    for (double r : r_values) {
        if (!(r > 0.0))
            throw std::invalid_argument("empirical_k0: r values must be positive");
        r_max = std::max(r_max, r);
    }
    if (r_window + r_max > pp.r)
        throw std::invalid_argument(
            "empirical_k0: window plus max radius exceeds the simulation "
            "radius; minus-sampling needs r_window + max(r) <= radius");

    const double lambda0 = intensity_lambda(pp.d, 0, pp.t);
    const double norm = lambda0 * lambda0 * ball_volume(pp.d, r_window);
    const double cosh_w = std::cosh(r_window);
    std::vector<double> cosh_r(r_values.size());
    for (std::size_t k = 0; k < r_values.size(); ++k)
        cosh_r[k] = std::cosh(r_values[k]);

    const std::size_t m = realizations.size();
    std::vector<std::vector<double>> per_real(r_values.size(),
                                              std::vector<double>(m, 0.0));
    for (std::size_t rep = 0; rep < m; ++rep) {
        if (realizations[rep].params.d != pp.d ||
            realizations[rep].params.r != pp.r ||
            realizations[rep].params.t != pp.t)
            throw std::invalid_argument(
                "empirical_k0: realizations mix process parameters");
        const std::vector<hpoint> verts = skeleton_vertices(realizations[rep]);
        for (std::size_t a = 0; a < verts.size(); ++a) {
            if (verts[a].v[0] > cosh_w)
                continue; // first point outside the observation window
            for (std::size_t b = 0; b < verts.size(); ++b) {
                if (b == a)
                    continue;
                const double ch = -lorentz_inner(verts[a].v, verts[b].v);
                for (std::size_t k = 0; k < r_values.size(); ++k)
                    if (ch <= cosh_r[k])
                        per_real[k][rep] += 1.0;
            }
        }
    }

    std::vector<k_estimate> out(r_values.size());
    for (std::size_t k = 0; k < r_values.size(); ++k) {
        double mean = 0.0;
        for (double v : per_real[k])
            mean += v;
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (double v : per_real[k])
            var += (v - mean) * (v - mean);
        var /= static_cast<double>(m) * (m > 1 ? (m - 1) : 1);
        out[k].r = r_values[k];
        out[k].estimate = mean / norm;
        out[k].stderr_ = std::sqrt(var) / norm;
    }
    return out;
}

} // namespace hypflats

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hypflats/geometry.hpp"
#include "hypflats/rng.hpp"
#include "hypflats/volumes.hpp"

namespace hypflats {

struct process_params {
    int d = 2;
    double r = 2.0;       // ball radius
    double t = 1.0;       // intensity
    std::uint64_t seed = 0;

    void validate() const {
        if (d < 2 || d > 8)
            throw std::invalid_argument("process_params: d must be in [2,8]");
        if (!(r > 0.0) || r > 15.0)
            throw std::invalid_argument("process_params: r must be in (0,15]");
        if (!(t > 0.0))
            throw std::invalid_argument("process_params: t must be positive");
    }
};

struct realization {
    process_params params;
    std::vector<hyperplane> hyperplanes;
    std::uint64_t stream_id = 0;
};

// mu_{d-1}-measure of hyperplanes meeting B_r: the radial density of the
// invariant measure is cosh^{d-1}(s) and both half-lines of each direction
// contribute, giving 2 * int_0^r cosh^{d-1}.
inline double hitting_mass(int d, double r) {
    if (d < 2)
        throw std::invalid_argument("hitting_mass: d must be >= 2");
    if (r < 0.0)
        throw std::invalid_argument("hitting_mass: negative radius");
    return 2.0 * cosh_power_integral(d - 1, r);
}

namespace detail {

// Antiderivative of cosh^{d-1}(s) written in x = sinh(s) for even d, where
// cosh^{d-1}(s) ds = (1 + x^2)^{(d-2)/2} dx is a polynomial:
//   A(x) = sum_m binom((d-2)/2, m) x^{2m+1} / (2m+1).
inline double sinh_poly_antideriv(int d, double x) {
    const int p = (d - 2) / 2;
    double binom = 1.0;
    double acc = 0.0;
    double xpow = x;
    const double x2 = x * x;
    for (int m = 0; m <= p; ++m) {
        acc += binom * xpow / (2 * m + 1);
        binom *= static_cast<double>(p - m) / (m + 1);
        xpow *= x2;
    }
    return acc;
}

inline double sinh_poly_deriv(int d, double x) {
    const int p = (d - 2) / 2;
    double v = 1.0 + x * x;
    double acc = 1.0;
    for (int m = 0; m < p; ++m)
        acc *= v;
    return acc;
}

} // namespace detail

// Inverse of the normalized radial CDF F(s) = int_0^s cosh^{d-1} / int_0^r.
// d=2 and d=4 invert in closed form; other dimensions use Newton iteration
// started at the right endpoint, which converges monotonically because the
// antiderivative is convex and increasing.  Accuracy is well inside the
// |F(s) - u| <= 1e-12 contract.
inline double sample_distance(int d, double r, double u) {
    if (u < 0.0 || u > 1.0)
        throw std::invalid_argument("sample_distance: u outside [0,1]");
    if (d < 2)
        throw std::invalid_argument("sample_distance: d must be >= 2");
    if (u == 0.0)
        return 0.0;
    if (u == 1.0)
        return r;

    if (d == 2)
        return std::asinh(u * std::sinh(r));

    if (d == 4) {
        // solve x + x^3/3 = c via x = 2 sinh(asinh(3c/2)/3)
        const double xr = std::sinh(r);
        const double c = u * (xr + xr * xr * xr / 3.0);
        const double x = 2.0 * std::sinh(std::asinh(1.5 * c) / 3.0);
        return std::asinh(x);
    }

    if (d % 2 == 0) {
        // polynomial antiderivative in x = sinh(s); no transcendentals inside
        // the Newton loop
        const double xr = std::sinh(r);
        const double c = u * detail::sinh_poly_antideriv(d, xr);
        double x = xr;
        for (int it = 0; it < 200; ++it) {
            const double g = detail::sinh_poly_antideriv(d, x) - c;
            const double step = g / detail::sinh_poly_deriv(d, x);
            x -= step;
            if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(x)))
                break;
        }
        if (x < 0.0)
            x = 0.0;
        return std::asinh(x);
    }

    // odd d: cosh^{d-1} has even power, integrate termwise via
    // (e^s + e^{-s})^{d-1}/2^{d-1}
    const int n = d - 1;
    const double scale = std::pow(0.5, n);
    auto antideriv = [&](double s) {
        double binom = 1.0; // binom(n, j)
        double acc = 0.0;
        for (int j = 0; j < n / 2; ++j) {
            const int freq = n - 2 * j;
            acc += 2.0 * binom * std::sinh(freq * s) / freq;
            binom *= static_cast<double>(n - j) / (j + 1);
        }
        acc += binom * s; // central term binom(n, n/2) * s
        return scale * acc;
    };
    const double c = u * antideriv(r);
    double s = r;
    for (int it = 0; it < 200; ++it) {
        const double g = antideriv(s) - c;
        const double step = g / std::pow(std::cosh(s), n);
        s -= step;
        if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(s)))
            break;
    }
    if (s < 0.0)
        s = 0.0;
    return s;
}

// Draw one realization of the process restricted to hyperplanes hitting B_r.
// Count is Poisson(t * hitting_mass); each hyperplane gets a radial distance
// from the normalized hitting measure and an independent uniform direction.
// Fully determined by (params.seed, stream_id).
inline realization sample_realization(const process_params& params,
                                      std::uint64_t stream_id) {
    params.validate();
    rng_stream rng(params.seed, stream_id);
    const double mass = hitting_mass(params.d, params.r);
    const long n = rng.poisson(params.t * mass);

    realization real;
    real.params = params;
    real.stream_id = stream_id;
    real.hyperplanes.reserve(static_cast<std::size_t>(n));
    std::vector<double> dir(params.d);
    for (long k = 0; k < n; ++k) {
        const double s = sample_distance(params.d, params.r, rng.uniform());
        rng.direction(params.d, dir.data());
        real.hyperplanes.push_back(hyperplane_at(dir, s));
    }
    return real;
}

// Streaming sum of f(s) over the hyperplane distances of one realization,
// without materializing directions or normals.  The top-dimensional skeleton
// functional F^{(d-1)} depends on distances only, so large-count campaigns
// use this path.
template <class F>
double sum_over_distances(const process_params& params, std::uint64_t stream_id,
                          const F& f) {
    params.validate();
    rng_stream rng(params.seed, stream_id);
    const double mass = hitting_mass(params.d, params.r);
    const long n = rng.poisson(params.t * mass);
    double sum = 0.0, comp = 0.0;
    for (long k = 0; k < n; ++k) {
        const double s = sample_distance(params.d, params.r, rng.uniform());
        const double y = f(s) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace hypflats

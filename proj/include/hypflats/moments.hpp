#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypflats/quadrature.hpp"
#include "hypflats/volumes.hpp"

namespace hypflats {

using dmatrix = std::vector<std::vector<double>>;

namespace detail {

inline double binomial(int n, int k) {
    if (k < 0 || k > n)
        return 0.0;
    double acc = 1.0;
    for (int m = 0; m < k; ++m)
        acc *= static_cast<double>(n - m) / (m + 1);
    return acc;
}

inline double factorial(int n) {
    double acc = 1.0;
    for (int m = 2; m <= n; ++m)
        acc *= m;
    return acc;
}

} // namespace detail

// Cached sphere surface measures and the constant families entering the
// moment formulas.
struct moment_constants {
    int d;
    std::vector<double> omegas; // omega_0 .. omega_{d+1}

    explicit moment_constants(int dim) : d(dim) {
        if (d < 2)
            throw std::invalid_argument("moment_constants: d must be >= 2");
        omegas.resize(d + 2);
        for (int k = 0; k <= d + 1; ++k)
            omegas[k] = omega(k);
    }

    // prefactor of the i-skeleton intensity: c(d,k) = omega_{k+1}/omega_{d+1}
    // * (omega_{d+1}/omega_d)^{d-k}
    double c_dk(int k) const {
        const double ratio = omegas[d + 1] / omegas[d];
        return omegas[k + 1] / omegas[d + 1] * std::pow(ratio, d - k);
    }

    // kernel coefficient c(i,n,d) = binom(d-i,n)/(d-i)! * omega_{i+1} /
    // omega_{d-n+1} * (omega_{d+1}/omega_d)^{d-n-i}; zero when n > d-i
    double c_ind(int i, int n) const {
        const double b = detail::binomial(d - i, n);
        if (b == 0.0)
            return 0.0;
        const double ratio = omegas[d + 1] / omegas[d];
        return b / detail::factorial(d - i) * omegas[i + 1] /
               omegas[d - n + 1] * std::pow(ratio, d - n - i);
    }

    // covariance coefficient c(d,n,i,j) = c(d,d-n) c(i,n,d) c(j,n,d)
    double c_dnij(int n, int i, int j) const {
        return c_dk(d - n) * c_ind(i, n) * c_ind(j, n);
    }
};

inline moment_constants constants(int d) { return moment_constants(d); }

// E F^{(i)} for intensity t in a window of volume vol_W.
inline double expectation(int d, int i, double t, double vol_w) {
    if (i < 0 || i >= d)
        throw std::invalid_argument("expectation: i outside [0,d-1]");
    if (t < 0.0 || vol_w < 0.0)
        throw std::invalid_argument("expectation: negative t or volume");
    const moment_constants mc(d);
    return mc.c_dk(i) * std::pow(t, d - i) / detail::factorial(d - i) * vol_w;
}

struct covariance_report {
    int d, i, j;
    double t, r;
    std::vector<double> terms;       // n = 1 .. min(d-i, d-j)
    std::vector<double> quad_errors; // absolute quadrature error per term
    double total = 0.0;
};

namespace detail {

// One covariance term before the n!, t-power and constant factors:
// int_0^r cosh^{d-n}(s) sinh^{n-1}(s) slice(d-n, s, r)^2 ds, with an
// optional constant multiplier applied inside the integrand so that scaled
// variants avoid overflow for large d*r.
inline quad_result covariance_kernel(int d, int n, double r, double scale) {
    auto f = [&](double s) {
        const double slice = ball_slice_volume(d - n, s, r);
        double v = scale * slice * slice;
        for (int k = 0; k < d - n; ++k)
            v *= std::cosh(s);
        for (int k = 0; k < n - 1; ++k)
            v *= std::sinh(s);
        return v;
    };
    return integrate(f, 0.0, r, 1e-11, 0.0);
}

inline covariance_report covariance_impl(int d, int i, int j, double t,
                                         double r, double scale) {
    if (i < 0 || i >= d || j < 0 || j >= d)
        throw std::invalid_argument("covariance: i, j outside [0,d-1]");
    if (!(t > 0.0) || !(r >= 0.0))
        throw std::invalid_argument("covariance: need t > 0 and r >= 0");
    const moment_constants mc(d);
    covariance_report rep;
    rep.d = d;
    rep.i = i;
    rep.j = j;
    rep.t = t;
    rep.r = r;
    const int nmax = std::min(d - i, d - j);
    for (int n = 1; n <= nmax; ++n) {
        const quad_result q = covariance_kernel(d, n, r, scale);
        if (!q.converged || q.abs_err > 1e-9 * std::fabs(q.value) + 1e-300)
            throw std::runtime_error(
                "covariance: quadrature failed for n=" + std::to_string(n) +
                ", achieved absolute error " + std::to_string(q.abs_err));
        const double factor = factorial(n) * std::pow(t, 2 * d - i - j - n) *
                              mc.c_dnij(n, i, j) * mc.omegas[n];
        rep.terms.push_back(factor * q.value);
        rep.quad_errors.push_back(factor * q.abs_err);
        rep.total += factor * q.value;
    }
    return rep;
}

} // namespace detail

// Cov(F^{(i)}, F^{(j)}) in B_r, reported with its per-n decomposition.
inline covariance_report covariance(int d, int i, int j, double t, double r) {
    return detail::covariance_impl(d, i, j, t, r, 1.0);
}

inline double variance(int d, int i, double t, double r) {
    return covariance(d, i, i, t, r).total;
}

// Covariance of the window-normalized functionals: divide each component by
// e^{r/2} (d=2), sqrt(r) e^r (d=3) or e^{r(d-2)} (d >= 4).  The scale is
// folded into the integrand so that large (d, r) do not overflow.
inline double scaled_covariance(int d, int i, int j, double t, double r) {
    double scale;
    if (d == 2)
        scale = std::exp(-r);
    else if (d == 3)
        scale = 1.0 / (r * std::exp(2.0 * r));
    else
        scale = std::exp(-2.0 * (d - 2) * r);
    return detail::covariance_impl(d, i, j, t, r, scale).total;
}

// mu_k-integral of the l-th power of the slice volume over all k-flats:
// omega_{d-k} int_0^r cosh^k(s) sinh^{d-1-k}(s) slice(k, s, r)^l ds.
inline double flat_integral(int k, int l, int d, double r) {
    if (k < 0 || k >= d)
        throw std::invalid_argument("flat_integral: k outside [0,d-1]");
    if (l < 0)
        throw std::invalid_argument("flat_integral: negative power");
    if (r < 0.0)
        throw std::invalid_argument("flat_integral: negative radius");
    auto f = [&](double s) {
        double v = 1.0;
        for (int m = 0; m < k; ++m)
            v *= std::cosh(s);
        for (int m = 0; m < d - 1 - k; ++m)
            v *= std::sinh(s);
        if (l > 0) {
            const double slice = ball_slice_volume(k, s, r);
            for (int m = 0; m < l; ++m)
                v *= slice;
        }
        return v;
    };
    const quad_result q = integrate(f, 0.0, r, 1e-11, 0.0);
    if (!q.converged || q.abs_err > 1e-9 * std::fabs(q.value) + 1e-300)
        throw std::runtime_error(
            "flat_integral: quadrature failed, achieved absolute error " +
            std::to_string(q.abs_err));
    return omega(d - k) * q.value;
}

// Growth order of flat_integral(k, l, d, r) as r grows, by comparing
// l(k-1) with d-1.
inline double growth_g(int k, int l, int d, double r) {
    const int lhs = l * (k - 1);
    if (lhs < d - 1)
        return std::exp(r * (d - 1));
    if (lhs == d - 1)
        return r * std::exp(r * (d - 1));
    return std::exp(r * lhs);
}

// a = int_0^infty e^{-s} arcosh^2(e^s) ds = 4 * Catalan.  The tail beyond
// s = 40 is below e^{-40}(40 + log 2)^2 ~ 7e-15, so the finite part carries
// the full double precision.
inline double catalan_a() {
    auto f = [](double s) {
        const double u = std::acosh(std::exp(s));
        return std::exp(-s) * u * u;
    };
    const quad_result q = integrate(f, 0.0, 40.0, 1e-13, 1e-15, 20000);
    if (!q.converged)
        throw std::runtime_error(
            "catalan_a: quadrature failed, achieved absolute error " +
            std::to_string(q.abs_err));
    return q.value;
}

// Asymptotic covariance matrix of the r-normalized functional vector.
// d=2 is full rank with det = 4 t^3 a; d=3 and d>=4 have rank one.
// The (0,0) entry keeps the full weight of the point-count pair term
// 2 t^2 c(2,2,0,0) omega_2 / 2 = t^2: the scalar-product formula carries
// omega_n, and the n=2 direction mass in the plane is omega_2 = 2 pi.  This
// is forced by the expectation identity E F^(0) = 2 t^2 (cosh r - 1), which
// pins the pair measure of intersecting lines to 4 (cosh r - 1).
inline dmatrix asymptotic_covariance(int d, double t) {
    if (d < 2)
        throw std::invalid_argument("asymptotic_covariance: d must be >= 2");
    if (!(t > 0.0))
        throw std::invalid_argument("asymptotic_covariance: t must be positive");
    dmatrix m(d, std::vector<double>(d, 0.0));
    const double pi = 3.14159265358979323846264338327950288;
    if (d == 2) {
        const double a = catalan_a();
        m[0][0] = 16.0 / (pi * pi) * t * t * t * a + t * t;
        m[0][1] = m[1][0] = 8.0 / pi * t * t * a;
        m[1][1] = 4.0 * t * a;
        return m;
    }
    const moment_constants mc(d);
    double common;
    if (d == 3)
        common = 2.0 * pi * pi;
    else
        common = mc.omegas[d - 1] * mc.omegas[d] /
                 (std::pow(4.0, d - 2) * (d - 3) * (d - 2));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m[i][j] = common * mc.c_ind(i, 1) * mc.c_ind(j, 1) *
                      std::pow(t, 2 * d - 1 - i - j);
    return m;
}

// Asymptotic covariance matrix of the t-normalized functional vector in B_r:
// tau^{i,j} = c(d,1,i,j) omega_1 int_0^r cosh^{d-1}(s) slice(d-1, s, r)^2 ds,
// the n=1 covariance coefficient, independent of t.  With the check enabled,
// verifies that t^{-(2d-i-j-1)} Cov approaches tau as t grows.
inline dmatrix tau_w(int d, bool t_scaling_check, double r) {
    if (d < 2)
        throw std::invalid_argument("tau_w: d must be >= 2");
    if (r < 0.0)
        throw std::invalid_argument("tau_w: negative radius");
    const moment_constants mc(d);
    const double base = flat_integral(d - 1, 2, d, r);
    dmatrix m(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m[i][j] = mc.c_dnij(1, i, j) * base;

    if (t_scaling_check && r > 0.0) {
        // the n>=2 terms die off like 1/t, so the scaled error at t=100
        // must be well below the one at t=10
        for (int i = 0; i < d; ++i) {
            const int p = 2 * d - 2 * i - 1;
            const double e10 =
                std::fabs(covariance(d, i, i, 10.0, r).total /
                              std::pow(10.0, p) -
                          m[i][i]);
            const double e100 =
                std::fabs(covariance(d, i, i, 100.0, r).total /
                              std::pow(100.0, p) -
                          m[i][i]);
            if (e100 > 0.2 * e10 + 1e-12 * m[i][i])
                throw std::runtime_error(
                    "tau_w: covariance does not approach the t-asymptotic "
                    "limit at the 1/t rate");
        }
    }
    return m;
}

} // namespace hypflats

#pragma once

#include <cmath>
#include <stdexcept>

namespace hypflats {

// Surface content of the unit sphere S^{k-1} in R^k:
//   omega_k = 2 pi^{k/2} / Gamma(k/2),  omega_0 = 0 by the Gamma pole.
// Computed by the exact recurrence omega_{k+2} = 2 pi omega_k / k, which
// avoids Gamma evaluations and keeps integer-argument values exact products.
inline double omega(int k) {
    if (k < 0)
        throw std::invalid_argument("omega: negative index");
    if (k == 0)
        return 0.0;
    const double two_pi = 6.283185307179586476925286766559;
    double w = (k % 2 == 1) ? 2.0 : two_pi;
    for (int j = (k % 2 == 1) ? 1 : 2; j + 2 <= k; j += 2)
        w *= two_pi / j;
    return w;
}

// int_0^x sinh^n(s) ds via the reduction
//   S_n = sinh^{n-1}(x) cosh(x)/n - (n-1)/n S_{n-2},  S_0 = x, S_1 = cosh x - 1.
// The reduction subtracts near-equal terms when x is small (the value scales
// like x^{n+1} while the noise floor stays near ulp(x)), so small arguments
// switch to the substitution w = sinh s:
//   S_n = int_0^{sinh x} w^n (1+w^2)^{-1/2} dw
//       = sum_m (-1)^m ((2m-1)!!/(2m)!!) sinh(x)^{n+2m+1} / (n+2m+1),
// an alternating series with geometric ratio sinh^2(x) < 1.
inline double sinh_power_integral(int n, double x) {
    if (n < 0)
        throw std::invalid_argument("sinh_power_integral: negative power");
    if (n == 0)
        return x;
    if (x < 0.5) {
        const double w2 = std::sinh(x) * std::sinh(x);
        double coef = std::pow(std::sinh(x), n + 1); // signed (2m-1)!!/(2m)!! w^{n+2m+1}
        double sum = 0.0;
        for (int m = 0; m < 128; ++m) {
            const double term = coef / (n + 2 * m + 1);
            sum += term;
            if (std::fabs(term) <= 1e-17 * std::fabs(sum))
                break;
            coef *= -w2 * (2 * m + 1) / (2.0 * m + 2.0);
        }
        return sum;
    }
    const double sh = std::sinh(x), ch = std::cosh(x);
    double cur = (n % 2 == 0) ? x : ch - 1.0; // S_0 or S_1
    for (int k = (n % 2 == 0) ? 2 : 3; k <= n; k += 2)
        cur = std::pow(sh, k - 1) * ch / k - (k - 1.0) / k * cur;
    return cur;
}

// int_0^x cosh^n(s) ds via C_n = cosh^{n-1}(x) sinh(x)/n + (n-1)/n C_{n-2},
// C_0 = x, C_1 = sinh x.
inline double cosh_power_integral(int n, double x) {
    if (n < 0)
        throw std::invalid_argument("cosh_power_integral: negative power");
    if (n == 0)
        return x;
    const double sh = std::sinh(x), ch = std::cosh(x);
    double cur = (n % 2 == 0) ? x : sh; // C_0 or C_1
    for (int k = (n % 2 == 0) ? 2 : 3; k <= n; k += 2)
        cur = std::pow(ch, k - 1) * sh / k + (k - 1.0) / k * cur;
    return cur;
}

// int_0^x sin^n(s) ds via S_n = -sin^{n-1}(x) cos(x)/n + (n-1)/n S_{n-2},
// S_0 = x, S_1 = 1 - cos x.  Used for the spherical-curvature K-function.
inline double sin_power_integral(int n, double x) {
    if (n < 0)
        throw std::invalid_argument("sin_power_integral: negative power");
    if (n == 0)
        return x;
    const double sn = std::sin(x), cs = std::cos(x);
    double cur = (n % 2 == 0) ? x : 1.0 - cs; // S_0 or S_1
    for (int k = (n % 2 == 0) ? 2 : 3; k <= n; k += 2)
        cur = -std::pow(sn, k - 1) * cs / k + (k - 1.0) / k * cur;
    return cur;
}

// Volume of the geodesic ball B_r in H^d: omega_d int_0^r sinh^{d-1}.
inline double ball_volume(int d, double r) {
    if (d < 2)
        throw std::invalid_argument("ball_volume: d must be >= 2");
    if (r < 0.0)
        throw std::invalid_argument("ball_volume: negative radius");
    return omega(d) * sinh_power_integral(d - 1, r);
}

// i-volume of the intersection of B_r with an i-flat at distance s from the
// ball center.  The section is an i-dimensional hyperbolic ball of radius
// rho = arcosh(cosh r / cosh s); for i = 0 the flat is a point and the
// "volume" is the indicator of s <= r.
inline double ball_slice_volume(int i, double s, double r) {
    if (i < 0 || s < 0.0 || r < 0.0)
        throw std::invalid_argument("ball_slice_volume: negative argument");
    if (s > r)
        return 0.0;
    if (i == 0)
        return 1.0;
    // clamp: roundoff can push the ratio a hair below 1 when s ~ r, where the
    // slice volume vanishes anyway.
    const double ratio = std::max(1.0, std::cosh(r) / std::cosh(s));
    if (i == 2)
        return 2.0 * M_PI * (ratio - 1.0);
    const double rho = std::acosh(ratio);
    if (i == 1)
        return 2.0 * rho;
    return omega(i) * sinh_power_integral(i - 1, rho);
}

} // namespace hypflats

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hypflats/volumes.hpp"

namespace hypflats {

// Hyperboloid model of H^d inside R^{d+1} with the Minkowski form
//   <u,v> = -u_0 v_0 + u_1 v_1 + ... + u_d v_d.
// Points satisfy <x,x> = -1, x_0 > 0; hyperplane normals are unit spacelike
// vectors, and cosh of the distance between points is -<x,y>.

using lorentz_vector = std::vector<double>;

inline double lorentz_inner(const lorentz_vector& u, const lorentz_vector& v) {
    if (u.size() != v.size())
        throw std::invalid_argument("lorentz_inner: dimension mismatch");
    double s = u[1] * v[1];
    for (std::size_t k = 2; k < u.size(); ++k)
        s += u[k] * v[k];
    return s - u[0] * v[0];
}

struct hpoint {
    lorentz_vector v;
};

inline hpoint origin_point(int d) {
    lorentz_vector v(d + 1, 0.0);
    v[0] = 1.0;
    return {v};
}

inline hpoint make_hpoint(const lorentz_vector& v) {
    // the round-off of <v,v> scales with v0^2, so the sheet test must too
    const double tol = 1e-10 * std::max(1.0, v[0] * v[0]);
    if (std::fabs(lorentz_inner(v, v) + 1.0) > tol || v[0] <= 0.0)
        throw std::invalid_argument("make_hpoint: not on the upper hyperboloid sheet");
    return {v};
}

inline double dist(const hpoint& x, const hpoint& y) {
    // roundoff can push -<x,y> slightly below 1 for nearly equal points
    return std::acosh(std::max(1.0, -lorentz_inner(x.v, y.v)));
}

struct hyperplane {
    lorentz_vector normal;   // (sinh s, cosh s * dir), unit spacelike
    std::vector<double> dir; // unit vector in R^d
    double s = 0.0;          // distance of the hyperplane to the origin
};

inline hyperplane hyperplane_at(const std::vector<double>& dir, double s) {
    if (s < 0.0)
        throw std::invalid_argument("hyperplane_at: negative distance");
    double norm2 = 0.0;
    for (double c : dir)
        norm2 += c * c;
    if (std::fabs(norm2 - 1.0) > 1e-10)
        throw std::invalid_argument("hyperplane_at: direction is not unit length");
    hyperplane h;
    h.dir = dir;
    h.s = s;
    h.normal.resize(dir.size() + 1);
    const double sh = std::sinh(s), ch = std::cosh(s);
    h.normal[0] = sh;
    for (std::size_t k = 0; k < dir.size(); ++k)
        h.normal[k + 1] = ch * dir[k];
    return h;
}

struct flat {
    std::vector<lorentz_vector> normals;
    int dim = 0;                // d - (number of normals)
    double dist_origin = 0.0;
    std::vector<double> gram;   // row-major j x j, <n_a, n_b>
    bool degenerate = false;
};

namespace detail {

// In-place Cholesky of a row-major symmetric matrix.  Returns false when a
// pivot is non-positive or when det(G) <= 1e-10 * prod(diag), the threshold
// that declares a sampled configuration degenerate (an almost-sure-null
// event, so it only guards roundoff).
inline bool cholesky(double* g, int j) {
    double diag_prod = 1.0;
    for (int a = 0; a < j; ++a)
        diag_prod *= g[a * j + a];
    double det = 1.0;
    for (int a = 0; a < j; ++a) {
        for (int b = 0; b <= a; ++b) {
            double sum = g[a * j + b];
            for (int k = 0; k < b; ++k)
                sum -= g[a * j + k] * g[b * j + k];
            if (a == b) {
                if (sum <= 0.0)
                    return false;
                g[a * j + a] = std::sqrt(sum);
                det *= sum;
            } else {
                g[a * j + b] = sum / g[b * j + b];
            }
        }
    }
    return det > 1e-10 * diag_prod;
}

// Solve G y = c given the Cholesky factor L stored in the lower triangle.
inline void cholesky_solve(const double* l, int j, const double* c,
                           double* y) {
    for (int a = 0; a < j; ++a) {
        double sum = c[a];
        for (int k = 0; k < a; ++k)
            sum -= l[a * j + k] * y[k];
        y[a] = sum / l[a * j + a];
    }
    for (int a = j - 1; a >= 0; --a) {
        double sum = y[a];
        for (int k = a + 1; k < j; ++k)
            sum -= l[k * j + a] * y[k];
        y[a] = sum / l[a * j + a];
    }
}

} // namespace detail

// Intersection flat of j hyperplanes.  The span of the normals must be
// spacelike (Gram positive definite) for the intersection with H^d to be a
// (d-j)-plane; the distance from the origin then follows from projecting the
// origin onto that span: cosh(dist) = sqrt(1 + c^T G^{-1} c), c_a = <p, n_a>.
inline flat flat_from_normals(const std::vector<hyperplane>& hs) {
    if (hs.empty())
        throw std::invalid_argument("flat_from_normals: no hyperplanes");
    const int d = static_cast<int>(hs[0].normal.size()) - 1;
    const int j = static_cast<int>(hs.size());
    if (j > d)
        throw std::invalid_argument("flat_from_normals: more hyperplanes than dimensions");

    flat f;
    f.dim = d - j;
    f.normals.reserve(j);
    for (const auto& h : hs)
        f.normals.push_back(h.normal);

    f.gram.assign(static_cast<std::size_t>(j) * j, 0.0);
    for (int a = 0; a < j; ++a)
        for (int b = 0; b <= a; ++b) {
            const double g = lorentz_inner(hs[a].normal, hs[b].normal);
            f.gram[a * j + b] = g;
            f.gram[b * j + a] = g;
        }

    std::vector<double> chol = f.gram;
    if (!detail::cholesky(chol.data(), j)) {
        f.degenerate = true;
        return f;
    }

    std::vector<double> c(j), y(j);
    for (int a = 0; a < j; ++a)
        c[a] = -hs[a].normal[0]; // <p, n_a> with p the origin
    detail::cholesky_solve(chol.data(), j, c.data(), y.data());
    double q = 0.0;
    for (int a = 0; a < j; ++a)
        q += c[a] * y[a];
    f.dist_origin = std::acosh(std::sqrt(1.0 + std::max(0.0, q)));
    return f;
}

// Projection to the Poincare disc/ball: x -> (x_1..x_d)/(1 + x_0).
inline std::vector<double> to_poincare(const hpoint& x) {
    std::vector<double> out(x.v.size() - 1);
    const double denom = 1.0 + x.v[0];
    for (std::size_t k = 1; k < x.v.size(); ++k)
        out[k - 1] = x.v[k] / denom;
    return out;
}

} // namespace hypflats

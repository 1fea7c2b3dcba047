#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypflats/geometry.hpp"
#include "hypflats/process.hpp"
#include "hypflats/volumes.hpp"

namespace hypflats {

struct skeleton_diagnostics {
    long long subsets = 0;    // non-trivial subsets evaluated
    long long degenerate = 0; // skipped because the Gram matrix was singular
};

namespace detail {

inline double binomial_count(long n, int j) {
    double acc = 1.0;
    for (int k = 0; k < j; ++k)
        acc *= static_cast<double>(n - k) / (k + 1);
    return acc;
}

inline void check_work_guard(long n, int j) {
    const double work = binomial_count(n, j);
    if (work > 1e8)
        throw std::runtime_error(
            "skeleton: " + std::to_string(n) + " choose " + std::to_string(j) +
            " subset evaluations exceed the 1e8 work guard; reduce t or r");
}

// Two-hyperplane intersection algebra in any dimension, in terms of the
// radial distances and the direction dot product.  With unit normals the
// Gram matrix is [[1,g],[g,1]], c = (sinh s_a, sinh s_b), and
// cosh^2(dist) - 1 = q = (c_a^2 + c_b^2 - 2 g c_a c_b) / (1 - g^2).
// Degeneracy matches the Cholesky rule: det = 1 - g^2 <= 1e-10.
struct pair_kernel {
    double g, det;

    pair_kernel(double sh_a, double ch_a, double sh_b, double ch_b,
                double udot) {
        g = ch_a * ch_b * udot - sh_a * sh_b;
        det = 1.0 - g * g;
    }
    bool degenerate() const { return det <= 1e-10; }
    double q(double sh_a, double sh_b) const {
        return (sh_a * sh_a + sh_b * sh_b - 2.0 * g * sh_a * sh_b) / det;
    }
};

// Precomputed per-hyperplane data for the d=2 pair sweep.
struct planar_cache {
    std::vector<double> sh, ch, ux, uy;

    explicit planar_cache(const realization& real) {
        const std::size_t n = real.hyperplanes.size();
        sh.resize(n);
        ch.resize(n);
        ux.resize(n);
        uy.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const hyperplane& h = real.hyperplanes[k];
            sh[k] = std::sinh(h.s);
            ch[k] = std::cosh(h.s);
            ux[k] = h.dir[0];
            uy[k] = h.dir[1];
        }
    }
};

// Count of pairwise intersection points inside B_r for a planar realization.
// This is the hot loop of the d=2 vertex campaigns, so it stays free of
// allocations and square roots.
inline double planar_vertex_count(const planar_cache& pc, double r,
                                  skeleton_diagnostics* diag) {
    const double sinh2_r = std::sinh(r) * std::sinh(r);
    const std::size_t n = pc.sh.size();
    double count = 0.0;
    long long degen = 0;
    for (std::size_t a = 0; a + 1 < n; ++a) {
        const double sha = pc.sh[a], cha = pc.ch[a];
        const double uxa = pc.ux[a], uya = pc.uy[a];
        for (std::size_t b = a + 1; b < n; ++b) {
            const pair_kernel pk(sha, cha, pc.sh[b], pc.ch[b],
                                 uxa * pc.ux[b] + uya * pc.uy[b]);
            if (pk.degenerate()) {
                ++degen;
                continue;
            }
            if (pk.q(sha, pc.sh[b]) <= sinh2_r)
                count += 1.0;
        }
    }
    if (diag) {
        diag->subsets += static_cast<long long>(n) * (n - 1) / 2;
        diag->degenerate += degen;
    }
    return count;
}

// Visit every non-degenerate j-subset whose intersection flat meets B_r,
// passing the subset indices and the flat's distance from the origin.
// Combinations are enumerated in lexicographic order so the summation order
// is deterministic.
template <class Visit>
void sweep_flats(const realization& real, int j, skeleton_diagnostics* diag,
                 const Visit& visit) {
    const long n = static_cast<long>(real.hyperplanes.size());
    const double r = real.params.r;
    if (n < j)
        return;
    int idx[8];
    for (int k = 0; k < j; ++k)
        idx[k] = k;
    double gram[64], chol[64], c[8], y[8];
    for (;;) {
        for (int a = 0; a < j; ++a) {
            const lorentz_vector& na = real.hyperplanes[idx[a]].normal;
            c[a] = -na[0];
            for (int b = 0; b <= a; ++b) {
                const double g =
                    lorentz_inner(na, real.hyperplanes[idx[b]].normal);
                gram[a * j + b] = g;
                gram[b * j + a] = g;
            }
        }
        for (int k = 0; k < j * j; ++k)
            chol[k] = gram[k];
        if (diag)
            ++diag->subsets;
        if (!detail::cholesky(chol, j)) {
            if (diag)
                ++diag->degenerate;
        } else {
            detail::cholesky_solve(chol, j, c, y);
            double q = 0.0;
            for (int a = 0; a < j; ++a)
                q += c[a] * y[a];
            const double dist =
                std::acosh(std::sqrt(1.0 + std::max(0.0, q)));
            if (dist <= r)
                visit(idx, dist);
        }
        // advance the combination
        int k = j - 1;
        while (k >= 0 && idx[k] == n - j + k)
            --k;
        if (k < 0)
            break;
        ++idx[k];
        for (int m = k + 1; m < j; ++m)
            idx[m] = idx[m - 1] + 1;
    }
}

// F^{(d-j)} restricted to subsets of size j, shared by skeleton_functional
// and all_functionals so the two always agree exactly.
inline double functional_for_size(const realization& real, int j,
                                  skeleton_diagnostics* diag) {
    const int d = real.params.d;
    const double r = real.params.r;
    const int i = d - j;

    if (j == 1) {
        // single hyperplanes: the slice volume depends on the distance only
        double sum = 0.0, comp = 0.0;
        for (const hyperplane& h : real.hyperplanes) {
            const double y = ball_slice_volume(i, h.s, r) - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        if (diag)
            diag->subsets += static_cast<long long>(real.hyperplanes.size());
        return sum;
    }

    if (d == 2 && j == 2)
        return planar_vertex_count(planar_cache(real), r, diag);

    double sum = 0.0, comp = 0.0;
    sweep_flats(real, j, diag, [&](const int*, double dist) {
        const double y = ball_slice_volume(i, dist, r) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    });
    return sum;
}

} // namespace detail

// Total i-dimensional volume of the i-skeleton inside B_r: the sum over
// unordered (d-i)-subsets of hyperplanes of the slice volume of their
// intersection flat (the ordered version divided by (d-i)!).
inline double skeleton_functional(const realization& real, int i,
                                  skeleton_diagnostics* diag = nullptr) {
    const int d = real.params.d;
    if (i < 0 || i >= d)
        throw std::invalid_argument("skeleton_functional: i outside [0,d-1]");
    const int j = d - i;
    detail::check_work_guard(static_cast<long>(real.hyperplanes.size()), j);
    return detail::functional_for_size(real, j, diag);
}

// All functionals (F^{(0)}, ..., F^{(d-1)}) in one pass over subset sizes.
inline std::vector<double> all_functionals(const realization& real,
                                           skeleton_diagnostics* diag = nullptr) {
    const int d = real.params.d;
    const long n = static_cast<long>(real.hyperplanes.size());
    for (int j = 1; j <= d; ++j)
        detail::check_work_guard(n, j);
    std::vector<double> out(d, 0.0);
    for (int j = 1; j <= d; ++j)
        out[d - j] = detail::functional_for_size(real, j, diag);
    return out;
}

namespace detail {

// Unique H^d point Lorentz-orthogonal to d independent normals: the
// one-dimensional nullspace of the d x (d+1) system dot(row_a, x) = 0 with
// row_a = (-n_a[0], n_a[1..d]), normalized to <x,x> = -1, x_0 > 0.
inline bool vertex_from_normals(const realization& real, const int* idx,
                                hpoint& out) {
    const int d = real.params.d;
    double m[8 * 9];
    for (int a = 0; a < d; ++a) {
        const lorentz_vector& na = real.hyperplanes[idx[a]].normal;
        m[a * (d + 1)] = -na[0];
        for (int k = 1; k <= d; ++k)
            m[a * (d + 1) + k] = na[k];
    }
    int pivot_col[8];
    bool used[9] = {};
    int rank = 0;
    for (int col = 0; col <= d && rank < d; ++col) {
        int best = -1;
        double bestv = 1e-300;
        for (int row = rank; row < d; ++row) {
            const double v = std::fabs(m[row * (d + 1) + col]);
            if (v > bestv) {
                bestv = v;
                best = row;
            }
        }
        if (best < 0)
            continue;
        if (best != rank)
            for (int k = 0; k <= d; ++k)
                std::swap(m[best * (d + 1) + k], m[rank * (d + 1) + k]);
        const double piv = m[rank * (d + 1) + col];
        for (int row = 0; row < d; ++row) {
            if (row == rank)
                continue;
            const double f = m[row * (d + 1) + col] / piv;
            if (f != 0.0)
                for (int k = 0; k <= d; ++k)
                    m[row * (d + 1) + k] -= f * m[rank * (d + 1) + k];
        }
        pivot_col[rank++] = col;
        used[col] = true;
    }
    if (rank < d)
        return false;
    int free_col = 0;
    while (used[free_col])
        ++free_col;
    lorentz_vector x(d + 1, 0.0);
    x[free_col] = 1.0;
    for (int a = 0; a < d; ++a)
        x[pivot_col[a]] =
            -m[a * (d + 1) + free_col] / m[a * (d + 1) + pivot_col[a]];
    double norm2 = -x[0] * x[0];
    for (int k = 1; k <= d; ++k)
        norm2 += x[k] * x[k];
    if (norm2 >= 0.0)
        return false; // spacelike solution, no H^d point
    const double scale = 1.0 / std::sqrt(-norm2);
    for (int k = 0; k <= d; ++k)
        x[k] *= scale;
    if (x[0] < 0.0)
        for (int k = 0; k <= d; ++k)
            x[k] = -x[k];
    out.v = std::move(x);
    return true;
}

} // namespace detail

// Intersection vertices of the realization inside B_r.  Inclusion reuses the
// same predicates as skeleton_functional(real, 0), so the returned length
// equals F^{(0)} exactly.
inline std::vector<hpoint> skeleton_vertices(const realization& real,
                                             skeleton_diagnostics* diag = nullptr) {
    const int d = real.params.d;
    const long n = static_cast<long>(real.hyperplanes.size());
    detail::check_work_guard(n, d);
    std::vector<hpoint> verts;

    if (d == 2) {
        const detail::planar_cache pc(real);
        const double sinh2_r = std::sinh(real.params.r) * std::sinh(real.params.r);
        long long degen = 0;
        int idx[2];
        for (long a = 0; a + 1 < n; ++a)
            for (long b = a + 1; b < n; ++b) {
                const detail::pair_kernel pk(
                    pc.sh[a], pc.ch[a], pc.sh[b], pc.ch[b],
                    pc.ux[a] * pc.ux[b] + pc.uy[a] * pc.uy[b]);
                if (pk.degenerate()) {
                    ++degen;
                    continue;
                }
                if (pk.q(pc.sh[a], pc.sh[b]) <= sinh2_r) {
                    idx[0] = static_cast<int>(a);
                    idx[1] = static_cast<int>(b);
                    hpoint x;
                    if (detail::vertex_from_normals(real, idx, x))
                        verts.push_back(std::move(x));
                    else
                        throw std::runtime_error(
                            "skeleton_vertices: nullspace solve failed on a "
                            "non-degenerate pair");
                }
            }
        if (diag) {
            diag->subsets += n * (n - 1) / 2;
            diag->degenerate += degen;
        }
        return verts;
    }

    detail::sweep_flats(real, d, diag, [&](const int* idx, double) {
        hpoint x;
        if (detail::vertex_from_normals(real, idx, x))
            verts.push_back(std::move(x));
        else
            throw std::runtime_error(
                "skeleton_vertices: nullspace solve failed on a "
                "non-degenerate subset");
    });
    return verts;
}

} // namespace hypflats

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hypflats/moments.hpp"
#include "hypflats/rng.hpp"

namespace hypflats {

inline double mean_of(const std::vector<double>& xs) {
    if (xs.empty())
        throw std::invalid_argument("mean_of: empty sample");
    double s = 0.0, comp = 0.0;
    for (double x : xs) {
        const double y = x - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s / static_cast<double>(xs.size());
}

// Unbiased sample variance.
inline double variance_of(const std::vector<double>& xs) {
    if (xs.size() < 2)
        throw std::invalid_argument("variance_of: need at least two values");
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs)
        s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

// k-th sample central moment (biased plug-in version).
inline double central_moment(const std::vector<double>& xs, int k) {
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs)
        s += std::pow(x - m, k);
    return s / static_cast<double>(xs.size());
}

// Plug-in fourth cumulant m4 - 3 m2^2 of a sample.
inline double cum4_plugin(const std::vector<double>& xs) {
    const double m2 = central_moment(xs, 2);
    return central_moment(xs, 4) - 3.0 * m2 * m2;
}

// Sample covariance matrix of row-vector observations (unbiased).
inline dmatrix sample_covariance(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2)
        throw std::invalid_argument("sample_covariance: need at least two rows");
    const std::size_t dim = rows.front().size();
    const std::size_t n = rows.size();
    std::vector<double> mean(dim, 0.0);
    for (const auto& row : rows) {
        if (row.size() != dim)
            throw std::invalid_argument("sample_covariance: ragged rows");
        for (std::size_t k = 0; k < dim; ++k)
            mean[k] += row[k];
    }
    for (double& m : mean)
        m /= static_cast<double>(n);
    dmatrix cov(dim, std::vector<double>(dim, 0.0));
    for (const auto& row : rows)
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = a; b < dim; ++b)
                cov[a][b] += (row[a] - mean[a]) * (row[b] - mean[b]);
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = a; b < dim; ++b) {
            cov[a][b] /= static_cast<double>(n - 1);
            cov[b][a] = cov[a][b];
        }
    return cov;
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244008443621048490393);
}

// Kolmogorov-Smirnov distance between a sample and the standard normal.
inline double ks_statistic(std::vector<double> xs) {
    if (xs.empty())
        throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double f = normal_cdf(xs[k]);
        d = std::max(d, std::fabs(f - static_cast<double>(k) / n));
        d = std::max(d, std::fabs(f - static_cast<double>(k + 1) / n));
    }
    return d;
}

// Bootstrap standard error of a scalar statistic (resampling with
// replacement, fixed 200 resamples, deterministic in the seed).
template <class Stat>
double bootstrap_stderr(const std::vector<double>& xs, std::uint64_t seed,
                        const Stat& stat, int resamples = 200) {
    if (xs.empty())
        throw std::invalid_argument("bootstrap_stderr: empty sample");
    rng_stream rng(seed, 0x626f6f74);
    const std::size_t n = xs.size();
    std::vector<double> draw(n);
    std::vector<double> stats(resamples);
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t idx = static_cast<std::size_t>(
                rng.uniform() * static_cast<double>(n));
            draw[k] = xs[idx < n ? idx : n - 1];
        }
        stats[b] = stat(draw);
    }
    const double m = mean_of(stats);
    double s = 0.0;
    for (double v : stats)
        s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(resamples - 1));
}

// Entry-wise bootstrap standard errors of the sample covariance matrix,
// resampling whole observation rows.
inline dmatrix
bootstrap_covariance_stderr(const std::vector<std::vector<double>>& rows,
                            std::uint64_t seed, int resamples = 200) {
    if (rows.size() < 2)
        throw std::invalid_argument("bootstrap_covariance_stderr: too few rows");
    const std::size_t n = rows.size();
    const std::size_t dim = rows.front().size();
    rng_stream rng(seed, 0x636f7662);
    std::vector<std::vector<double>> draw(n);
    dmatrix sum(dim, std::vector<double>(dim, 0.0));
    dmatrix sum2(dim, std::vector<double>(dim, 0.0));
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t idx = static_cast<std::size_t>(
                rng.uniform() * static_cast<double>(n));
            draw[k] = rows[idx < n ? idx : n - 1];
        }
        const dmatrix cov = sample_covariance(draw);
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t c = 0; c < dim; ++c) {
                sum[a][c] += cov[a][c];
                sum2[a][c] += cov[a][c] * cov[a][c];
            }
    }
    dmatrix out(dim, std::vector<double>(dim, 0.0));
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t c = 0; c < dim; ++c) {
            const double m = sum[a][c] / resamples;
            const double v =
                (sum2[a][c] - resamples * m * m) / (resamples - 1);
            out[a][c] = std::sqrt(std::max(0.0, v));
        }
    return out;
}

// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations,
// ascending.  Matrices here are at most 8x8.
inline std::vector<double> jacobi_eigenvalues(dmatrix m) {
    const std::size_t n = m.size();
    for (const auto& row : m)
        if (row.size() != n)
            throw std::invalid_argument("jacobi_eigenvalues: not square");
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += m[p][q] * m[p][q];
        if (off < 1e-30)
            break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (m[p][q] == 0.0)
                    continue;
                const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) +
                                  std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (std::size_t k = 0; k < n; ++k)
        eig[k] = m[k][k];
    std::sort(eig.begin(), eig.end());
    return eig;
}

} // namespace hypflats

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "hypflats/geometry.hpp"
#include "hypflats/moments.hpp"
#include "hypflats/partitions.hpp"
#include "hypflats/process.hpp"
#include "hypflats/rng.hpp"
#include "hypflats/volumes.hpp"

namespace hypflats {

// Reduced chaos kernel of order u for the i-skeleton functional:
// f_u(H_1,...,H_u) = c(i,u,d) * slice-volume of the intersection flat.
struct kernel_evaluator {
    int d, i, u;
    double coeff;

    double operator()(const std::vector<hyperplane>& hs, double r) const {
        if (static_cast<int>(hs.size()) != u)
            throw std::invalid_argument(
                "kernel_evaluator: wrong number of hyperplanes");
        const flat f = flat_from_normals(hs);
        if (f.degenerate)
            return 0.0;
        return coeff * ball_slice_volume(d - u, f.dist_origin, r);
    }
};

inline kernel_evaluator reduced_kernel(int d, int i, int u) {
    if (i < 0 || i >= d)
        throw std::invalid_argument("reduced_kernel: i outside [0,d-1]");
    if (u < 1 || u > d - i)
        throw std::invalid_argument("reduced_kernel: u outside [1,d-i]");
    const moment_constants mc(d);
    return kernel_evaluator{d, i, u, mc.c_ind(i, u)};
}

struct mc_value {
    double value = 0.0;
    double stderr_ = 0.0;
};

// One equivalence class of diagrams and its Monte Carlo contribution.
struct diagram_contribution {
    std::vector<unsigned> canonical; // class key (block row-set multiset)
    long class_size = 0;             // labeled diagrams in the class
    int sigma_blocks = 0;            // |sigma|
    int covered = 0;                 // ||sigma||
    int n_vars = 0;                  // integration variables after identification
    double t_exponent = 0.0;
    double integral = 0.0;           // per-diagram identified integral
    double integral_stderr = 0.0;
    double contribution = 0.0;       // class_size * t^exponent * integral
};

struct diagram_sum {
    double value = 0.0;
    double stderr_ = 0.0;
    std::vector<diagram_contribution> per_class;
};

namespace detail {

// Evaluation plan for one representative diagram: which integration variable
// sits in each cell, row by row.  Blocks come first, then the uncovered
// cells as fresh variables.
struct class_plan {
    std::vector<std::vector<int>> row_vars;
    int n_vars = 0;
};

inline class_plan plan_from_diagram(const diagram& dg) {
    class_plan plan;
    const int rows = static_cast<int>(dg.row_sizes.size());
    plan.row_vars.resize(rows);
    std::vector<std::vector<int>> cell_var(rows);
    for (int r = 0; r < rows; ++r)
        cell_var[r].assign(dg.row_sizes[r], -1);
    int next = 0;
    for (const auto& block : dg.blocks) {
        for (const auto& cell : block)
            cell_var[cell.first][cell.second] = next;
        ++next;
    }
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < dg.row_sizes[r]; ++c) {
            if (cell_var[r][c] < 0)
                cell_var[r][c] = next++;
            plan.row_vars[r].push_back(cell_var[r][c]);
        }
    plan.n_vars = next;
    return plan;
}

// Identified-integral Monte Carlo for one diagram class.  Variables are
// drawn from the normalized hitting measure on B_r (the kernels vanish when
// any argument misses the ball, so this importance choice is exact) and the
// estimate is weighted by hitting_mass^{n_vars}.  Returns per-batch means.
inline std::vector<double>
mc_batches(int d, double r, const class_plan& plan,
           const std::vector<double>& coeff_by_size, std::uint64_t seed,
           std::uint64_t stream_base, long n_per_batch, int batches) {
    const int rows = static_cast<int>(plan.row_vars.size());
    std::vector<double> batch_means(batches, 0.0);
    double s_var[24];
    double normals[24][9];
    double dirbuf[8];
    double gram[64], c[8], y[8];
    for (int b = 0; b < batches; ++b) {
        rng_stream rng(seed, stream_base + static_cast<std::uint64_t>(b));
        double sum = 0.0, comp = 0.0;
        for (long it = 0; it < n_per_batch; ++it) {
            for (int v = 0; v < plan.n_vars; ++v) {
                const double s = sample_distance(d, r, rng.uniform());
                rng.direction(d, dirbuf);
                s_var[v] = s;
                const double sh = std::sinh(s), ch = std::cosh(s);
                normals[v][0] = sh;
                for (int k = 0; k < d; ++k)
                    normals[v][k + 1] = ch * dirbuf[k];
            }
            double prod = 1.0;
            for (int row = 0; row < rows && prod != 0.0; ++row) {
                const auto& vars = plan.row_vars[row];
                const int nr = static_cast<int>(vars.size());
                double slice;
                if (nr == 1) {
                    slice = ball_slice_volume(d - 1, s_var[vars[0]], r);
                } else {
                    for (int a = 0; a < nr; ++a) {
                        c[a] = -normals[vars[a]][0];
                        for (int bcol = 0; bcol <= a; ++bcol) {
                            double g = -normals[vars[a]][0] *
                                       normals[vars[bcol]][0];
                            for (int k = 1; k <= d; ++k)
                                g += normals[vars[a]][k] *
                                     normals[vars[bcol]][k];
                            gram[a * nr + bcol] = g;
                            gram[bcol * nr + a] = g;
                        }
                    }
                    if (!cholesky(gram, nr)) {
                        prod = 0.0;
                        break;
                    }
                    cholesky_solve(gram, nr, c, y);
                    double q = 0.0;
                    for (int a = 0; a < nr; ++a)
                        q += c[a] * y[a];
                    const double dist =
                        std::acosh(std::sqrt(1.0 + std::max(0.0, q)));
                    slice = ball_slice_volume(d - nr, dist, r);
                }
                prod *= coeff_by_size[nr] * slice;
            }
            const double yk = prod - comp;
            const double tk = sum + yk;
            comp = (tk - sum) - yk;
            sum = tk;
        }
        batch_means[b] = sum / static_cast<double>(n_per_batch);
    }
    return batch_means;
}

// Shared driver: enumerate a diagram family, group it into equivalence
// classes, Monte Carlo one representative per class, and sum class_size *
// t^exponent * integral with batch-resampled errors.
template <class ExponentFn>
diagram_sum diagram_mc_sum(int d, double r, double t,
                           const std::vector<diagram>& diagrams,
                           const std::vector<double>& coeff_by_size,
                           const ExponentFn& t_exponent_of, long n_mc,
                           std::uint64_t seed) {
    diagram_sum out;
    if (diagrams.empty())
        return out;
    const auto perms =
        size_preserving_row_perms(diagrams.front().row_sizes);
    std::map<std::vector<unsigned>, std::pair<const diagram*, long>> classes;
    for (const diagram& dg : diagrams) {
        auto key = diagram_canonical_key(dg, perms);
        auto it = classes.find(key);
        if (it == classes.end())
            classes.emplace(std::move(key), std::make_pair(&dg, 1L));
        else
            ++it->second.second;
    }

    const int batches = 100;
    const long n_per_batch = std::max(1L, n_mc / batches);
    const double mass = hitting_mass(d, r);

    std::vector<double> totals(batches, 0.0);
    std::uint64_t class_index = 0;
    for (const auto& entry : classes) {
        const diagram& rep = *entry.second.first;
        const long count = entry.second.second;
        const class_plan plan = plan_from_diagram(rep);
        const std::vector<double> bm =
            mc_batches(d, r, plan, coeff_by_size, seed,
                       class_index * static_cast<std::uint64_t>(batches),
                       n_per_batch, batches);
        const double weight = std::pow(mass, plan.n_vars);
        const double texp = t_exponent_of(rep);
        const double scale =
            static_cast<double>(count) * std::pow(t, texp) * weight;

        diagram_contribution dc;
        dc.canonical = entry.first;
        dc.class_size = count;
        dc.sigma_blocks = rep.block_count();
        dc.covered = rep.covered_cells();
        dc.n_vars = plan.n_vars;
        dc.t_exponent = texp;
        double mean = 0.0;
        for (int b = 0; b < batches; ++b) {
            mean += bm[b];
            totals[b] += scale * bm[b];
        }
        mean /= batches;
        double var = 0.0;
        for (int b = 0; b < batches; ++b)
            var += (bm[b] - mean) * (bm[b] - mean);
        var /= static_cast<double>(batches) * (batches - 1);
        dc.integral = weight * mean;
        dc.integral_stderr = weight * std::sqrt(var);
        dc.contribution = scale * mean;
        out.per_class.push_back(std::move(dc));
        out.value += scale * mean;
        ++class_index;
    }

    double tmean = 0.0;
    for (double v : totals)
        tmean += v;
    tmean /= batches;
    double tvar = 0.0;
    for (double v : totals)
        tvar += (v - tmean) * (v - tmean);
    tvar /= static_cast<double>(batches) * (batches - 1);
    out.stderr_ = std::sqrt(tvar);
    return out;
}

} // namespace detail

// M_{u,v}: the normal-approximation contraction integrals, summed over the
// connected diagrams on rows (u, u, v, v).  Expressed against the unit
// intensity measure, the diagram with |sigma| blocks carries
// t^{4(d-i) - 2(u+v) + |sigma|}.
inline diagram_sum m_uv(int d, int i, int u, int v, double t, double r,
                        long n_mc, std::uint64_t seed) {
    if (i < 0 || i >= d)
        throw std::invalid_argument("m_uv: i outside [0,d-1]");
    if (u < 1 || v < 1 || u > d - i || v > d - i)
        throw std::invalid_argument("m_uv: u, v outside [1,d-i]");
    if (!(t > 0.0) || !(r > 0.0))
        throw std::invalid_argument("m_uv: t and r must be positive");
    if (n_mc < 100)
        throw std::invalid_argument("m_uv: need at least 100 samples");
    const moment_constants mc(d);
    std::vector<double> coeff(static_cast<std::size_t>(std::max(u, v)) + 1,
                              0.0);
    for (int nr = 1; nr <= std::max(u, v); ++nr)
        coeff[nr] = mc.c_ind(i, nr);
    const auto diagrams =
        enumerate_diagrams(diagram_class::con_ge2, {u, u, v, v});
    return detail::diagram_mc_sum(
        d, r, t, diagrams, coeff,
        [&](const diagram& dg) {
            return 4.0 * (d - i) - 2.0 * (u + v) + dg.block_count();
        },
        n_mc, seed);
}

// Centred moment E (F - EF)^l via the diagram formula over the families
// Pi**_{>=2}(m,...,m), m = d-i: each sub-partition sigma contributes
// t^{m l + |sigma| - ||sigma||} times the identified integral of the
// l-fold tensor of the raw kernel slice(i, .)/m!.
inline mc_value centered_moment(int d, int i, double t, double r, int ell,
                                long n_mc, std::uint64_t seed) {
    if (i < 0 || i >= d)
        throw std::invalid_argument("centered_moment: i outside [0,d-1]");
    if (ell < 2 || ell > 5)
        throw std::invalid_argument("centered_moment: l must be in {2,...,5}");
    if (!(t >= 0.0) || !(r > 0.0))
        throw std::invalid_argument("centered_moment: bad t or r");
    if (n_mc < 100)
        throw std::invalid_argument("centered_moment: need at least 100 samples");
    const int m = d - i;
    const std::vector<int> rows(ell, m);
    const auto diagrams =
        enumerate_diagrams(diagram_class::star_star_ge2, rows);
    std::vector<double> coeff(static_cast<std::size_t>(m) + 1, 0.0);
    coeff[m] = 1.0 / detail::factorial(m);
    if (t == 0.0)
        return mc_value{};
    const auto sum = detail::diagram_mc_sum(
        d, r, t, diagrams, coeff,
        [&](const diagram& dg) {
            return static_cast<double>(m * ell) + dg.block_count() -
                   dg.covered_cells();
        },
        n_mc, seed);
    return mc_value{sum.value, sum.stderr_};
}

// Exact quadrature of the fourth-cumulant lower bound M_{1,1}/Var^2; the
// numerator keeps all the kernel constants, the unknown universal prefactor
// of the inequality is dropped.
inline double cum4_lower_bound(int d, int i, double t, double r) {
    if (i < 0 || i >= d)
        throw std::invalid_argument("cum4_lower_bound: i outside [0,d-1]");
    if (!(t > 0.0))
        throw std::invalid_argument("cum4_lower_bound: t must be positive");
    if (r < 0.5)
        throw std::invalid_argument(
            "cum4_lower_bound: r must be >= 0.5 (variance denominator "
            "degenerates as r -> 0)");
    const moment_constants mc(d);
    const double c1 = mc.c_ind(i, 1);
    const double m11 = std::pow(t, 4.0 * (d - i - 1) + 1.0) * c1 * c1 * c1 *
                       c1 * flat_integral(d - 1, 4, d, r);
    const double var = variance(d, i, t, r);
    return m11 / (var * var);
}

enum class norm_metric { wasserstein, kolmogorov };

// Berry-Esseen-type bound on the distance between the standardized
// functional and a Gaussian: c_m sum_{u,v} sqrt(M_{u,v}) / Var with
// c_m = 2 m^{7/2} (Wasserstein) or 19 m^5 (Kolmogorov), m = d-i.
inline double normal_bound(int d, int i, double t, double r, long n_mc,
                           std::uint64_t seed,
                           norm_metric metric = norm_metric::wasserstein) {
    if (i < 0 || i >= d)
        throw std::invalid_argument("normal_bound: i outside [0,d-1]");
    const int m = d - i;
    const double cm = metric == norm_metric::wasserstein
                          ? 2.0 * std::pow(m, 3.5)
                          : 19.0 * std::pow(m, 5.0);
    const double var = variance(d, i, t, r);
    double sum = 0.0;
    for (int u = 1; u <= m; ++u)
        for (int v = 1; v <= m; ++v) {
            const std::uint64_t term_seed =
                seed + 1000003ULL * static_cast<std::uint64_t>(u) +
                static_cast<std::uint64_t>(v);
            sum += std::sqrt(m_uv(d, i, u, v, t, r, n_mc, term_seed).value);
        }
    return cm * sum / var;
}

} // namespace hypflats

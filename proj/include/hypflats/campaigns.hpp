#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hypflats/moments.hpp"
#include "hypflats/parallel.hpp"
#include "hypflats/process.hpp"
#include "hypflats/second_order.hpp"
#include "hypflats/skeleton.hpp"
#include "hypflats/stats.hpp"

namespace hypflats {

// Shared shape of every Monte Carlo campaign: a process cell plus the
// replication count and worker budget.  Replication k always uses stream id
// k, so results are independent of the thread count.
struct campaign_config {
    int d = 2;
    double t = 1.0;
    double r = 2.0;
    long replications = 1000;
    std::uint64_t seed = 0;
    int threads = 0; // 0: HYPFLATS_THREADS, then hardware

    void validate() const {
        params().validate();
        if (replications < 100)
            throw std::invalid_argument(
                "campaign_config: need at least 100 replications");
    }

    process_params params() const { return {d, r, t, seed}; }
};

// One row of all skeleton functionals per replication.
inline std::vector<std::vector<double>>
collect_functional_rows(const campaign_config& cfg) {
    cfg.validate();
    const process_params p = cfg.params();
    const int threads = resolve_thread_count(cfg.threads);
    return parallel_map<std::vector<double>>(
        cfg.replications, threads, [p](long k) {
            return all_functionals(
                sample_realization(p, static_cast<std::uint64_t>(k)));
        });
}

// M values of a single functional.  The top-dimensional one depends only on
// the hyperplane distances and streams without building realizations.
inline std::vector<double> collect_component(const campaign_config& cfg,
                                             int i) {
    cfg.validate();
    if (i < 0 || i >= cfg.d)
        throw std::invalid_argument("collect_component: i outside [0,d-1]");
    const process_params p = cfg.params();
    const int threads = resolve_thread_count(cfg.threads);
    if (i == cfg.d - 1) {
        const double r = cfg.r;
        return parallel_map<double>(cfg.replications, threads, [p, i, r](long k) {
            return sum_over_distances(
                p, static_cast<std::uint64_t>(k),
                [i, r](double s) { return ball_slice_volume(i, s, r); });
        });
    }
    return parallel_map<double>(cfg.replications, threads, [p, i](long k) {
        return skeleton_functional(
            sample_realization(p, static_cast<std::uint64_t>(k)), i);
    });
}

// Sample moments of the functional vector against the analytic formulas.
// Every statistic is paired with an uncertainty; z-scores are the final
// pass/fail currency.
struct moment_report {
    std::vector<double> analytic_mean, sample_mean, mean_se, mean_z;
    dmatrix analytic_cov, sample_cov, cov_se, cov_z;
};

inline moment_report run_moment_campaign(const campaign_config& cfg) {
    const auto rows = collect_functional_rows(cfg);
    const int d = cfg.d;
    const double m = static_cast<double>(rows.size());
    const double vol = ball_volume(d, cfg.r);

    moment_report rep;
    rep.analytic_mean.resize(d);
    rep.sample_mean.resize(d);
    rep.mean_se.resize(d);
    rep.mean_z.resize(d);
    std::vector<double> col(rows.size());
    for (int i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < rows.size(); ++k)
            col[k] = rows[k][i];
        rep.analytic_mean[i] = expectation(d, i, cfg.t, vol);
        rep.sample_mean[i] = mean_of(col);
        rep.mean_se[i] = std::sqrt(variance_of(col) / m);
        rep.mean_z[i] =
            (rep.sample_mean[i] - rep.analytic_mean[i]) / rep.mean_se[i];
    }

    rep.analytic_cov.assign(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
            rep.analytic_cov[i][j] = rep.analytic_cov[j][i] =
                covariance(d, i, j, cfg.t, cfg.r).total;
    rep.sample_cov = sample_covariance(rows);
    rep.cov_se = bootstrap_covariance_stderr(rows, cfg.seed);
    rep.cov_z.assign(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            rep.cov_z[i][j] =
                (rep.sample_cov[i][j] - rep.analytic_cov[i][j]) /
                rep.cov_se[i][j];
    return rep;
}

// Replications of (F^{(i)} - E F^{(i)}) / sd(F^{(i)}) with the analytic mean
// and variance, the standardization the limit statements are written in.
inline std::vector<double> standardized_component(const campaign_config& cfg,
                                                  int i) {
    const double mean = expectation(cfg.d, i, cfg.t, ball_volume(cfg.d, cfg.r));
    const double sd = std::sqrt(variance(cfg.d, i, cfg.t, cfg.r));
    std::vector<double> xs = collect_component(cfg, i);
    for (double& x : xs)
        x = (x - mean) / sd;
    return xs;
}

// Normality diagnostics of one standardized cell.
struct clt_report {
    double ks = 0.0;
    double skewness = 0.0, skewness_se = 0.0;
    double cum4 = 0.0, cum4_se = 0.0;
};

inline clt_report clt_diagnostics(const std::vector<double>& zs,
                                  std::uint64_t seed) {
    clt_report rep;
    rep.ks = ks_statistic(zs);
    const auto skew = [](const std::vector<double>& v) {
        const double m2 = central_moment(v, 2);
        return central_moment(v, 3) / std::pow(m2, 1.5);
    };
    const auto cum4 = [](const std::vector<double>& v) {
        return cum4_plugin(v);
    };
    rep.skewness = skew(zs);
    rep.skewness_se = bootstrap_stderr(zs, seed, skew);
    rep.cum4 = cum4(zs);
    rep.cum4_se = bootstrap_stderr(zs, seed + 1, cum4);
    return rep;
}

inline clt_report run_clt_cell(const campaign_config& cfg, int i) {
    return clt_diagnostics(standardized_component(cfg, i), cfg.seed);
}

// Covariance of the window-scaled centered functional vector against its
// analytic limit, with marginal normality checks.
struct multivariate_report {
    dmatrix target, empirical;
    double frobenius_error = 0.0, frobenius_se = 0.0;
    std::vector<double> marginal_ks;
    double min_correlation = 0.0;
};

namespace detail {

inline double frobenius_distance(const dmatrix& a, const dmatrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            s += (a[i][j] - b[i][j]) * (a[i][j] - b[i][j]);
    return std::sqrt(s);
}

} // namespace detail

inline multivariate_report
run_multivariate_campaign(const campaign_config& cfg) {
    if (cfg.d < 2 || cfg.d > 4)
        throw std::invalid_argument(
            "run_multivariate_campaign: d must be 2, 3 or 4");
    const auto rows = collect_functional_rows(cfg);
    const int d = cfg.d;
    const double vol = ball_volume(d, cfg.r);

    double scale;
    if (d == 2)
        scale = std::exp(cfg.r / 2.0);
    else if (d == 3)
        scale = std::sqrt(cfg.r) * std::exp(cfg.r);
    else
        scale = std::exp(cfg.r * (d - 2));

    std::vector<double> means(d), sds(d);
    for (int i = 0; i < d; ++i) {
        means[i] = expectation(d, i, cfg.t, vol);
        sds[i] = std::sqrt(variance(d, i, cfg.t, cfg.r));
    }
    std::vector<std::vector<double>> scaled(rows.size(),
                                            std::vector<double>(d));
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (int i = 0; i < d; ++i)
            scaled[k][i] = (rows[k][i] - means[i]) / scale;

    multivariate_report rep;
    rep.target = asymptotic_covariance(d, cfg.t);
    rep.empirical = sample_covariance(scaled);
    rep.frobenius_error = detail::frobenius_distance(rep.empirical, rep.target);

    // bootstrap the Frobenius error by resampling whole replication rows
    {
        rng_stream rng(cfg.seed, 0x66726f62);
        const std::size_t n = scaled.size();
        std::vector<std::vector<double>> draw(n);
        const int resamples = 200;
        double s1 = 0.0, s2 = 0.0;
        for (int b = 0; b < resamples; ++b) {
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t idx = static_cast<std::size_t>(
                    rng.uniform() * static_cast<double>(n));
                draw[k] = scaled[idx < n ? idx : n - 1];
            }
            const double e = detail::frobenius_distance(
                sample_covariance(draw), rep.target);
            s1 += e;
            s2 += e * e;
        }
        const double mb = s1 / resamples;
        rep.frobenius_se =
            std::sqrt(std::max(0.0, (s2 - resamples * mb * mb) / (resamples - 1)));
    }

    rep.marginal_ks.resize(d);
    std::vector<double> zs(rows.size());
    for (int i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < rows.size(); ++k)
            zs[k] = (rows[k][i] - means[i]) / sds[i];
        rep.marginal_ks[i] = ks_statistic(zs);
    }

    rep.min_correlation = 1.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double c =
                rep.empirical[i][j] /
                std::sqrt(rep.empirical[i][i] * rep.empirical[j][j]);
            rep.min_correlation = std::min(rep.min_correlation, c);
        }
    return rep;
}

// K-function table: analytic K and g on a grid, optionally with the
// minus-sampling estimate from simulated vertex processes.
struct kfunction_row {
    double r = 0.0;
    double k_analytic = 0.0;
    double g_analytic = 0.0;
    double k_empirical = 0.0;
    double k_stderr = 0.0;
    bool has_empirical = false;
};

inline std::vector<kfunction_row>
kfunction_table(const k_params& kp, const std::vector<double>& r_values) {
    kp.validate();
    std::vector<kfunction_row> out;
    out.reserve(r_values.size());
    for (double r : r_values) {
        kfunction_row row;
        row.r = r;
        row.k_analytic = k_function(kp, r);
        row.g_analytic = pair_correlation(kp, r);
        out.push_back(row);
    }
    return out;
}

inline std::vector<kfunction_row>
kfunction_table_empirical(const k_params& kp,
                          const std::vector<double>& r_values,
                          const campaign_config& cfg, double window) {
    if (kp.i != 0 || kp.j != 0 || kp.kappa != -1)
        throw std::invalid_argument(
            "kfunction_table_empirical: estimator covers the vertex process "
            "in curvature -1 only (i = j = 0)");
    if (cfg.d != kp.d || cfg.t != kp.t)
        throw std::invalid_argument(
            "kfunction_table_empirical: campaign cell disagrees with the "
            "K-function parameters");
    std::vector<kfunction_row> out = kfunction_table(kp, r_values);
    cfg.validate();
    const process_params p = cfg.params();
    const int threads = resolve_thread_count(cfg.threads);
    const auto reals = parallel_map<realization>(
        cfg.replications, threads, [p](long k) {
            return sample_realization(p, static_cast<std::uint64_t>(k));
        });
    const auto est = empirical_k0(reals, r_values, window);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].k_empirical = est[k].estimate;
        out[k].k_stderr = est[k].stderr_;
        out[k].has_empirical = true;
    }
    return out;
}

} // namespace hypflats

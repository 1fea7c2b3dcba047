#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hypflats/rng.hpp"
#include "hypflats/stats.hpp"

using namespace hypflats;

TEST_CASE("sample moments") {
    const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    REQUIRE(mean_of(xs) == Catch::Approx(2.5).epsilon(1e-15));
    REQUIRE(variance_of(xs) == Catch::Approx(5.0 / 3.0).epsilon(1e-15));
    REQUIRE(central_moment(xs, 2) == Catch::Approx(1.25).epsilon(1e-15));
    REQUIRE(central_moment(xs, 4) == Catch::Approx(2.5625).epsilon(1e-15));
    REQUIRE(cum4_plugin(xs) == Catch::Approx(-4.6875 + 2.5625).epsilon(1e-13));
    REQUIRE_THROWS_AS(mean_of({}), std::invalid_argument);
}

TEST_CASE("sample covariance") {
    const std::vector<std::vector<double>> rows = {
        {1.0, 2.0}, {2.0, 1.0}, {3.0, 4.0}, {4.0, 3.0}};
    const dmatrix cov = sample_covariance(rows);
    REQUIRE(cov[0][0] == Catch::Approx(5.0 / 3.0).epsilon(1e-14));
    REQUIRE(cov[1][1] == Catch::Approx(5.0 / 3.0).epsilon(1e-14));
    REQUIRE(cov[0][1] == Catch::Approx(cov[1][0]).epsilon(1e-15));
    REQUIRE(cov[0][1] == Catch::Approx(1.0).epsilon(1e-13));
    REQUIRE_THROWS_AS(sample_covariance({{1.0, 2.0}, {1.0}}),
                      std::invalid_argument);
}

TEST_CASE("normal cdf") {
    REQUIRE(normal_cdf(0.0) == Catch::Approx(0.5).epsilon(1e-15));
    REQUIRE(normal_cdf(0.3) == Catch::Approx(0.61791142218895256).epsilon(1e-14));
    REQUIRE(normal_cdf(-1.7) == Catch::Approx(0.044565462758543041).epsilon(1e-14));
    REQUIRE(normal_cdf(2.5) == Catch::Approx(0.99379033467422384).epsilon(1e-14));
    for (double x : {0.4, 1.1, 3.0})
        REQUIRE(normal_cdf(x) + normal_cdf(-x) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("kolmogorov-smirnov statistic") {
    REQUIRE(ks_statistic({-1.2, -0.3, 0.1, 0.4, 2.0}) ==
            Catch::Approx(0.18208857781104737).epsilon(1e-14));
    REQUIRE(ks_statistic({0.5, 0.5, 0.5}) ==
            Catch::Approx(0.69146246127401312).epsilon(1e-14));
    REQUIRE_THROWS_AS(ks_statistic({}), std::invalid_argument);

    // a large standard normal sample scores small, a shifted one large
    rng_stream rng(2525, 0);
    std::vector<double> xs(20000);
    for (double& x : xs)
        x = rng.gaussian();
    REQUIRE(ks_statistic(xs) < 0.015);
    for (double& x : xs)
        x += 0.5;
    REQUIRE(ks_statistic(xs) > 0.15);
}

TEST_CASE("bootstrap standard errors") {
    rng_stream rng(777, 3);
    std::vector<double> xs(400);
    for (double& x : xs)
        x = rng.gaussian();

    const auto mean_stat = [](const std::vector<double>& v) {
        return mean_of(v);
    };
    const double se = bootstrap_stderr(xs, 11, mean_stat);
    const double analytic = std::sqrt(variance_of(xs) / xs.size());
    REQUIRE(se == Catch::Approx(analytic).epsilon(0.25));
    // deterministic in the seed
    REQUIRE(bootstrap_stderr(xs, 11, mean_stat) == se);
    REQUIRE(bootstrap_stderr(xs, 12, mean_stat) != se);
    REQUIRE_THROWS_AS(bootstrap_stderr({}, 11, mean_stat),
                      std::invalid_argument);
}

TEST_CASE("bootstrap covariance errors") {
    rng_stream rng(778, 0);
    std::vector<std::vector<double>> rows(300, std::vector<double>(2));
    for (auto& row : rows) {
        row[0] = rng.gaussian();
        row[1] = 0.5 * row[0] + rng.gaussian();
    }
    const dmatrix se = bootstrap_covariance_stderr(rows, 5);
    REQUIRE(se.size() == 2);
    for (const auto& row : se)
        for (double v : row) {
            REQUIRE(v > 0.0);
            // covariance entries are O(1); their standard error ~ 1/sqrt(300)
            REQUIRE(v < 0.5);
        }
    const dmatrix se2 = bootstrap_covariance_stderr(rows, 5);
    REQUIRE(se[0][1] == se2[0][1]);
}

TEST_CASE("jacobi eigenvalues") {
    const dmatrix m3 = {{2.0, 1.0, 0.5}, {1.0, 3.0, -0.25}, {0.5, -0.25, 1.5}};
    const auto e3 = jacobi_eigenvalues(m3);
    REQUIRE(e3[0] == Catch::Approx(0.8806936062370846).epsilon(1e-12));
    REQUIRE(e3[1] == Catch::Approx(2.0).epsilon(1e-12));
    REQUIRE(e3[2] == Catch::Approx(3.619306393762915).epsilon(1e-12));

    const dmatrix m4 = {{4.0, 1.0, 0.0, 0.5},
                        {1.0, 3.0, 1.0, 0.0},
                        {0.0, 1.0, 2.0, 1.0},
                        {0.5, 0.0, 1.0, 1.0}};
    const auto e4 = jacobi_eigenvalues(m4);
    REQUIRE(e4[0] == Catch::Approx(0.1650608110678689).epsilon(1e-11));
    REQUIRE(e4[1] == Catch::Approx(1.954052214961026).epsilon(1e-11));
    REQUIRE(e4[2] == Catch::Approx(3.045947785038973).epsilon(1e-11));
    REQUIRE(e4[3] == Catch::Approx(4.8349391889321325).epsilon(1e-11));

    // rank-one outer product: eigenvalues (0, 0, |v|^2)
    const std::vector<double> v = {1.0, 2.0, 3.0};
    dmatrix outer(3, std::vector<double>(3));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            outer[a][b] = v[a] * v[b];
    const auto er = jacobi_eigenvalues(outer);
    REQUIRE(std::fabs(er[0]) < 1e-12);
    REQUIRE(std::fabs(er[1]) < 1e-12);
    REQUIRE(er[2] == Catch::Approx(14.0).epsilon(1e-12));
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypflats/campaigns.hpp"
#include "hypflats/disc.hpp"
#include "hypflats/io.hpp"
#include "hypflats/version.hpp"

using namespace hypflats;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const char* name) {
    return std::string("hypflats_test_") + name;
}

} // namespace

TEST_CASE("g17 round-trips doubles exactly") {
    const std::vector<double> vs = {0.0,
                                    1.0,
                                    -1.0,
                                    0.1,
                                    1.0 / 3.0,
                                    M_PI,
                                    1.2345678901234567e-12,
                                    9.87654321e141,
                                    -2.2250738585072014e-308};
    for (double v : vs) {
        const std::string s = g17(v);
        const double back = std::strtod(s.c_str(), nullptr);
        REQUIRE(back == v);
    }
    REQUIRE(g17(1.0) == "1");
    REQUIRE(g17(0.5) == "0.5");
}

TEST_CASE("csv writer emits exactly the pushed rows") {
    const std::string path = temp_path("writer.csv");
    {
        csv_writer w(path, {"a", "b", "c"});
        w.write_row({"1", "2.5", "x"});
        w.write_row({g17(0.1), "0", "-3"});
        w.close();
    }
    REQUIRE(read_file(path) ==
            "a,b,c\n1,2.5,x\n0.10000000000000001,0,-3\n");
    std::remove(path.c_str());
    REQUIRE_THROWS_AS(csv_writer("/nonexistent_dir_zz/out.csv", {"a"}),
                      std::runtime_error);
}

TEST_CASE("version string set") {
    REQUIRE(std::string(version_string) == "0.1.0");
}

TEST_CASE("ideal endpoints of a planar line") {
    const hyperplane h = hyperplane_at({std::cos(0.7), std::sin(0.7)}, 0.9);
    const disc_chord c = ideal_endpoints(h);
    REQUIRE(c.a[0] == Catch::Approx(0.098323179933731665).epsilon(1e-14));
    REQUIRE(c.a[1] == Catch::Approx(0.99515453688747208).epsilon(1e-14));
    REQUIRE(c.b[0] == Catch::Approx(0.99738647964675317).epsilon(1e-14));
    REQUIRE(c.b[1] == Catch::Approx(-0.072251022261673404).epsilon(1e-13));

    // through the origin the chord is the diameter orthogonal to dir
    const hyperplane h0 = hyperplane_at({std::cos(1.1), std::sin(1.1)}, 0.0);
    const disc_chord c0 = ideal_endpoints(h0);
    REQUIRE(c0.a[0] == Catch::Approx(-h0.dir[1]).margin(1e-15));
    REQUIRE(c0.a[1] == Catch::Approx(h0.dir[0]).margin(1e-15));
    REQUIRE(c0.b[0] == Catch::Approx(h0.dir[1]).margin(1e-15));
    REQUIRE(c0.b[1] == Catch::Approx(-h0.dir[0]).margin(1e-15));

    const hyperplane h3 = hyperplane_at({1.0, 0.0, 0.0}, 0.4);
    REQUIRE_THROWS_AS(ideal_endpoints(h3), std::invalid_argument);
}

TEST_CASE("chord endpoints are ideal points of the line") {
    // endpoints must sit on the unit circle and the lifted null vectors
    // (1, w) must be Lorentz-orthogonal to the line's unit normal
    const realization real = sample_realization({2, 3.0, 1.2, 11}, 0);
    REQUIRE(real.hyperplanes.size() > 3);
    for (const hyperplane& h : real.hyperplanes) {
        const disc_chord c = ideal_endpoints(h);
        for (const auto& w : {c.a, c.b}) {
            REQUIRE(std::fabs(w[0] * w[0] + w[1] * w[1] - 1.0) < 1e-10);
            const double inner = -std::sinh(h.s) +
                                 std::cosh(h.s) *
                                     (w[0] * h.dir[0] + w[1] * h.dir[1]);
            REQUIRE(std::fabs(inner) < 1e-12);
        }
    }
}

TEST_CASE("disc csv export") {
    realization real = sample_realization({2, 2.0, 1.0, 5}, 3);
    const std::string body = disc_csv(real);
    REQUIRE(body.rfind("s,dir_x,dir_y,ax,ay,bx,by\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : body)
        if (ch == '\n')
            ++lines;
    REQUIRE(lines == real.hyperplanes.size() + 1);

    realization empty = real;
    empty.hyperplanes.clear();
    REQUIRE(disc_csv(empty) == "s,dir_x,dir_y,ax,ay,bx,by\n");

    realization solid = sample_realization({3, 2.0, 1.0, 5}, 3);
    REQUIRE_THROWS_AS(disc_csv(solid), std::invalid_argument);

    const std::string path = temp_path("disc.csv");
    export_disc(real, path);
    REQUIRE(read_file(path) == body);
    std::remove(path.c_str());
}

TEST_CASE("campaign config validation") {
    campaign_config bad;
    bad.replications = 99;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.replications = 100;
    bad.d = 1;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.d = 2;
    REQUIRE_NOTHROW(bad.validate());
}

TEST_CASE("campaign results are independent of the thread count") {
    campaign_config cfg;
    cfg.d = 2;
    cfg.t = 1.0;
    cfg.r = 1.5;
    cfg.replications = 120;
    cfg.seed = 7;

    cfg.threads = 1;
    const auto rows1 = collect_functional_rows(cfg);
    cfg.threads = 4;
    const auto rows4 = collect_functional_rows(cfg);
    REQUIRE(rows1 == rows4);

    cfg.threads = 1;
    const auto comp1 = collect_component(cfg, 1);
    cfg.threads = 3;
    const auto comp3 = collect_component(cfg, 1);
    REQUIRE(comp1 == comp3);

    REQUIRE_THROWS_AS(collect_component(cfg, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(collect_component(cfg, -1), std::invalid_argument);
}

TEST_CASE("moment campaign report") {
    campaign_config cfg;
    cfg.d = 2;
    cfg.t = 1.0;
    cfg.r = 2.0;
    cfg.replications = 400;
    cfg.seed = 20240901;
    const moment_report rep = run_moment_campaign(cfg);

    const double vol = ball_volume(2, 2.0);
    REQUIRE(rep.analytic_mean[0] ==
            Catch::Approx(expectation(2, 0, 1.0, vol)).epsilon(1e-15));
    REQUIRE(rep.analytic_mean[1] ==
            Catch::Approx(expectation(2, 1, 1.0, vol)).epsilon(1e-15));
    REQUIRE(rep.analytic_cov[0][1] ==
            Catch::Approx(covariance(2, 0, 1, 1.0, 2.0).total).epsilon(1e-15));
    REQUIRE(rep.analytic_cov[0][1] == rep.analytic_cov[1][0]);

    for (int i = 0; i < 2; ++i) {
        REQUIRE(rep.mean_se[i] > 0.0);
        REQUIRE(std::fabs(rep.mean_z[i]) < 5.0);
        for (int j = 0; j < 2; ++j) {
            REQUIRE(rep.cov_se[i][j] > 0.0);
            REQUIRE(std::fabs(rep.cov_z[i][j]) < 6.0);
        }
    }
    REQUIRE(rep.sample_cov[0][1] == rep.sample_cov[1][0]);
}

TEST_CASE("clt cell diagnostics") {
    campaign_config cfg;
    cfg.d = 2;
    cfg.t = 1.0;
    cfg.r = 3.0;
    cfg.replications = 500;
    cfg.seed = 99;
    const clt_report rep = run_clt_cell(cfg, 1);
    REQUIRE(rep.ks > 0.0);
    REQUIRE(rep.ks < 0.2);
    REQUIRE(rep.skewness_se > 0.0);
    REQUIRE(rep.cum4_se > 0.0);
    REQUIRE(std::fabs(rep.skewness) < 1.0);
    REQUIRE(std::fabs(rep.cum4) < 2.0);

    // standardization uses the analytic mean and standard deviation
    const auto zs = standardized_component(cfg, 1);
    REQUIRE(zs.size() == 500);
    const double mean = expectation(2, 1, 1.0, ball_volume(2, 3.0));
    const double sd = std::sqrt(variance(2, 1, 1.0, 3.0));
    const auto raw = collect_component(cfg, 1);
    for (std::size_t k = 0; k < zs.size(); ++k)
        REQUIRE(zs[k] == Catch::Approx((raw[k] - mean) / sd).margin(1e-12));
}

TEST_CASE("multivariate campaign report") {
    campaign_config cfg;
    cfg.d = 2;
    cfg.t = 1.5;
    cfg.r = 4.0;
    cfg.replications = 300;
    cfg.seed = 4242;
    const multivariate_report rep = run_multivariate_campaign(cfg);

    const dmatrix target = asymptotic_covariance(2, 1.5);
    REQUIRE(rep.target == target);
    REQUIRE(rep.empirical.size() == 2);
    REQUIRE(rep.empirical[0][1] == rep.empirical[1][0]);
    REQUIRE(rep.frobenius_error > 0.0);
    REQUIRE(rep.frobenius_se > 0.0);
    REQUIRE(rep.marginal_ks.size() == 2);
    for (double ks : rep.marginal_ks) {
        REQUIRE(ks > 0.0);
        REQUIRE(ks < 0.25);
    }
    REQUIRE(rep.min_correlation <= 1.0);
    REQUIRE(rep.min_correlation > 0.5);

    campaign_config bad = cfg;
    bad.d = 5;
    REQUIRE_THROWS_AS(run_multivariate_campaign(bad), std::invalid_argument);
}

TEST_CASE("k function table") {
    k_params kp;
    kp.d = 2;
    kp.i = 0;
    kp.j = 0;
    kp.t = 1.5;
    const std::vector<double> rs = {0.5, 1.0, 1.5};
    const auto table = kfunction_table(kp, rs);
    REQUIRE(table.size() == 3);
    for (std::size_t k = 0; k < rs.size(); ++k) {
        REQUIRE(table[k].r == rs[k]);
        REQUIRE(table[k].k_analytic == k_function(kp, rs[k]));
        REQUIRE(table[k].g_analytic == pair_correlation(kp, rs[k]));
        REQUIRE_FALSE(table[k].has_empirical);
    }

    campaign_config cfg;
    cfg.d = 2;
    cfg.t = 1.5;
    cfg.r = 4.0;
    cfg.replications = 100;
    cfg.seed = 3;
    const auto est = kfunction_table_empirical(kp, {0.5, 1.0}, cfg, 1.5);
    REQUIRE(est.size() == 2);
    for (const auto& row : est) {
        REQUIRE(row.has_empirical);
        REQUIRE(row.k_empirical > 0.0);
        REQUIRE(row.k_stderr > 0.0);
        // loose agreement; the acceptance run does the calibrated version
        REQUIRE(std::fabs(row.k_empirical - row.k_analytic) <
                6.0 * row.k_stderr + 0.05 * row.k_analytic);
    }

    k_params kp1 = kp;
    kp1.i = 1;
    REQUIRE_THROWS_AS(kfunction_table_empirical(kp1, {0.5}, cfg, 1.5),
                      std::invalid_argument);
    campaign_config diff = cfg;
    diff.t = 1.0;
    REQUIRE_THROWS_AS(kfunction_table_empirical(kp, {0.5}, diff, 1.5),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(kfunction_table_empirical(kp, {0.5, 3.2}, cfg, 1.5),
                      std::invalid_argument);
}

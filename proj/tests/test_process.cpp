#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hypflats/process.hpp"

using namespace hypflats;

TEST_CASE("parameter validation") {
    process_params p{3, 2.0, 1.0, 42};
    REQUIRE_NOTHROW(p.validate());
    for (auto bad : {process_params{1, 2.0, 1.0, 0}, process_params{9, 2.0, 1.0, 0},
                     process_params{3, 0.0, 1.0, 0}, process_params{3, -1.0, 1.0, 0},
                     process_params{3, 16.0, 1.0, 0}, process_params{3, 2.0, 0.0, 0},
                     process_params{3, 2.0, -0.5, 0}})
        REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("hitting mass") {
    REQUIRE(hitting_mass(2, 2.0) == Catch::Approx(7.2537208156940375).epsilon(1e-15));
    REQUIRE(hitting_mass(3, 2.0) == Catch::Approx(15.644958598563876).epsilon(1e-15));
    REQUIRE(hitting_mass(4, 5.0) == Catch::Approx(272529.41918851708).epsilon(1e-14));
    REQUIRE(hitting_mass(5, 1.3) == Catch::Approx(9.9869512801571647).epsilon(1e-14));
    // d = 2 closed form: 2 sinh r
    for (double r : {0.5, 1.0, 3.0})
        REQUIRE(hitting_mass(2, r) ==
                Catch::Approx(2.0 * std::sinh(r)).epsilon(1e-15));
    REQUIRE(hitting_mass(2, 0.0) == 0.0);
}

TEST_CASE("distance sampling closed forms") {
    REQUIRE(sample_distance(3, 2.0, 0.0) == 0.0);
    REQUIRE(sample_distance(3, 2.0, 1.0) == 2.0);
    // d = 2: s = asinh(u sinh r)
    REQUIRE(sample_distance(2, 2.0, 0.5) ==
            Catch::Approx(1.3569444900743065).epsilon(1e-15));
    REQUIRE(sample_distance(3, 2.0, 0.5) ==
            Catch::Approx(1.6074402534188891).epsilon(1e-14));
    REQUIRE(sample_distance(4, 5.0, 0.25) ==
            Catch::Approx(4.5376949173263474).epsilon(1e-14));
    REQUIRE(sample_distance(4, 5.0, 0.75) ==
            Catch::Approx(4.90407718774203).epsilon(1e-14));
    REQUIRE(sample_distance(5, 3.0, 0.9) ==
            Catch::Approx(2.97338325135466).epsilon(1e-14));

    REQUIRE_THROWS_AS(sample_distance(3, 2.0, -0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_distance(3, 2.0, 1.1), std::invalid_argument);
}

TEST_CASE("distance sampling inverts the radial distribution") {
    // |F(s(u)) - u| stays below the 1e-12 contract across all dimensions,
    // including extreme radii and quantiles
    for (int d = 2; d <= 8; ++d)
        for (double r : {0.5, 2.0, 8.0, 15.0})
            for (double u : {1e-9, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0 - 1e-9}) {
                const double s = sample_distance(d, r, u);
                REQUIRE(s >= 0.0);
                REQUIRE(s <= r);
                const double f = cosh_power_integral(d - 1, s) /
                                 cosh_power_integral(d - 1, r);
                REQUIRE(f == Catch::Approx(u).margin(1e-12));
            }
}

TEST_CASE("distance marginal passes a KS test") {
    const int d = 3;
    const double r = 2.0;
    const int n = 100000;
    rng_stream rng(555, 0);
    std::vector<double> fs(n);
    const double denom = cosh_power_integral(d - 1, r);
    for (int k = 0; k < n; ++k) {
        const double s = sample_distance(d, r, rng.uniform());
        fs[k] = cosh_power_integral(d - 1, s) / denom;
    }
    std::sort(fs.begin(), fs.end());
    double ks = 0.0;
    for (int k = 0; k < n; ++k) {
        ks = std::max(ks, fs[k] - static_cast<double>(k) / n);
        ks = std::max(ks, static_cast<double>(k + 1) / n - fs[k]);
    }
    REQUIRE(ks < 0.01);
}

TEST_CASE("realizations are deterministic in seed and stream") {
    const process_params p{3, 2.0, 1.5, 77};
    const realization a = sample_realization(p, 4);
    const realization b = sample_realization(p, 4);
    REQUIRE(a.hyperplanes.size() == b.hyperplanes.size());
    for (std::size_t k = 0; k < a.hyperplanes.size(); ++k) {
        REQUIRE(a.hyperplanes[k].s == b.hyperplanes[k].s);
        REQUIRE(a.hyperplanes[k].normal == b.hyperplanes[k].normal);
    }
    const realization c = sample_realization(p, 5);
    REQUIRE((c.hyperplanes.size() != a.hyperplanes.size() ||
             c.hyperplanes[0].s != a.hyperplanes[0].s));
}

TEST_CASE("realization geometry is well formed") {
    const process_params p{4, 3.0, 0.8, 11};
    const realization real = sample_realization(p, 0);
    REQUIRE_FALSE(real.hyperplanes.empty());
    for (const hyperplane& h : real.hyperplanes) {
        REQUIRE(h.s >= 0.0);
        REQUIRE(h.s <= p.r);
        REQUIRE(lorentz_inner(h.normal, h.normal) ==
                Catch::Approx(1.0).epsilon(1e-12));
        double norm2 = 0.0;
        for (double c : h.dir)
            norm2 += c * c;
        REQUIRE(norm2 == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("hyperplane counts follow the hitting intensity") {
    const process_params p{3, 2.0, 1.0, 202};
    const double mean = p.t * hitting_mass(p.d, p.r);
    const int reps = 400;
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < reps; ++k) {
        const auto n = static_cast<double>(
            sample_realization(p, static_cast<std::uint64_t>(k)).hyperplanes.size());
        s1 += n;
        s2 += n * n;
    }
    const double m = s1 / reps;
    const double var = s2 / reps - m * m;
    REQUIRE(std::fabs(m - mean) < 5.0 * std::sqrt(mean / reps));
    REQUIRE(var / mean == Catch::Approx(1.0).margin(0.35));
}

TEST_CASE("first-order sums match the intensity integral") {
    // E sum e^{-s_h} = t * 2 int_0^r e^{-s} cosh^{d-1}(s) ds at d = 3, r = 2
    const double expected = 4.2254463075326014;
    const process_params p{3, 2.0, 1.0, 313};
    const int reps = 3000;
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < reps; ++k) {
        const double v =
            sum_over_distances(p, static_cast<std::uint64_t>(k),
                               [](double s) { return std::exp(-s); });
        s1 += v;
        s2 += v * v;
    }
    const double m = s1 / reps;
    const double se = std::sqrt((s2 / reps - m * m) / reps);
    REQUIRE(std::fabs(m - expected) < 5.0 * se);

    // the realization-based path draws from the same distribution
    double m2 = 0.0;
    for (int k = 0; k < reps; ++k) {
        double sum = 0.0;
        for (const hyperplane& h :
             sample_realization(p, static_cast<std::uint64_t>(k + reps))
                 .hyperplanes)
            sum += std::exp(-h.s);
        m2 += sum;
    }
    m2 /= reps;
    REQUIRE(std::fabs(m2 - expected) < 5.0 * se);
}

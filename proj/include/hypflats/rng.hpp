#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hypflats {

// Philox4x64 with 10 rounds: a counter-based generator, so independent
// replication streams are just independent (key, counter) choices and the
// sequence for a given key is reproducible regardless of thread scheduling.
// Constants and output order follow the Random123 reference; output matches
// numpy's PhiloxBitGenerator raw stream for equal counter/key words.
class philox4x64 {
public:
    philox4x64(std::uint64_t key0, std::uint64_t key1)
        : key0_(key0), key1_(key1) {}

    void set_counter(std::uint64_t c0, std::uint64_t c1,
                     std::uint64_t c2, std::uint64_t c3) {
        ctr_[0] = c0;
        ctr_[1] = c1;
        ctr_[2] = c2;
        ctr_[3] = c3;
        idx_ = 4;
    }

    // the counter is bumped before each block, matching numpy's convention
    std::uint64_t next() {
        if (idx_ == 4) {
            advance_counter();
            block(ctr_, key0_, key1_, buf_);
            idx_ = 0;
        }
        return buf_[idx_++];
    }

    static void block(const std::uint64_t ctr[4], std::uint64_t k0,
                      std::uint64_t k1, std::uint64_t out[4]) {
        const std::uint64_t m0 = 0xD2E7470EE14C6C93ULL;
        const std::uint64_t m1 = 0xCA5A826395121157ULL;
        const std::uint64_t w0 = 0x9E3779B97F4A7C15ULL;
        const std::uint64_t w1 = 0xBB67AE8584CAA73BULL;
        std::uint64_t x0 = ctr[0], x1 = ctr[1], x2 = ctr[2], x3 = ctr[3];
        for (int round = 0; round < 10; ++round) {
            std::uint64_t hi0, lo0, hi1, lo1;
            mulhilo(m0, x0, hi0, lo0);
            mulhilo(m1, x2, hi1, lo1);
            std::uint64_t y0 = hi1 ^ x1 ^ k0;
            std::uint64_t y1 = lo1;
            std::uint64_t y2 = hi0 ^ x3 ^ k1;
            std::uint64_t y3 = lo0;
            x0 = y0;
            x1 = y1;
            x2 = y2;
            x3 = y3;
            k0 += w0;
            k1 += w1;
        }
        out[0] = x0;
        out[1] = x1;
        out[2] = x2;
        out[3] = x3;
    }

private:
    static void mulhilo(std::uint64_t a, std::uint64_t b,
                        std::uint64_t& hi, std::uint64_t& lo) {
        __uint128_t p = static_cast<__uint128_t>(a) * b;
        hi = static_cast<std::uint64_t>(p >> 64);
        lo = static_cast<std::uint64_t>(p);
    }

    void advance_counter() {
        if (++ctr_[0] == 0)
            if (++ctr_[1] == 0)
                if (++ctr_[2] == 0)
                    ++ctr_[3];
    }

    std::uint64_t key0_, key1_;
    std::uint64_t ctr_[4] = {0, 0, 0, 0};
    std::uint64_t buf_[4] = {0, 0, 0, 0};
    int idx_ = 4;
};

// One replication stream: Philox keyed by (seed, stream_id).  Provides the
// scalar distributions the sampler needs; each stream is self-contained so
// replications can run on any thread with identical results.
class rng_stream {
public:
    rng_stream(std::uint64_t seed, std::uint64_t stream_id)
        : gen_(seed, stream_id) {}

    std::uint64_t next_u64() { return gen_.next(); }

    // uniform on [0,1) with 53-bit mantissa
    double uniform() {
        return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; the second value of each pair is cached
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        // map 0 -> 1 so the log stays finite; preserves uniformity on (0,1]
        u1 = 1.0 - u1;
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        cached_ = rad * std::sin(ang);
        have_cached_ = true;
        return rad * std::cos(ang);
    }

    // Poisson count: exact inversion for small means, PTRD rejection
    // (Hoermann's transformed rejection with squeeze) for large ones.
    long poisson(double mean) {
        if (mean < 0.0)
            throw std::invalid_argument("poisson: negative mean");
        if (mean == 0.0)
            return 0;
        if (mean < 30.0)
            return poisson_inversion(mean);
        return poisson_ptrd(mean);
    }

    // uniform direction on S^{d-1} by normalizing a Gaussian vector
    void direction(int d, double* out) {
        while (true) {
            double norm2 = 0.0;
            for (int k = 0; k < d; ++k) {
                out[k] = gaussian();
                norm2 += out[k] * out[k];
            }
            if (norm2 > 1e-300) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (int k = 0; k < d; ++k)
                    out[k] *= inv;
                return;
            }
        }
    }

private:
    long poisson_inversion(double mean) {
        const double p0 = std::exp(-mean);
        double u = uniform();
        double p = p0, cum = p0;
        long k = 0;
        while (u > cum) {
            ++k;
            p *= mean / static_cast<double>(k);
            cum += p;
            if (k > 2000) // cum has saturated numerically; cannot happen for mean < 30
                break;
        }
        return k;
    }

    long poisson_ptrd(double mean) {
        const double smu = std::sqrt(mean);
        const double b = 0.931 + 2.53 * smu;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);

        while (true) {
            double u, v = uniform();
            if (v <= 0.86 * v_r) {
                u = v / v_r - 0.43;
                return static_cast<long>(std::floor(
                    (2.0 * a / (0.5 - std::fabs(u)) + b) * u + mean + 0.445));
            }
            if (v >= v_r) {
                u = uniform() - 0.5;
            } else {
                u = v / v_r - 0.93;
                u = ((u < 0.0) ? -0.5 : 0.5) - u;
                v = uniform() * v_r;
            }
            const double us = 0.5 - std::fabs(u);
            if (us < 0.013 && v > us)
                continue;
            const double k = std::floor((2.0 * a / us + b) * u + mean + 0.445);
            v = v * inv_alpha / (a / (us * us) + b);
            const double log_sqrt_2pi = 0.91893853320467267;
            if (k >= 10.0) {
                if (std::log(v * smu) <=
                    (k + 0.5) * std::log(mean / k) - mean - log_sqrt_2pi + k -
                        (1.0 / 12.0 - 1.0 / (360.0 * k * k)) / k)
                    return static_cast<long>(k);
            } else if (k >= 0.0) {
                if (std::log(v) <= k * std::log(mean) - mean - std::lgamma(k + 1.0))
                    return static_cast<long>(k);
            }
        }
    }

    philox4x64 gen_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace hypflats

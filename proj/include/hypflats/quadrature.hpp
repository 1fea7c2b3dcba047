#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hypflats {

struct quad_result {
    double value = 0.0;
    double abs_err = 0.0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

// Gauss 7 / Kronrod 15 pair on [-1,1].  Nodes and weights from QUADPACK.
inline constexpr double k15_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0};
inline constexpr double k15_weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double g7_weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
void g7k15(const F& f, double a, double b, double& value, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double fc = f(mid);
    double resg = g7_weights[3] * fc;
    double resk = k15_weights[7] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * k15_nodes[j];
        const double fsum = f(mid - dx) + f(mid + dx);
        resk += k15_weights[j] * fsum;
        if (j % 2 == 1)
            resg += g7_weights[(j - 1) / 2] * fsum;
    }
    value = resk * half;
    // QUADPACK-style error heuristic: |K15-G7| sharpened by a 3/2 power.
    double raw = std::fabs((resk - resg) * half);
    err = raw;
    double scale = 200.0 * raw;
    if (scale < 1.0)
        err = raw * std::sqrt(scale);
}

} // namespace detail

// Adaptive G7K15 on [a,b]: repeatedly bisect the interval with the largest
// error estimate until the summed estimate meets the tolerance.  Integrands
// here are smooth, so plain bisection converges quickly.
template <class F>
quad_result integrate(const F& f, double a, double b,
                      double rel_tol = 1e-10, double abs_tol = 1e-14,
                      int max_intervals = 4000) {
    quad_result out;
    if (a == b) {
        out.converged = true;
        return out;
    }

    struct segment {
        double a, b, value, err;
    };
    std::vector<segment> segs;
    segment s0{a, b, 0.0, 0.0};
    detail::g7k15(f, a, b, s0.value, s0.err);
    segs.push_back(s0);

    while (true) {
        double total = 0.0, total_err = 0.0, comp = 0.0;
        std::size_t worst = 0;
        for (std::size_t k = 0; k < segs.size(); ++k) {
            // Kahan summation keeps the accumulated value stable when many
            // segments of very different magnitude are combined.
            double y = segs[k].value - comp;
            double t = total + y;
            comp = (t - total) - y;
            total = t;
            total_err += segs[k].err;
            if (segs[k].err > segs[worst].err)
                worst = k;
        }
        if (total_err <= std::max(abs_tol, rel_tol * std::fabs(total))) {
            out.value = total;
            out.abs_err = total_err;
            out.intervals = static_cast<int>(segs.size());
            out.converged = true;
            return out;
        }
        if (static_cast<int>(segs.size()) >= max_intervals) {
            out.value = total;
            out.abs_err = total_err;
            out.intervals = static_cast<int>(segs.size());
            out.converged = false;
            return out;
        }
        segment left, right;
        const segment w = segs[worst];
        const double mid = 0.5 * (w.a + w.b);
        left.a = w.a;
        left.b = mid;
        right.a = mid;
        right.b = w.b;
        detail::g7k15(f, left.a, left.b, left.value, left.err);
        detail::g7k15(f, right.a, right.b, right.value, right.err);
        segs[worst] = left;
        segs.push_back(right);
    }
}

template <class F>
double integrate_or_throw(const F& f, double a, double b,
                          double rel_tol = 1e-10, double abs_tol = 1e-14) {
    quad_result q = integrate(f, a, b, rel_tol, abs_tol);
    if (!q.converged)
        throw std::runtime_error("quadrature did not converge: achieved abs error " +
                                 std::to_string(q.abs_err) + " on " +
                                 std::to_string(q.intervals) + " intervals");
    return q.value;
}

} // namespace hypflats

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hypflats/io.hpp"
#include "hypflats/process.hpp"

namespace hypflats {

// A line of the plane drawn in the Poincare disc: the chord between its two
// ideal boundary points.
struct disc_chord {
    std::array<double, 2> a, b;
};

// Ideal endpoints of a hyperbolic line with unit normal direction u at
// distance s: the null directions (1, w) with <(1,w), n> = 0 give
// w = tanh(s) u +- sech(s) u_perp, which lies exactly on the unit circle.
inline disc_chord ideal_endpoints(const hyperplane& h) {
    if (h.dir.size() != 2)
        throw std::invalid_argument("ideal_endpoints: line must be planar");
    const double th = std::tanh(h.s);
    const double se = 1.0 / std::cosh(h.s);
    const double ux = h.dir[0], uy = h.dir[1];
    disc_chord c;
    c.a = {th * ux - se * uy, th * uy + se * ux};
    c.b = {th * ux + se * uy, th * uy - se * ux};
    return c;
}

// CSV body for a planar realization: one row per line with its sampled
// parameters and the chord endpoints, ready for external plotting.
inline std::string disc_csv(const realization& real) {
    if (real.params.d != 2)
        throw std::invalid_argument("disc_csv: only d=2 realizations");
    std::string body = "s,dir_x,dir_y,ax,ay,bx,by\n";
    for (const hyperplane& h : real.hyperplanes) {
        const disc_chord c = ideal_endpoints(h);
        body += g17(h.s) + ',' + g17(h.dir[0]) + ',' + g17(h.dir[1]) + ',' +
                g17(c.a[0]) + ',' + g17(c.a[1]) + ',' + g17(c.b[0]) + ',' +
                g17(c.b[1]) + '\n';
    }
    return body;
}

inline void export_disc(const realization& real, const std::string& path) {
    write_text_file(path, disc_csv(real));
}

} // namespace hypflats

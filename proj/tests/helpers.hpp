#pragma once

// Shared generators for the test suites.

#include <random>

#include "satde/density.hpp"

namespace satde::testing {

// Random symmetric density: random positive-side masses mirrored through the
// symmetry identity, optional +inf atom, supported within |x| <= max_x.
inline QuantizedDensity random_symmetric(std::mt19937_64& rng, const Grid& g = Grid{},
                                         double max_x = 12.0, bool allow_inf = true) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<int> natoms(1, 6);
    QuantizedDensity d(g);
    int c = g.half_bins();
    int max_i = std::min(c, (int)(max_x / g.delta));
    int n = natoms(rng);
    for (int k = 0; k < n; ++k) {
        int i = 1 + (int)(uni(rng) * (max_i - 1));
        double m = 0.05 + uni(rng);
        double x = i * g.delta;
        d.interior[c + i] += m;
        d.interior[c - i] += m * std::exp(-x);
    }
    if (uni(rng) < 0.3) d.interior[c] += uni(rng) * 0.2;
    if (allow_inf && uni(rng) < 0.3) d.inf_pos += uni(rng);
    d.scale(1.0 / d.total_mass());
    d.symmetric = true;
    return d;
}

// Random density without symmetry constraints; optionally saturated.
inline QuantizedDensity random_density(std::mt19937_64& rng, const Grid& g = Grid{},
                                       double max_x = 12.0) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<int> natoms(2, 8);
    QuantizedDensity d(g);
    int c = g.half_bins();
    int max_i = std::min(c, (int)(max_x / g.delta));
    int n = natoms(rng);
    for (int k = 0; k < n; ++k) {
        int i = (int)(uni(rng) * (2 * max_i + 1)) - max_i;
        d.interior[c + i] += 0.05 + uni(rng);
    }
    if (uni(rng) < 0.25) d.inf_pos += 0.3 * uni(rng);
    d.scale(1.0 / d.total_mass());
    if (uni(rng) < 0.4) {
        double K = (2 + (int)(uni(rng) * 6)) * 1.0;  // integer K in [2, 7]
        d = saturate(d, K);
    }
    return d;
}

}  // namespace satde::testing

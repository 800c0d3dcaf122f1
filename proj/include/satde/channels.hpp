#pragma once

// BMS channel families (BEC, BSC, BIAWGN) as quantized L-densities,
// ordered by degradation and addressable by entropy.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "satde/density.hpp"

namespace satde {

enum class ChannelKind { BEC, BSC, BIAWGN };

inline const char* to_string(ChannelKind k) {
    switch (k) {
        case ChannelKind::BEC: return "BEC";
        case ChannelKind::BSC: return "BSC";
        case ChannelKind::BIAWGN: return "BIAWGN";
    }
    return "?";
}

inline ChannelKind channel_kind_from_string(const std::string& s) {
    if (s == "BEC" || s == "bec") return ChannelKind::BEC;
    if (s == "BSC" || s == "bsc") return ChannelKind::BSC;
    if (s == "BIAWGN" || s == "biawgn" || s == "AWGN" || s == "awgn") return ChannelKind::BIAWGN;
    throw std::invalid_argument("unknown channel family: " + s);
}

struct ChannelFamily {
    ChannelKind kind = ChannelKind::BSC;
    double param_lo = 0.0;
    double param_hi = 0.0;
    std::optional<double> support_clip;  // symmetric-saturate the channel at K''

    static ChannelFamily make(ChannelKind k, std::optional<double> clip = std::nullopt) {
        ChannelFamily f;
        f.kind = k;
        f.support_clip = clip;
        switch (k) {
            case ChannelKind::BEC:
                f.param_lo = 0.0;
                f.param_hi = 1.0;
                break;
            case ChannelKind::BSC:
                f.param_lo = 0.0;
                f.param_hi = 0.5;
                break;
            case ChannelKind::BIAWGN:
                f.param_lo = 0.05;
                f.param_hi = 20.0;
                break;
        }
        return f;
    }
};

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline QuantizedDensity make_channel(const ChannelFamily& fam, double sigma, const Grid& g = Grid{}) {
    if (sigma < fam.param_lo - 1e-12 || sigma > fam.param_hi + 1e-12)
        throw std::invalid_argument("channel parameter out of range");
    QuantizedDensity c(g);
    switch (fam.kind) {
        case ChannelKind::BEC: {
            c = delta_at(g, kInf);
            c.scale(1.0 - sigma);
            c.interior[g.half_bins()] += sigma;
            c.symmetric = true;
            break;
        }
        case ChannelKind::BSC: {
            double eps = sigma;
            if (eps == 0.0) {
                c = delta_at(g, kInf);
                break;
            }
            if (eps >= 0.5) {
                c = delta_at(g, 0.0);
                break;
            }
            double z = std::log((1.0 - eps) / eps);
            // round magnitude to the nearest grid point, keep the density two-atom exact
            double zg = std::min(g.support, std::round(z / g.delta) * g.delta);
            int c0 = g.half_bins();
            int k = static_cast<int>(std::llround(zg / g.delta));
            c.interior[c0 + k] = 1.0 - eps;
            c.interior[c0 - k] = eps;
            c.symmetric = true;
            break;
        }
        case ChannelKind::BIAWGN: {
            // L-density is N(2/sigma^2, 4/sigma^2); integrate each bin exactly,
            // folding the tails into the end bins
            double mean = 2.0 / (sigma * sigma);
            double sd = 2.0 / sigma;
            int n = g.size();
            double prev = 0.0;
            for (int i = 0; i < n; ++i) {
                double hi_edge = (i == n - 1) ? kInf : g.x_of(i) + 0.5 * g.delta;
                double cdf = (i == n - 1) ? 1.0 : normal_cdf((hi_edge - mean) / sd);
                c.interior[i] = cdf - prev;
                prev = cdf;
            }
            c.symmetric = true;
            break;
        }
    }
    if (fam.support_clip) c = saturate_sym(c, *fam.support_clip);
    return c;
}

// Invert H(c_sigma) = h by monotone bisection.
inline double entropy_to_parameter(const ChannelFamily& fam, double h, const Grid& g = Grid{}) {
    double h_lo = entropy(make_channel(fam, fam.param_lo, g));
    double h_hi = entropy(make_channel(fam, fam.param_hi, g));
    if (h < h_lo - 1e-9 || h > h_hi + 1e-9)
        throw std::invalid_argument("entropy target not attainable by family");
    double lo = fam.param_lo, hi = fam.param_hi;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double hm = entropy(make_channel(fam, mid, g));
        if (std::abs(hm - h) < 1e-6) return mid;
        if (hm < h)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace satde

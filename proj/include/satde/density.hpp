#pragma once

// L-density representation on a uniform LLR grid with exact atoms at the
// saturation rails and at +-infinity, plus the standard functionals and
// the variable/check node convolutions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace satde {

inline constexpr double kMassTol = 1e-12;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform grid on [-support, support] with spacing delta.
struct Grid {
    double delta = 1.0 / 16.0;
    double support = 64.0;

    int half_bins() const { return static_cast<int>(std::llround(support / delta)); }
    int size() const { return 2 * half_bins() + 1; }
    double x_of(int i) const { return (i - half_bins()) * delta; }

    bool aligned(double v, double tol = 1e-9) const {
        if (!std::isfinite(v)) return false;
        double q = v / delta;
        return std::abs(q - std::llround(q)) < tol;
    }
    int index_of(double v) const {
        if (!aligned(v) || std::abs(v) > support + 1e-9)
            throw std::invalid_argument("value not on grid");
        return half_bins() + static_cast<int>(std::llround(v / delta));
    }
    bool operator==(const Grid& o) const {
        return delta == o.delta && support == o.support;
    }
};

// Stable boxplus: 2*atanh(tanh(x/2)*tanh(y/2)).
inline double boxplus(double x, double y) {
    if (x == 0.0 || y == 0.0) return 0.0;
    if (std::isinf(x)) return std::signbit(x) ? -y : y;
    if (std::isinf(y)) return std::signbit(y) ? -x : x;
    double ax = std::abs(x), ay = std::abs(y);
    double s = (std::signbit(x) == std::signbit(y)) ? 1.0 : -1.0;
    double mag = std::min(ax, ay) + std::log1p(std::exp(-(ax + ay))) -
                 std::log1p(std::exp(-std::abs(ax - ay)));
    return s * mag;
}

// log2(1 + e^{-x}), stable for large |x|.
inline double entropy_term(double x) {
    static const double inv_ln2 = 1.0 / std::log(2.0);
    if (x == kInf) return 0.0;
    if (x == -kInf) return kInf;
    if (x > 0) return std::log1p(std::exp(-x)) * inv_ln2;
    return (-x + std::log1p(std::exp(x))) * inv_ln2;
}

class QuantizedDensity {
  public:
    Grid grid;
    std::vector<double> interior;   // mass per grid point
    double rail_mag = 0.0;          // saturation atoms at +-rail_mag (0 = none)
    double rail_neg = 0.0;
    double rail_pos = 0.0;
    double inf_neg = 0.0;
    double inf_pos = 0.0;
    bool symmetric = false;
    double overflow_folded = 0.0;   // mass folded onto the grid edge

    explicit QuantizedDensity(const Grid& g = Grid{}) : grid(g), interior(g.size(), 0.0) {}

    bool has_rail() const { return rail_mag > 0.0 && (rail_neg > 0.0 || rail_pos > 0.0); }

    double interior_mass() const {
        double s = 0.0;
        for (double m : interior) s += m;
        return s;
    }
    double total_mass() const {
        return interior_mass() + rail_neg + rail_pos + inf_neg + inf_pos;
    }

    double bhattacharyya() const {
        if (inf_neg > 0.0) return kInf;
        double s = 0.0;
        for (int i = 0; i < (int)interior.size(); ++i)
            if (interior[i] != 0.0) s += interior[i] * std::exp(-0.5 * grid.x_of(i));
        s += rail_neg * std::exp(0.5 * rail_mag) + rail_pos * std::exp(-0.5 * rail_mag);
        return s;  // +inf atom contributes 0
    }

    double entropy() const {
        if (inf_neg > 0.0) return kInf;
        double s = 0.0;
        for (int i = 0; i < (int)interior.size(); ++i)
            if (interior[i] != 0.0) s += interior[i] * entropy_term(grid.x_of(i));
        s += rail_neg * entropy_term(-rail_mag) + rail_pos * entropy_term(rail_mag);
        return s;
    }

    double error_probability() const {
        double s = inf_neg + rail_neg;
        int c = grid.half_bins();
        for (int i = 0; i < c; ++i) s += interior[i];
        s += 0.5 * interior[c];
        return s;
    }

    // Deposit mass at x: exact bin when aligned, otherwise split between the
    // two neighbors preserving total mass and first moment. Beyond the grid
    // edge the mass folds onto the extreme point.
    void add_point(double x, double m) {
        if (m == 0.0) return;
        if (x == kInf) { inf_pos += m; return; }
        if (x == -kInf) { inf_neg += m; return; }
        int c = grid.half_bins();
        double pos = x / grid.delta + c;
        if (pos <= 0.0) {
            interior.front() += m;
            if (pos < 0.0) overflow_folded += m;
            return;
        }
        if (pos >= 2.0 * c) {
            interior.back() += m;
            if (pos > 2.0 * c) overflow_folded += m;
            return;
        }
        int lo = static_cast<int>(std::floor(pos));
        double w = pos - lo;
        // the zero bin is reserved for exact erasures: rounding nonzero mass
        // onto it would fabricate erasures/sign flips, so sub-bin values
        // round away from zero instead of splitting or snapping
        if (x != 0.0 && lo == c) {
            interior[c + 1] += m;
        } else if (x != 0.0 && lo == c - 1 && w > 0.0) {
            interior[c - 1] += m;
        } else if (w < 1e-9) {
            interior[lo] += m;
        } else if (w > 1.0 - 1e-9) {
            interior[lo + 1] += m;
        } else {
            interior[lo] += m * (1.0 - w);
            interior[lo + 1] += m * w;
        }
    }

    void add_rail(double mag, double neg, double pos) {
        if (neg == 0.0 && pos == 0.0) return;
        if (rail_mag == 0.0 || (rail_neg == 0.0 && rail_pos == 0.0)) {
            rail_mag = mag;
            rail_neg += neg;
            rail_pos += pos;
        } else if (std::abs(rail_mag - mag) < 1e-12) {
            rail_neg += neg;
            rail_pos += pos;
        } else {
            // incompatible rail magnitudes: fall back to the grid
            add_point(-mag, neg);
            add_point(mag, pos);
        }
    }

    void scale(double s) {
        for (double& m : interior) m *= s;
        rail_neg *= s;
        rail_pos *= s;
        inf_neg *= s;
        inf_pos *= s;
    }

    // this += w * o (used for degree-distribution mixtures)
    void accumulate(const QuantizedDensity& o, double w) {
        if (!(grid == o.grid)) throw std::invalid_argument("grid mismatch");
        for (int i = 0; i < (int)interior.size(); ++i) interior[i] += w * o.interior[i];
        inf_neg += w * o.inf_neg;
        inf_pos += w * o.inf_pos;
        if (o.has_rail()) add_rail(o.rail_mag, w * o.rail_neg, w * o.rail_pos);
    }

    QuantizedDensity reflected() const {
        QuantizedDensity r(grid);
        int n = grid.size();
        for (int i = 0; i < n; ++i) r.interior[i] = interior[n - 1 - i];
        r.rail_mag = rail_mag;
        r.rail_neg = rail_pos;
        r.rail_pos = rail_neg;
        r.inf_neg = inf_pos;
        r.inf_pos = inf_neg;
        return r;
    }

    void validate() const {
        double t = total_mass();
        if (std::abs(t - 1.0) > 1e-10) throw std::runtime_error("mass not conserved");
        for (double m : interior)
            if (m < -1e-15) throw std::runtime_error("negative mass");
        if (rail_neg < -1e-15 || rail_pos < -1e-15 || inf_neg < -1e-15 || inf_pos < -1e-15)
            throw std::runtime_error("negative atom mass");
    }

    // Discrete analogue of the symmetry identity a(-x) = e^{-x} a(x).
    bool symmetry_identity_holds(double tol = 1e-9) const {
        int c = grid.half_bins();
        for (int i = 1; i <= c; ++i) {
            double x = i * grid.delta;
            if (std::abs(interior[c - i] - std::exp(-x) * interior[c + i]) > tol) return false;
        }
        if (has_rail()) {
            if (std::abs(rail_neg - std::exp(-rail_mag) * rail_pos) > tol) return false;
        }
        if (inf_neg > tol) return false;
        return true;
    }
};

inline QuantizedDensity delta_at(const Grid& g, double z) {
    QuantizedDensity d(g);
    if (z == kInf) {
        d.inf_pos = 1.0;
        d.symmetric = true;
    } else if (z == -kInf) {
        d.inf_neg = 1.0;
    } else {
        d.interior[g.index_of(z)] = 1.0;
        d.symmetric = (z == 0.0);
    }
    return d;
}

// D(p, z) = p*Delta_{-z} + (1-p)*Delta_{z}, stored as exact rail atoms.
inline QuantizedDensity two_atom(const Grid& g, double p, double z) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p outside [0,1]");
    if (z < 0.0) throw std::invalid_argument("z must be >= 0");
    QuantizedDensity d(g);
    if (z == 0.0) {
        d.interior[g.half_bins()] = 1.0;
        d.symmetric = true;
        return d;
    }
    if (z == kInf) {
        d.inf_neg = p;
        d.inf_pos = 1.0 - p;
        d.symmetric = (p == 0.0);
        return d;
    }
    d.rail_mag = z;
    d.rail_neg = p;
    d.rail_pos = 1.0 - p;
    double psym = std::exp(-z) / (1.0 + std::exp(-z));
    d.symmetric = std::abs(p - psym) <= 1e-12;
    return d;
}

inline double bhattacharyya(const QuantizedDensity& a) { return a.bhattacharyya(); }
inline double entropy(const QuantizedDensity& a) { return a.entropy(); }
inline double error_probability(const QuantizedDensity& a) { return a.error_probability(); }

namespace detail {

// Precomputed boxplus output bins for all magnitude pairs of a grid.
class BoxTable {
  public:
    struct Cell {
        int32_t lo;
        double w;
    };

    static const BoxTable& get(const Grid& g) {
        static std::map<std::pair<double, double>, BoxTable> cache;
        static std::mutex mu;
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_pair(g.delta, g.support);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, BoxTable(g)).first;
        return it->second;
    }

    const Cell& at(int mi, int mj) const {
        if (mi > mj) std::swap(mi, mj);
        return cells_[(size_t)mj * (mj + 1) / 2 + mi];
    }

  private:
    explicit BoxTable(const Grid& g) {
        int m = g.half_bins() + 1;
        cells_.resize((size_t)m * (m + 1) / 2);
        for (int mj = 0; mj < m; ++mj) {
            for (int mi = 0; mi <= mj; ++mi) {
                double z = boxplus(mi * g.delta, mj * g.delta);
                double pos = z / g.delta;
                int lo = static_cast<int>(std::floor(pos));
                double w = pos - lo;
                if (w < 1e-9) {
                    w = 0.0;
                } else if (w > 1.0 - 1e-9) {
                    ++lo;
                    w = 0.0;
                }
                // only a zero input yields a zero output: nonzero outputs
                // round away from the erasure bin rather than onto it
                if (mi > 0 && mj > 0 && lo == 0) {
                    lo = 1;
                    w = 0.0;
                }
                cells_[(size_t)mj * (mj + 1) / 2 + mi] = Cell{lo, w};
            }
        }
    }

    std::vector<Cell> cells_;
};

struct SparseBin {
    int idx;
    double mass;
};

inline std::vector<SparseBin> nonzero_bins(const QuantizedDensity& d) {
    std::vector<SparseBin> out;
    for (int i = 0; i < (int)d.interior.size(); ++i)
        if (d.interior[i] != 0.0) out.push_back({i, d.interior[i]});
    return out;
}

}  // namespace detail

// Variable-node convolution: distribution of Z_a + Z_b.
inline QuantizedDensity var_convolve(const QuantizedDensity& a, const QuantizedDensity& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("grid mismatch");
    QuantizedDensity r(a.grid);
    r.symmetric = a.symmetric && b.symmetric;

    double fin_a = 1.0 - a.inf_pos - a.inf_neg;
    double fin_b = 1.0 - b.inf_pos - b.inf_neg;
    r.inf_pos = a.inf_pos * b.inf_pos + a.inf_pos * fin_b + fin_a * b.inf_pos;
    r.inf_neg = a.inf_neg * b.inf_neg + a.inf_neg * fin_b + fin_a * b.inf_neg;
    // +inf + -inf resolves to 0
    int c = a.grid.half_bins();
    r.interior[c] += a.inf_pos * b.inf_neg + a.inf_neg * b.inf_pos;

    auto nza = detail::nonzero_bins(a);
    auto nzb = detail::nonzero_bins(b);
    int last = 2 * c;
    for (const auto& ia : nza) {
        for (const auto& jb : nzb) {
            int k = ia.idx + jb.idx - c;
            double m = ia.mass * jb.mass;
            if (k <= 0) {
                r.interior[0] += m;
                if (k < 0) r.overflow_folded += m;
            } else if (k >= last) {
                r.interior[last] += m;
                if (k > last) r.overflow_folded += m;
            } else {
                r.interior[k] += m;
            }
        }
    }
    if (a.has_rail()) {
        for (const auto& jb : nzb) {
            double x = a.grid.x_of(jb.idx);
            r.add_point(x + a.rail_mag, a.rail_pos * jb.mass);
            r.add_point(x - a.rail_mag, a.rail_neg * jb.mass);
        }
    }
    if (b.has_rail()) {
        for (const auto& ia : nza) {
            double x = a.grid.x_of(ia.idx);
            r.add_point(x + b.rail_mag, ia.mass * b.rail_pos);
            r.add_point(x - b.rail_mag, ia.mass * b.rail_neg);
        }
    }
    if (a.has_rail() && b.has_rail()) {
        r.add_point(a.rail_mag + b.rail_mag, a.rail_pos * b.rail_pos);
        r.add_point(a.rail_mag - b.rail_mag, a.rail_pos * b.rail_neg);
        r.add_point(-a.rail_mag + b.rail_mag, a.rail_neg * b.rail_pos);
        r.add_point(-a.rail_mag - b.rail_mag, a.rail_neg * b.rail_neg);
    }
    return r;
}

// Check-node convolution: distribution of boxplus(Z_a, Z_b). Exact rail atoms
// of both inputs combine into an exact rail atom of the output.
inline QuantizedDensity chk_convolve(const QuantizedDensity& a, const QuantizedDensity& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("grid mismatch");
    QuantizedDensity r(a.grid);
    r.symmetric = a.symmetric && b.symmetric;

    r.inf_pos = a.inf_pos * b.inf_pos + a.inf_neg * b.inf_neg;
    r.inf_neg = a.inf_pos * b.inf_neg + a.inf_neg * b.inf_pos;

    // +-inf atoms pass the other operand through (with sign for -inf)
    auto add_finite_scaled = [&r](const QuantizedDensity& src, double w, bool reflect) {
        if (w == 0.0) return;
        int n = src.grid.size();
        for (int i = 0; i < n; ++i) {
            double m = src.interior[i];
            if (m != 0.0) r.interior[reflect ? n - 1 - i : i] += w * m;
        }
        if (src.has_rail()) {
            if (reflect)
                r.add_rail(src.rail_mag, w * src.rail_pos, w * src.rail_neg);
            else
                r.add_rail(src.rail_mag, w * src.rail_neg, w * src.rail_pos);
        }
    };
    add_finite_scaled(b, a.inf_pos, false);
    add_finite_scaled(b, a.inf_neg, true);
    add_finite_scaled(a, b.inf_pos, false);
    add_finite_scaled(a, b.inf_neg, true);

    const auto& table = detail::BoxTable::get(a.grid);
    int c = a.grid.half_bins();
    auto nza = detail::nonzero_bins(a);
    auto nzb = detail::nonzero_bins(b);
    int last = 2 * c;
    for (const auto& ia : nza) {
        int mi = std::abs(ia.idx - c);
        bool na = ia.idx < c;
        for (const auto& jb : nzb) {
            int mj = std::abs(jb.idx - c);
            const auto& cell = table.at(mi, mj);
            double m = ia.mass * jb.mass;
            bool neg = na != (jb.idx < c);
            if (!neg) {
                int k = c + cell.lo;
                if (cell.w == 0.0) {
                    r.interior[k] += m;
                } else if (k + 1 <= last) {
                    r.interior[k] += m * (1.0 - cell.w);
                    r.interior[k + 1] += m * cell.w;
                } else {
                    r.interior[last] += m;
                }
            } else {
                int k = c - cell.lo;
                if (cell.w == 0.0) {
                    r.interior[k] += m;
                } else if (k - 1 >= 0) {
                    r.interior[k] += m * (1.0 - cell.w);
                    r.interior[k - 1] += m * cell.w;
                } else {
                    r.interior[0] += m;
                }
            }
        }
    }

    auto rail_x_interior = [&r](const QuantizedDensity& ra, const std::vector<detail::SparseBin>& nz,
                                const Grid& g) {
        if (!ra.has_rail()) return;
        for (const auto& jb : nz) {
            double x = g.x_of(jb.idx);
            r.add_point(boxplus(ra.rail_mag, x), ra.rail_pos * jb.mass);
            r.add_point(boxplus(-ra.rail_mag, x), ra.rail_neg * jb.mass);
        }
    };
    rail_x_interior(a, nzb, a.grid);
    rail_x_interior(b, nza, a.grid);

    if (a.has_rail() && b.has_rail()) {
        double zm = boxplus(a.rail_mag, b.rail_mag);
        double pos = a.rail_pos * b.rail_pos + a.rail_neg * b.rail_neg;
        double neg = a.rail_pos * b.rail_neg + a.rail_neg * b.rail_pos;
        r.add_rail(zm, neg, pos);
    }
    return r;
}

// floor(x)_K applied to a density: all mass with |x| >= K moves onto exact
// atoms at +-K. The result is generally not symmetric.
inline QuantizedDensity saturate(const QuantizedDensity& a, double K) {
    if (K <= 0.0) throw std::invalid_argument("K must be positive");
    if (!a.grid.aligned(K)) throw std::invalid_argument("K must be a grid point");
    QuantizedDensity r(a.grid);
    int c = a.grid.half_bins();
    int kk = static_cast<int>(std::llround(K / a.grid.delta));
    if (kk > c) kk = c + 1;  // K beyond support: nothing interior to clip
    double neg = a.inf_neg, pos = a.inf_pos;
    for (int i = 0; i < (int)a.interior.size(); ++i) {
        double m = a.interior[i];
        if (m == 0.0) continue;
        int off = i - c;
        if (off <= -kk)
            neg += m;
        else if (off >= kk)
            pos += m;
        else
            r.interior[i] = m;
    }
    if (a.has_rail()) {
        if (a.rail_mag >= K - 1e-12) {
            neg += a.rail_neg;
            pos += a.rail_pos;
        } else {
            r.add_point(-a.rail_mag, a.rail_neg);
            r.add_point(a.rail_mag, a.rail_pos);
        }
    }
    if (neg == 0.0 && pos == 0.0) {
        r.symmetric = a.symmetric;
        return r;
    }
    r.rail_mag = K;
    r.rail_neg = neg;
    r.rail_pos = pos;
    r.symmetric = false;
    return r;
}

// Symmetric saturation: gamma * D(p, K) + a restricted to (-K, K), with
// p = e^{-K}/(1+e^{-K}). Preserves symmetry and degradation ordering.
inline QuantizedDensity saturate_sym(const QuantizedDensity& a, double K) {
    if (!a.symmetric) throw std::invalid_argument("saturate_sym requires a symmetric density");
    QuantizedDensity r = saturate(a, K);
    if (!r.has_rail()) {
        r.symmetric = true;
        return r;
    }
    double gamma = r.rail_neg + r.rail_pos;
    double p = std::exp(-K) / (1.0 + std::exp(-K));
    r.rail_neg = gamma * p;
    r.rail_pos = gamma * (1.0 - p);
    r.symmetric = true;
    return r;
}

// Wasserstein distance between symmetric densities: L1 distance between the
// |D|-distribution CDFs on [0,1].
inline double wasserstein(const QuantizedDensity& a, const QuantizedDensity& b) {
    if (!a.symmetric || !b.symmetric)
        throw std::invalid_argument("wasserstein requires symmetric densities");
    auto collect = [](const QuantizedDensity& d) {
        std::vector<std::pair<double, double>> pts;
        int c = d.grid.half_bins();
        for (int i = 0; i < (int)d.interior.size(); ++i) {
            double m = d.interior[i];
            if (m != 0.0) pts.emplace_back(std::abs(std::tanh(0.5 * d.grid.x_of(i))), m);
        }
        if (d.rail_neg + d.rail_pos > 0.0)
            pts.emplace_back(std::tanh(0.5 * d.rail_mag), d.rail_neg + d.rail_pos);
        if (d.inf_neg + d.inf_pos > 0.0) pts.emplace_back(1.0, d.inf_neg + d.inf_pos);
        std::sort(pts.begin(), pts.end());
        (void)c;
        return pts;
    };
    auto pa = collect(a);
    auto pb = collect(b);
    double fa = 0.0, fb = 0.0, dist = 0.0, z = 0.0;
    size_t i = 0, j = 0;
    while (i < pa.size() || j < pb.size()) {
        double za = i < pa.size() ? pa[i].first : 1.0;
        double zb = j < pb.size() ? pb[j].first : 1.0;
        double zn = std::min(za, zb);
        dist += std::abs(fa - fb) * (zn - z);
        z = zn;
        while (i < pa.size() && pa[i].first <= zn + 1e-15) fa += pa[i++].second;
        while (j < pb.size() && pb[j].first <= zn + 1e-15) fb += pb[j++].second;
    }
    dist += std::abs(fa - fb) * (1.0 - z);
    return dist;
}

// gamma*D(p, magnitude) + (1-gamma)*m  with m supported inside (-magnitude, magnitude).
struct SaturatedMassDecomposition {
    double gamma = 0.0;
    double p = 0.0;
    double magnitude = 0.0;
    QuantizedDensity residual;
};

inline SaturatedMassDecomposition decompose(const QuantizedDensity& a, double magnitude) {
    const double tol = 1e-9;
    if (a.inf_neg > 0.0 || a.inf_pos > 0.0)
        throw std::invalid_argument("decompose: mass at +-inf outside magnitude");
    SaturatedMassDecomposition d;
    d.magnitude = magnitude;
    d.residual = QuantizedDensity(a.grid);
    double gamma = 0.0, neg = 0.0;
    if (a.has_rail()) {
        if (std::abs(a.rail_mag - magnitude) <= tol) {
            gamma = a.rail_neg + a.rail_pos;
            neg = a.rail_neg;
        } else if (a.rail_mag < magnitude - tol) {
            d.residual.add_rail(a.rail_mag, a.rail_neg, a.rail_pos);
        } else {
            throw std::invalid_argument("decompose: rail atoms beyond magnitude");
        }
    }
    for (int i = 0; i < (int)a.interior.size(); ++i) {
        double m = a.interior[i];
        if (m == 0.0) continue;
        double x = a.grid.x_of(i);
        if (std::abs(x) > magnitude + tol)
            throw std::invalid_argument("decompose: interior mass beyond magnitude");
        if (std::abs(std::abs(x) - magnitude) <= tol)
            throw std::invalid_argument("decompose: mass at magnitude must be an explicit atom");
        d.residual.interior[i] = m;
    }
    d.gamma = gamma;
    d.p = gamma > 0.0 ? neg / gamma : 0.0;
    double rest = 1.0 - gamma;
    if (rest > 1e-15) {
        d.residual.scale(1.0 / rest);
    } else {
        d.residual = delta_at(a.grid, 0.0);  // convention when gamma == 1
    }
    return d;
}

}  // namespace satde

#pragma once

// Monte Carlo saturated message-passing decoder on sampled regular Tanner
// graphs, with the operational rail-flip symmetrization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "satde/channels.hpp"
#include "satde/density.hpp"
#include "satde/stability.hpp"

namespace satde {

struct TannerGraph {
    int n_vars = 0;
    int n_checks = 0;
    std::vector<int> edge_var;              // edge -> variable node
    std::vector<int> edge_chk;              // edge -> check node
    std::vector<std::vector<int>> var_edges;
    std::vector<std::vector<int>> chk_edges;
    int multi_edges = 0;                    // parallel edges in the matching

    int n_edges() const { return (int)edge_var.size(); }
};

// Configuration-model sampling of the (l, r)-regular ensemble: uniform
// random socket matching; multi-edges allowed.
inline TannerGraph build_regular_graph(int n, int l, int r, uint64_t seed) {
    if (n <= 0 || l < 1 || r < 1) throw std::invalid_argument("bad graph parameters");
    if ((static_cast<long long>(n) * l) % r != 0)
        throw std::invalid_argument("n*l must be divisible by r");
    TannerGraph g;
    g.n_vars = n;
    g.n_checks = (int)(static_cast<long long>(n) * l / r);
    int ne = n * l;
    std::vector<int> chk_sockets(ne);
    for (int i = 0; i < ne; ++i) chk_sockets[i] = i / r;
    std::mt19937_64 rng(seed);
    std::shuffle(chk_sockets.begin(), chk_sockets.end(), rng);
    g.edge_var.resize(ne);
    g.edge_chk.resize(ne);
    g.var_edges.resize(n);
    g.chk_edges.resize(g.n_checks);
    for (int e = 0; e < ne; ++e) {
        int v = e / l;
        int c = chk_sockets[e];
        g.edge_var[e] = v;
        g.edge_chk[e] = c;
        g.var_edges[v].push_back(e);
        g.chk_edges[c].push_back(e);
    }
    for (int v = 0; v < n; ++v) {
        auto es = g.var_edges[v];
        std::vector<int> cs;
        for (int e : es) cs.push_back(g.edge_chk[e]);
        std::sort(cs.begin(), cs.end());
        for (size_t i = 1; i < cs.size(); ++i)
            if (cs[i] == cs[i - 1]) ++g.multi_edges;
    }
    return g;
}

enum class CheckRule { BP, MinSum };

struct DecoderConfig {
    double K = 20.0;
    int max_iters = 10;
    CheckRule rule = CheckRule::BP;
    bool symmetrize = false;  // random sign flips at saturated variable outputs
    uint64_t rng_seed = 0;
    bool record_messages = false;  // keep every v2c message per iteration
};

// Counter-based uniform in [0,1): the same (seed, iter, edge) always yields
// the same draw, so symmetrized and plain runs share channel noise.
inline double counter_uniform(uint64_t seed, uint64_t iter, uint64_t edge) {
    uint64_t z = seed ^ (iter * 0x9e3779b97f4a7c15ULL) ^ (edge * 0xbf58476d1ce4e5b9ULL);
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return (double)(z >> 11) * 0x1.0p-53;
}

inline double clip_llr(double x, double K) {
    if (x > K) return K;
    if (x < -K) return -K;
    return x;
}

struct DecodeResult {
    std::vector<int> hard_decisions;                 // 0/1 per variable
    std::vector<double> msg_error_rate_by_iter;      // P(msg<0) + 0.5 P(msg=0)
    std::vector<double> msg_erasure_rate_by_iter;    // P(msg == 0)
    std::vector<std::vector<double>> v2c_by_iter;    // only when record_messages
};

inline DecodeResult decode(const TannerGraph& g, const std::vector<double>& llrs,
                           const DecoderConfig& cfg) {
    if ((int)llrs.size() != g.n_vars) throw std::invalid_argument("llr length mismatch");
    for (double v : llrs)
        if (std::isnan(v)) throw std::invalid_argument("NaN in channel LLRs");
    int ne = g.n_edges();
    std::vector<double> v2c(ne, 0.0), c2v(ne, 0.0);
    DecodeResult res;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        // variable-node half-iteration
        double err = 0.0, era = 0.0;
        for (int v = 0; v < g.n_vars; ++v) {
            const auto& es = g.var_edges[v];
            double sum = llrs[v];
            for (int e : es) sum += c2v[e];
            for (int e : es) {
                double z = sum - c2v[e];
                double m = clip_llr(z, cfg.K);
                if (cfg.symmetrize && std::abs(m) == cfg.K && std::abs(z) >= cfg.K) {
                    double lam = flip_probability(std::abs(z), cfg.K);
                    if (counter_uniform(cfg.rng_seed, (uint64_t)it, (uint64_t)e) < lam) m = -m;
                }
                v2c[e] = m;
                if (m < 0.0) err += 1.0;
                if (m == 0.0) {
                    err += 0.5;
                    era += 1.0;
                }
            }
        }
        res.msg_error_rate_by_iter.push_back(err / ne);
        res.msg_erasure_rate_by_iter.push_back(era / ne);
        if (cfg.record_messages) res.v2c_by_iter.push_back(v2c);
        // check-node half-iteration
        for (int c = 0; c < g.n_checks; ++c) {
            const auto& es = g.chk_edges[c];
            int deg = (int)es.size();
            for (int i = 0; i < deg; ++i) {
                double out;
                if (cfg.rule == CheckRule::BP) {
                    out = kInf;
                    for (int j = 0; j < deg; ++j)
                        if (j != i) out = boxplus(out, v2c[es[j]]);
                } else {
                    double sgn = 1.0, mn = kInf;
                    for (int j = 0; j < deg; ++j) {
                        if (j == i) continue;
                        double m = v2c[es[j]];
                        if (m < 0.0) sgn = -sgn;
                        if (m == 0.0) sgn = 0.0;
                        mn = std::min(mn, std::abs(m));
                    }
                    out = sgn * mn;
                }
                c2v[es[i]] = clip_llr(out, cfg.K);
            }
        }
    }
    res.hard_decisions.resize(g.n_vars);
    for (int v = 0; v < g.n_vars; ++v) {
        double sum = llrs[v];
        for (int e : g.var_edges[v]) sum += c2v[e];
        res.hard_decisions[v] = sum >= 0.0 ? 0 : 1;
    }
    return res;
}

inline std::vector<double> sample_channel_llrs(const ChannelFamily& fam, double sigma, int n,
                                               std::mt19937_64& rng) {
    std::vector<double> llrs(n);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    switch (fam.kind) {
        case ChannelKind::BEC:
            for (int i = 0; i < n; ++i) llrs[i] = uni(rng) < sigma ? 0.0 : kInf;
            break;
        case ChannelKind::BSC: {
            double z = std::log((1.0 - sigma) / sigma);
            for (int i = 0; i < n; ++i) llrs[i] = uni(rng) < sigma ? -z : z;
            break;
        }
        case ChannelKind::BIAWGN: {
            std::normal_distribution<double> nd(2.0 / (sigma * sigma), 2.0 / sigma);
            for (int i = 0; i < n; ++i) llrs[i] = nd(rng);
            break;
        }
    }
    return llrs;
}

struct BerResult {
    double ber = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;  // Wilson 95% interval on the BER
    std::vector<double> msg_error_by_iter;
    std::vector<double> msg_error_stderr;     // std error across trials
    std::vector<double> msg_erasure_by_iter;
    std::vector<double> msg_erasure_stderr;
};

inline void wilson_interval(double p, double n, double& lo, double& hi) {
    const double z = 1.959963984540054;
    double z2 = z * z;
    double den = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / den;
    double half = z / den * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    lo = std::max(0.0, center - half);
    hi = std::min(1.0, center + half);
}

// All-zero codeword transmission; i.i.d. channel LLRs per trial.
inline BerResult simulate_ber(const TannerGraph& g, const ChannelFamily& fam, double sigma,
                              const DecoderConfig& cfg, int trials) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    BerResult out;
    out.msg_error_by_iter.assign(cfg.max_iters, 0.0);
    out.msg_erasure_by_iter.assign(cfg.max_iters, 0.0);
    std::vector<std::vector<double>> per_trial_err(trials), per_trial_era(trials);
    long long bit_errors = 0;
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(cfg.rng_seed * 0x100000001ULL + (uint64_t)t + 1);
        auto llrs = sample_channel_llrs(fam, sigma, g.n_vars, rng);
        DecoderConfig c2 = cfg;
        c2.rng_seed = cfg.rng_seed + (uint64_t)t;
        auto res = decode(g, llrs, c2);
        per_trial_err[t] = res.msg_error_rate_by_iter;
        per_trial_era[t] = res.msg_erasure_rate_by_iter;
        for (int b : res.hard_decisions) bit_errors += b;
    }
    out.msg_error_stderr.assign(cfg.max_iters, 0.0);
    out.msg_erasure_stderr.assign(cfg.max_iters, 0.0);
    for (int it = 0; it < cfg.max_iters; ++it) {
        double me = 0.0, ma = 0.0;
        for (int t = 0; t < trials; ++t) {
            me += per_trial_err[t][it];
            ma += per_trial_era[t][it];
        }
        me /= trials;
        ma /= trials;
        out.msg_error_by_iter[it] = me;
        out.msg_erasure_by_iter[it] = ma;
        double ve = 0.0, va = 0.0;
        for (int t = 0; t < trials; ++t) {
            ve += (per_trial_err[t][it] - me) * (per_trial_err[t][it] - me);
            va += (per_trial_era[t][it] - ma) * (per_trial_era[t][it] - ma);
        }
        if (trials > 1) {
            out.msg_error_stderr[it] = std::sqrt(ve / (trials - 1) / trials);
            out.msg_erasure_stderr[it] = std::sqrt(va / (trials - 1) / trials);
        }
    }
    double n_bits = (double)g.n_vars * trials;
    out.ber = bit_errors / n_bits;
    wilson_interval(out.ber, n_bits, out.ci_lo, out.ci_hi);
    return out;
}

struct SatVsSymsatReport {
    std::vector<double> err_plain;        // symmetrize off
    std::vector<double> err_symmetrized;  // symmetrize on, same noise
    std::vector<double> ratio;            // symmetrized / plain per iteration
    long long flip_candidates = 0;        // messages at the rail (approximation)
};

// Paired comparison of the plain and symmetrized saturated decoders on
// identical channel noise (common random numbers).
inline SatVsSymsatReport compare_sat_vs_symsat(const TannerGraph& g, const ChannelFamily& fam,
                                               double sigma, const DecoderConfig& cfg,
                                               int trials) {
    SatVsSymsatReport rep;
    rep.err_plain.assign(cfg.max_iters, 0.0);
    rep.err_symmetrized.assign(cfg.max_iters, 0.0);
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(cfg.rng_seed * 0x100000001ULL + (uint64_t)t + 1);
        auto llrs = sample_channel_llrs(fam, sigma, g.n_vars, rng);
        DecoderConfig plain = cfg;
        plain.symmetrize = false;
        plain.rng_seed = cfg.rng_seed + (uint64_t)t;
        DecoderConfig sym = plain;
        sym.symmetrize = true;
        auto rp = decode(g, llrs, plain);
        auto rs = decode(g, llrs, sym);
        for (int it = 0; it < cfg.max_iters; ++it) {
            rep.err_plain[it] += rp.msg_error_rate_by_iter[it];
            rep.err_symmetrized[it] += rs.msg_error_rate_by_iter[it];
        }
    }
    rep.ratio.resize(cfg.max_iters);
    for (int it = 0; it < cfg.max_iters; ++it) {
        rep.err_plain[it] /= trials;
        rep.err_symmetrized[it] /= trials;
        rep.ratio[it] = rep.err_plain[it] > 0.0
                            ? rep.err_symmetrized[it] / rep.err_plain[it]
                            : (rep.err_symmetrized[it] > 0.0 ? kInf : 1.0);
    }
    return rep;
}

}  // namespace satde

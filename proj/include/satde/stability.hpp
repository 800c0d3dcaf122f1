#pragma once

// Stability machinery for saturated BP: flip probabilities, support
// propagation, near-stability recursions, the 2x2 contraction matrix for
// minimum variable degree >= 3, and numerical verification of the
// variable/check node inequalities on DE traces.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "satde/channels.hpp"
#include "satde/de_engine.hpp"
#include "satde/density.hpp"
#include "satde/ensemble.hpp"

namespace satde {

struct SaturationParams {
    double K = 0.0;
    double K_prime = 0.0;   // check-output rail lower bound K - ln(d_r - 1)
    double K_dprime = 0.0;  // channel support bound
    int d_r = 0;

    static SaturationParams derive(double K, int d_r, std::optional<double> K_dprime = std::nullopt) {
        SaturationParams p;
        p.K = K;
        p.d_r = d_r;
        p.K_prime = K - std::log((double)d_r - 1.0);
        // default channel clip: the largest support compatible with the
        // degree-3+ stability analysis
        p.K_dprime = K_dprime ? *K_dprime : 2.0 * p.K_prime - K;
        return p;
    }

    bool cond_2Kp_gt_K() const { return 2.0 * K_prime > K; }
    bool cond_channel() const { return K_dprime <= 2.0 * K_prime - K + 1e-12; }
};

// lambda_v: probability of flipping a saturated message with pre-clip
// magnitude z so that the wrong-sign probability becomes e^{-K}/(1+e^{-K}).
inline double flip_probability(double z, double K) {
    if (K <= 0.0) throw std::invalid_argument("K must be positive");
    if (z < K - 1e-12) throw std::invalid_argument("flip applies only to saturated messages (z >= K)");
    double pk = std::exp(-K) / (1.0 + std::exp(-K));
    if (z == kInf) return pk;
    if (z <= K) return 0.0;
    return pk * (1.0 - std::exp(-z + K)) / (1.0 - std::exp(-z));
}

struct NoFlipBound {
    double loose;  // max(0, 1 - e^{-K} n)
    double tight;  // (1 - e^{-K})^n
};

inline NoFlipBound no_flip_probability_bound(double K, long long n_vars) {
    if (n_vars < 1) throw std::invalid_argument("n_vars must be >= 1");
    NoFlipBound b;
    b.loose = std::max(0.0, 1.0 - std::exp(-K) * (double)n_vars);
    b.tight = std::pow(1.0 - std::exp(-K), (double)n_vars);
    return b;
}

struct SupportIteration {
    std::vector<double> iterates;
    bool escapes_below = false;  // support invades the negative axis
};

// z_{k+1} = (d_l - 1) z_k - L; safe iff z_0 >= L / (d_l - 2).
inline SupportIteration support_iteration(double z0, double L, int d_l, int k_max) {
    if (d_l < 3) throw std::invalid_argument("support iteration needs d_l >= 3");
    if (L <= 0.0) throw std::invalid_argument("L must be positive");
    SupportIteration s;
    double z = z0;
    s.iterates.push_back(z);
    for (int k = 0; k < k_max; ++k) {
        z = (d_l - 1) * z - L;
        s.iterates.push_back(z);
        if (z < 0.0) {
            s.escapes_below = true;
            break;
        }
    }
    return s;
}

enum class StabilityRegime {
    Deg2Unstable,
    NearStableDeg2,
    NearStableDeg3,
    StableDeg3Plus,
    Inconclusive,
    Defers
};

inline const char* to_string(StabilityRegime r) {
    switch (r) {
        case StabilityRegime::Deg2Unstable: return "deg2_unstable";
        case StabilityRegime::NearStableDeg2: return "near_stable_deg2";
        case StabilityRegime::NearStableDeg3: return "near_stable_deg3";
        case StabilityRegime::StableDeg3Plus: return "stable_deg3plus";
        case StabilityRegime::Inconclusive: return "inconclusive";
        case StabilityRegime::Defers: return "defers";
    }
    return "?";
}

struct StabilityVerdict {
    StabilityRegime regime = StabilityRegime::Inconclusive;
    double mat_a = 0.0, mat_b = 0.0, mat_c = 0.0, mat_d = 0.0;
    double spectral_radius = 0.0;
    double asymptotic_B_bound = 0.0;
    double c_const = 0.0;   // 2(d_r - 1)
    double C_const = 0.0;   // 2(d_r - 1) + 1 + sqrt(d_r - 1)
    double xi = 0.0;
    double eta = 0.0;
    bool preconditions_ok = false;
};

// No zero-error invariant set exists with degree-2 variable nodes off the BEC.
inline StabilityVerdict degree_two_verdict(const EnsembleSpec& ens, ChannelKind kind) {
    StabilityVerdict v;
    if (ens.lambda2() > 0.0 && kind != ChannelKind::BEC)
        v.regime = StabilityRegime::Deg2Unstable;
    else
        v.regime = StabilityRegime::Defers;
    return v;
}

struct NearStabilityResult {
    bool conclusive = false;
    double eta = 0.0;
    double xi = 0.0;
    double floor_bound = 0.0;    // bound on B of the iterate tail
    double chk_floor_bound = 0.0;
};

// Minimum variable degree 2: eta-contraction with B floor e^{-K/2}/(1-eta).
inline NearStabilityResult near_stability_deg2(double lambda2, double B_c, double rho_p1,
                                               double K, double xi) {
    if (xi <= 0.0) throw std::invalid_argument("xi must be positive");
    NearStabilityResult r;
    r.xi = xi;
    r.eta = lambda2 * B_c * rho_p1 + (1.0 - lambda2) * B_c * rho_p1 * rho_p1 * xi;
    if (r.eta < 1.0 && xi >= (2.0 - r.eta) / (1.0 - r.eta) * std::exp(-K / 2.0)) {
        r.conclusive = true;
        r.floor_bound = std::exp(-K / 2.0) / (1.0 - r.eta);
    }
    return r;
}

// Minimum variable degree 3: xi solves
// lambda3 B_c rho'(1)^2 xi + (1-lambda3) B_c rho'(1)^3 xi^2 = 1/2.
inline NearStabilityResult near_stability_deg3(double lambda3, double B_c, double rho_p1,
                                               double K) {
    if (lambda3 <= 0.0 || lambda3 > 1.0) throw std::invalid_argument("lambda3 must be in (0,1]");
    if (B_c <= 0.0) throw std::invalid_argument("B_c must be positive");
    NearStabilityResult r;
    double lin = lambda3 * B_c * rho_p1 * rho_p1;
    double quad = (1.0 - lambda3) * B_c * rho_p1 * rho_p1 * rho_p1;
    double xi;
    if (quad <= 0.0) {
        if (lin <= 0.0) return r;
        xi = 0.5 / lin;
    } else {
        double disc = lin * lin + 2.0 * quad;
        xi = (-lin + std::sqrt(disc)) / (2.0 * quad);
    }
    if (!(xi > 0.0)) return r;
    r.xi = xi;
    if (2.0 * std::exp(-K / 2.0) < xi) {
        r.conclusive = true;
        r.floor_bound = 2.0 * std::exp(-K / 2.0);
        r.chk_floor_bound = 2.0 * rho_p1 * std::exp(-K / 2.0);
    }
    return r;
}

// 2x2 contraction matrix for minimum variable degree >= 3, right-regular d_r.
// `degrees` lists the values of d where the variable degree is d+1.
inline StabilityVerdict stability_matrix(double K, int d_r, const std::vector<int>& degrees,
                                         double B_c,
                                         std::optional<double> K_dprime = std::nullopt) {
    for (int d : degrees)
        if (d < 2) throw std::invalid_argument("stability_matrix requires variable degrees >= 3");
    StabilityVerdict v;
    SaturationParams sp = SaturationParams::derive(K, d_r, K_dprime);
    v.preconditions_ok = sp.cond_2Kp_gt_K() && sp.cond_channel();
    v.c_const = 2.0 * ((double)d_r - 1.0);
    v.C_const = 2.0 * ((double)d_r - 1.0) + 1.0 + std::sqrt((double)d_r - 1.0);
    double lnc = std::log(v.c_const);
    double r_deg = (double)d_r;  // 'r' in the bound denotes the check degree d_r
    double a = 0.0, b = 0.0, cc = 0.0, dd = 0.0;
    for (int d : degrees) {
        double fd = d;
        double e_half = std::exp(-(fd - 1.0) * (K / 2.0 - lnc));
        a = std::max(a, (d_r - 1.0) * std::pow(2.0, fd) *
                            std::pow(2.0 * std::exp(-K / 2.0), std::floor(fd / 2.0)));
        b = std::max(b, B_c * fd * e_half * (d_r - 1.0) * v.C_const);
        cc = std::max(cc, std::exp(-(fd / 2.0 - 1.0) * (K - lnc)) *
                              std::exp(fd / 2.0 * std::log(3.0 * std::exp(1.0))) *
                              (1.0 + 2.0 * r_deg) * 2.0 * (d_r - 1.0) * std::exp(-K / 2.0));
        dd = std::max(dd, B_c * fd * e_half * (d_r - 1.0) * v.C_const);
    }
    v.mat_a = a;
    v.mat_b = b;
    v.mat_c = cc;
    v.mat_d = dd;
    // spectral radius of a nonnegative 2x2 matrix from trace/determinant
    double tr = a + dd, det = a * dd - b * cc;
    double disc = std::max(0.0, tr * tr - 4.0 * det);
    v.spectral_radius = 0.5 * (tr + std::sqrt(disc));
    v.asymptotic_B_bound = 2.0 * std::exp(-K / 2.0);
    if (v.spectral_radius < 1.0 && v.preconditions_ok)
        v.regime = StabilityRegime::StableDeg3Plus;
    else
        v.regime = StabilityRegime::Inconclusive;
    return v;
}

// One DE iteration decomposed at the rails, for the inequality checks.
// gbarBm carries the product gbar * B(m) directly (mass off the rails,
// weighted by e^{-x/2}), so no renormalization is involved.
struct VcIterate {
    int iter = 0;
    // input to the check node: symmetric-saturated variable output at K
    double in_gamma = 0.0, in_p = 0.0, in_gbarBm = 0.0, in_B = 0.0;
    // check-node output decomposed at its rail magnitude K_d
    double chk_gamma = 0.0, chk_p = 0.0, chk_gbarBm = 0.0, chk_Kd = 0.0, chk_B = 0.0;
    // raw (non-symmetrized) saturated variable output at K
    double out_gamma = 0.0, out_p = 0.0, out_gbarBm = 0.0, out_B = 0.0;
};

namespace detail {
inline void rail_decompose(const QuantizedDensity& d, double& gamma, double& p, double& gbarBm) {
    gamma = d.rail_neg + d.rail_pos;
    p = gamma > 0.0 ? d.rail_neg / gamma : 0.0;
    double s = 0.0;
    for (int i = 0; i < (int)d.interior.size(); ++i)
        if (d.interior[i] != 0.0) s += d.interior[i] * std::exp(-0.5 * d.grid.x_of(i));
    gbarBm = s;
}
}  // namespace detail

// Run SymSatBP DE for a regular (l, r) ensemble, recording the decomposed
// quantities of every iteration.
inline std::vector<VcIterate> run_vc_trace(const QuantizedDensity& c, int l, int r, double K,
                                           int iters) {
    EnsembleSpec ens = EnsembleSpec::regular(l, r);
    std::vector<VcIterate> out;
    QuantizedDensity x = delta_at(c.grid, 0.0);
    for (int ell = 1; ell <= iters; ++ell) {
        VcIterate rec;
        rec.iter = ell;
        detail::rail_decompose(x, rec.in_gamma, rec.in_p, rec.in_gbarBm);
        rec.in_B = x.bhattacharyya();

        QuantizedDensity chk = check_update(x, ens);
        rec.chk_Kd = chk.has_rail() ? chk.rail_mag : K;
        detail::rail_decompose(chk, rec.chk_gamma, rec.chk_p, rec.chk_gbarBm);
        rec.chk_B = chk.bhattacharyya();

        QuantizedDensity t = variable_update(c, chk, ens);
        QuantizedDensity raw = saturate(t, K);
        detail::rail_decompose(raw, rec.out_gamma, rec.out_p, rec.out_gbarBm);
        rec.out_B = raw.bhattacharyya();
        out.push_back(rec);

        x = saturate_sym(t, K);
        double tm = x.total_mass();
        if (std::isfinite(tm) && tm > 0.0) x.scale(1.0 / tm);
    }
    return out;
}

struct VcInequalityRow {
    int iter = 0;
    bool applicable = false;  // Eq.(2) regime: B(iterate) <= 2 e^{-K/2}
    bool chk_gp_ok = true;    // gamma' p' <= (d_r - 1) gamma p
    bool chk_p_ok = true;     // p' <= d p
    bool chk_bm_ok = true;    // gbar' B(m') <= gbar B(m) (gamma C (r-1)^3 + r-1)
    bool var_bm_ok = true;    // variable-node residual bound
    bool var_gp_ok = true;    // variable-node rail bound
};

struct VcReport {
    std::vector<VcInequalityRow> rows;
    int applicable_rows = 0;
    int violations = 0;
    bool all_ok() const { return violations == 0; }
};

// Check the stated variable/check node inequalities on a decomposed DE trace.
// Rows outside the near-fixed-point regime (B > 2 e^{-K/2}) are recorded but
// not counted: the bounds presuppose that regime.
inline VcReport verify_vc_inequalities(const std::vector<VcIterate>& trace,
                                       const SaturationParams& params, int l,
                                       double B_channel, double slack = 1e-9) {
    VcReport rep;
    double K = params.K;
    int d_r = params.d_r;
    double c_const = 2.0 * (d_r - 1.0);
    double C_const = 2.0 * (d_r - 1.0) + 1.0 + std::sqrt((double)d_r - 1.0);
    double lnc = std::log(c_const);
    double rm1 = d_r - 1.0;
    double dv = l - 1.0;  // variable degree d+1 = l
    double regime = 2.0 * std::exp(-K / 2.0);
    for (const auto& it : trace) {
        VcInequalityRow row;
        row.iter = it.iter;
        // regime gate: both the iterate entering and leaving the nodes
        row.applicable = it.in_B <= regime + slack && it.out_B <= regime + slack;
        if (row.applicable) {
            ++rep.applicable_rows;
            double gp = it.in_gamma * it.in_p;
            double gbarBm = it.in_gbarBm;
            // check node
            double lhs = it.chk_gamma * it.chk_p;
            row.chk_gp_ok = lhs <= rm1 * gp + slack;
            row.chk_p_ok = it.chk_gamma == 0.0 || it.chk_p <= rm1 * it.in_p + slack;
            double rhs2 = gbarBm * (it.in_gamma * C_const * rm1 * rm1 * rm1 + rm1);
            row.chk_bm_ok = it.chk_gbarBm <= rhs2 + slack;
            // variable node, fed by the check output
            double cgp = it.chk_gamma * it.chk_p;
            double cgbarBm = it.chk_gbarBm;
            double e_half = std::exp(-(dv - 1.0) * (K / 2.0 - lnc));
            double rhs_bm = B_channel * dv * e_half * cgbarBm +
                            cgp * std::exp(-(dv / 2.0 - 1.0) * (K - lnc)) *
                                std::exp(dv / 2.0 * std::log(3.0 * std::exp(1.0))) *
                                (1.0 + 2.0 * d_r);
            row.var_bm_ok = it.out_gbarBm <= rhs_bm + slack;
            double rhs_gp = std::exp(-K / 2.0) * B_channel * dv * e_half * cgbarBm +
                            std::pow(2.0, dv) * std::pow(cgp, std::floor((dv + 2.0) / 2.0));
            row.var_gp_ok = it.out_gamma * it.out_p <= rhs_gp + slack;
            if (!(row.chk_gp_ok && row.chk_p_ok && row.chk_bm_ok && row.var_bm_ok && row.var_gp_ok))
                ++rep.violations;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace satde

#pragma once

// Density evolution for plain BP, saturated BP and symmetric-saturated BP,
// plus bisection threshold search.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "satde/channels.hpp"
#include "satde/density.hpp"
#include "satde/ensemble.hpp"

namespace satde {

enum class DeMode { BP, SatBP, SymSatBP };

inline const char* to_string(DeMode m) {
    switch (m) {
        case DeMode::BP: return "bp";
        case DeMode::SatBP: return "sat";
        case DeMode::SymSatBP: return "symsat";
    }
    return "?";
}

inline DeMode de_mode_from_string(const std::string& s) {
    if (s == "bp" || s == "BP") return DeMode::BP;
    if (s == "sat" || s == "satbp") return DeMode::SatBP;
    if (s == "symsat" || s == "symsatbp") return DeMode::SymSatBP;
    throw std::invalid_argument("unknown DE mode: " + s);
}

// rho-mixture of check-node outputs: sum_d rho_d x^{box (d-1)}
inline QuantizedDensity check_update(const QuantizedDensity& x, const EnsembleSpec& ens) {
    QuantizedDensity out(x.grid);
    out.symmetric = x.symmetric;
    QuantizedDensity pow = x;  // x^{box 1}
    int dmax = ens.max_chk_degree();
    for (int d = 2; d <= dmax; ++d) {
        // pow == x^{box (d-1)} on entry
        if (d > 2) pow = chk_convolve(pow, x);
        double w = ens.rho_coeffs[d - 1];
        if (w > 0.0) out.accumulate(pow, w);
    }
    return out;
}

// lambda-mixture of variable-node outputs: sum_d lambda_d c (*) b^{(*)(d-1)}
inline QuantizedDensity variable_update(const QuantizedDensity& c, const QuantizedDensity& b,
                                        const EnsembleSpec& ens) {
    QuantizedDensity out(c.grid);
    out.symmetric = c.symmetric && b.symmetric;
    QuantizedDensity acc = c;  // c (*) b^{(*)(d-1)} incrementally
    int dmax = ens.max_var_degree();
    for (int d = 2; d <= dmax; ++d) {
        acc = var_convolve(acc, b);
        double w = ens.lambda_coeffs[d - 1];
        if (w > 0.0) out.accumulate(acc, w);
    }
    return out;
}

// One DE iterate. For saturated modes the saturation applies to the
// variable-node output.
inline QuantizedDensity de_step(const QuantizedDensity& c, const QuantizedDensity& x,
                                const EnsembleSpec& ens, DeMode mode,
                                std::optional<double> K = std::nullopt) {
    if (mode != DeMode::BP && !K) throw std::invalid_argument("saturated DE modes need K");
    QuantizedDensity b = check_update(x, ens);
    QuantizedDensity t = variable_update(c, b, ens);
    switch (mode) {
        case DeMode::BP: return t;
        case DeMode::SatBP: return saturate(t, *K);
        case DeMode::SymSatBP:
            if (!t.symmetric)
                throw std::invalid_argument("SymSatBP requires a symmetric intermediate");
            return saturate_sym(t, *K);
    }
    return t;
}

enum class DeStatus { ConvergedZero, ConvergedFloor, MaxIters, Diverged };

inline const char* to_string(DeStatus s) {
    switch (s) {
        case DeStatus::ConvergedZero: return "converged_zero";
        case DeStatus::ConvergedFloor: return "converged_floor";
        case DeStatus::MaxIters: return "max_iters";
        case DeStatus::Diverged: return "diverged";
    }
    return "?";
}

struct DeIterRecord {
    int iter;
    double B;
    double E;
    double H;
    double wasserstein_step;  // NaN when either iterate is non-symmetric
};

struct DeTrace {
    std::vector<DeIterRecord> records;
    DeStatus status = DeStatus::MaxIters;
    QuantizedDensity final_density;
    std::vector<QuantizedDensity> iterates;  // only when DeOptions::keep_densities
};

struct DeOptions {
    int max_iters = 2000;
    double success_E = 1e-10;          // BP success criterion
    double floor_tol = 1e-9;           // relative E change over the floor window
    int floor_window = 10;
    double interior_success = 1e-10;   // saturated modes: interior mass threshold
    bool keep_densities = false;       // retain every iterate in the trace
};

inline bool de_success(const QuantizedDensity& x, DeMode mode, std::optional<double> K,
                       const DeOptions& opt) {
    double E = x.error_probability();
    if (mode == DeMode::BP) return E < opt.success_E;
    // off the BEC, E cannot reach 0 with finite K: rail mass alone remains.
    // correct-sign interior mass is harmless (erased-channel chains through
    // degree-2 variable nodes park there forever on the BEC), so only the
    // sign-error-relevant interior mass on [-K, 0] must vanish
    if (E >= std::exp(-*K) + 1e-12) return false;
    double bad = 0.0;
    for (int i = 0; i <= x.grid.half_bins(); ++i) bad += x.interior[i];
    return bad < opt.interior_success;
}

inline DeTrace de_run(const QuantizedDensity& c, const EnsembleSpec& ens, DeMode mode,
                      std::optional<double> K, DeOptions opt = DeOptions{}) {
    DeTrace trace;
    QuantizedDensity x = delta_at(c.grid, 0.0);
    QuantizedDensity prev = x;
    double prev_E = x.error_probability();
    double prev_im = x.interior_mass();
    int stable_count = 0;
    trace.final_density = x;
    for (int ell = 1; ell <= opt.max_iters; ++ell) {
        x = de_step(c, x, ens, mode, K);
        // rounding deficits compound multiplicatively across iterations;
        // renormalize while each single step stays mass-conserving
        double tm = x.total_mass();
        if (!std::isfinite(tm) || std::abs(tm - 1.0) > 1e-6) {
            trace.records.push_back({ell, x.bhattacharyya(), x.error_probability(), x.entropy(),
                                     std::numeric_limits<double>::quiet_NaN()});
            trace.status = DeStatus::Diverged;
            trace.final_density = x;
            return trace;
        }
        x.scale(1.0 / tm);
        double B = x.bhattacharyya();
        double E = x.error_probability();
        double H = x.entropy();
        double wstep = std::numeric_limits<double>::quiet_NaN();
        if (x.symmetric && prev.symmetric) wstep = wasserstein(x, prev);
        trace.records.push_back({ell, B, E, H, wstep});
        if (opt.keep_densities) trace.iterates.push_back(x);
        if (de_success(x, mode, K, opt)) {
            trace.status = DeStatus::ConvergedZero;
            trace.final_density = x;
            return trace;
        }
        // a genuine floor means both E and the interior mass have stalled
        double im = x.interior_mass();
        double rel_E = std::abs(E - prev_E) / std::max(E, 1e-300);
        double rel_im = std::abs(im - prev_im) / std::max(im, 1e-300);
        stable_count = (rel_E < opt.floor_tol && rel_im < opt.floor_tol) ? stable_count + 1 : 0;
        if (stable_count >= opt.floor_window) {
            trace.status = DeStatus::ConvergedFloor;
            trace.final_density = x;
            return trace;
        }
        prev_E = E;
        prev_im = im;
        prev = x;
    }
    trace.status = DeStatus::MaxIters;
    trace.final_density = x;
    return trace;
}

struct ThresholdResult {
    double sigma_star = 0.0;
    double h_star = 0.0;
    double bracket = 0.0;
    DeMode mode = DeMode::BP;
    bool degenerate = false;   // no sign change in the parameter range
    Grid grid;
    int max_iters = 0;
    double tol = 0.0;
};

inline ThresholdResult threshold_search(const ChannelFamily& fam, const EnsembleSpec& ens,
                                        DeMode mode, std::optional<double> K, double tol,
                                        const Grid& g = Grid{}, DeOptions opt = DeOptions{}) {
    auto succeeds = [&](double sigma) {
        QuantizedDensity c = make_channel(fam, sigma, g);
        return de_run(c, ens, mode, K, opt).status == DeStatus::ConvergedZero;
    };
    ThresholdResult res;
    res.mode = mode;
    res.grid = g;
    res.max_iters = opt.max_iters;
    res.tol = tol;
    double lo = fam.param_lo, hi = fam.param_hi;
    if (!succeeds(lo) || succeeds(hi)) {
        res.degenerate = true;
        res.sigma_star = succeeds(hi) ? hi : lo;
        res.bracket = hi - lo;
        res.h_star = entropy(make_channel(fam, res.sigma_star, g));
        return res;
    }
    for (int it = 0; it < 40 && (hi - lo) > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        if (succeeds(mid))
            lo = mid;
        else
            hi = mid;
    }
    res.sigma_star = 0.5 * (lo + hi);
    res.bracket = hi - lo;
    res.h_star = entropy(make_channel(fam, res.sigma_star, g));
    return res;
}

// Upper bound on B of the symmetric-saturated iterate in terms of the BP one.
inline double lemma5_bound(int ell, double K, int l, int r, double B_bp) {
    if (ell < 1) throw std::invalid_argument("ell must be >= 1");
    if (K <= 0.0) throw std::invalid_argument("K must be positive");
    double expo = 0.5 * (-K + ell * std::log(2.0 * (l - 1) * (r - 1)));
    return B_bp + 2.0 * std::sqrt(2.0) * std::exp(expo);
}

// Contraction coefficient used alongside lemma5_bound.
inline double alpha_ell(const QuantizedDensity& a, const QuantizedDensity& b, int l, int r) {
    double Ba = a.bhattacharyya(), Bb = b.bhattacharyya();
    if (Ba > 1.0 + 1e-9 || Bb > 1.0 + 1e-9) throw std::invalid_argument("B > 1");
    Ba = std::min(Ba, 1.0);
    Bb = std::min(Bb, 1.0);
    double ta = 1.0 - Ba * Ba, tb = 1.0 - Bb * Bb;
    double s = 0.0;
    for (int j = 1; j <= r - 1; ++j) {
        double ea = 0.5 * (r - 1 - j), eb = 0.5 * (j - 1);
        double term = (ea == 0.0 ? 1.0 : std::pow(ta, ea)) * (eb == 0.0 ? 1.0 : std::pow(tb, eb));
        s += term;
    }
    return 2.0 * (l - 1) * s;
}

}  // namespace satde

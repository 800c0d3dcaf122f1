// Acceptance gate: twelve end-to-end checks against independent oracles and
// the stated analytical bounds. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "satde/cli_config.hpp"
#include "satde/mc_decoder.hpp"
#include "satde/stability.hpp"

using namespace satde;
using satde::testing::random_density;
using satde::testing::random_symmetric;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", idx, name,
                detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---- scalar BEC oracle -----------------------------------------------------
double bec_step(double x, double eps, int l, int r) {
    return eps * std::pow(1.0 - std::pow(1.0 - x, r - 1), l - 1);
}
bool bec_converges(double eps, int l, int r) {
    double x = eps;
    for (int i = 0; i < 20000; ++i) {
        double nx = bec_step(x, eps, l, r);
        if (nx < 1e-13) return true;
        if (std::abs(nx - x) < 1e-16) return false;
        x = nx;
    }
    return false;
}
double bec_oracle_threshold(int l, int r) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 44; ++i) {
        double mid = 0.5 * (lo + hi);
        (bec_converges(mid, l, r) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// 1. BEC thresholds vs the scalar-recursion oracle, under a runtime budget.
void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    Grid g;
    auto fam = ChannelFamily::make(ChannelKind::BEC);
    bool ok = true;
    std::string detail;
    for (auto [l, r] : {std::pair{3, 6}, std::pair{4, 8}}) {
        double oracle = bec_oracle_threshold(l, r);
        auto res = threshold_search(fam, EnsembleSpec::regular(l, r), DeMode::BP, std::nullopt,
                                    1e-4, g);
        bool this_ok = !res.degenerate && std::abs(res.sigma_star - oracle) < 1e-3;
        ok = ok && this_ok;
        detail += fmt("(%d,%d): eps*=%.5f oracle=%.5f  ", l, r, res.sigma_star, oracle);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && secs < 60.0;
    detail += fmt("runtime %.1fs", secs);
    report(1, "BEC threshold vs scalar oracle", ok, detail);
}

// 2. SatBP on the BEC matches plain BP in E at every iteration.
void criterion_2() {
    Grid g;
    auto ens = EnsembleSpec::regular(3, 6);
    auto c = make_channel(ChannelFamily::make(ChannelKind::BEC), 0.40, g);
    DeOptions opt;
    opt.max_iters = 300;
    auto bp = de_run(c, ens, DeMode::BP, std::nullopt, opt);
    bool ok = true;
    double worst = 0.0;
    for (double K : {5.0, 10.0, 25.0}) {
        auto sat = de_run(c, ens, DeMode::SatBP, K, opt);
        size_t n = std::min(bp.records.size(), sat.records.size());
        for (size_t i = 0; i < n; ++i) {
            double d = std::abs(bp.records[i].E - sat.records[i].E);
            worst = std::max(worst, d);
            if (d > 1e-12) ok = false;
        }
    }
    report(2, "saturation-neutral BEC traces", ok, fmt("max |dE| = %.2e", worst));
}

// 3. Wasserstein saturation bound on random symmetric densities.
void criterion_3() {
    Grid g;
    std::mt19937_64 rng(2024);
    int violations = 0;
    double worst_margin = 1e9;
    for (int t = 0; t < 200; ++t) {
        auto a = random_symmetric(rng, g);
        for (double K : {2.0, 4.0, 8.0}) {
            double d = wasserstein(a, saturate_sym(a, K));
            double lim = 1.0 - std::tanh(K / 2.0);
            worst_margin = std::min(worst_margin, lim - d);
            if (d > lim + 1e-12) ++violations;
        }
    }
    report(3, "Wasserstein clip bound 1 - tanh(K/2)", violations == 0,
           fmt("600 checks, %d violations, min margin %.2e", violations, worst_margin));
}

// 4. Lemma 5 bound at 90% of the measured BSC BP threshold.
void criterion_4() {
    Grid g;
    auto ens = EnsembleSpec::regular(3, 6);
    auto fam = ChannelFamily::make(ChannelKind::BSC);
    DeOptions opt;
    opt.max_iters = 250;
    auto thr = threshold_search(fam, ens, DeMode::BP, std::nullopt, 2e-3, g, opt);
    double eps = 0.9 * thr.sigma_star;
    auto c = make_channel(fam, eps, g);
    DeOptions short_opt;
    short_opt.max_iters = 15;
    short_opt.success_E = 0.0;          // force the full 15 iterations
    short_opt.interior_success = 0.0;
    auto bp = de_run(c, ens, DeMode::BP, std::nullopt, short_opt);
    bool ok = !thr.degenerate && bp.records.size() == 15;
    int violations = 0;
    for (double K : {10.0, 20.0, 40.0}) {
        auto sym = de_run(c, ens, DeMode::SymSatBP, K, short_opt);
        for (size_t i = 0; i < 15 && i < sym.records.size(); ++i) {
            double bound = lemma5_bound((int)i + 1, K, 3, 6, bp.records[i].B);
            if (sym.records[i].B > bound + 1e-12) ++violations;
        }
    }
    ok = ok && violations == 0;
    report(4, "Lemma 5 Bhattacharyya bound", ok,
           fmt("eps* = %.4f, run at %.4f, %d violations over K in {10,20,40}, l <= 15",
               thr.sigma_star, eps, violations));
}

// 5. B multiplicativity under (*) and subadditivity under the check box.
void criterion_5() {
    Grid g;
    std::mt19937_64 rng(777);
    double delta = g.delta;
    int mult_viol = 0, add_viol = 0;
    double worst_mult = 0.0;
    for (int t = 0; t < 500; ++t) {
        auto a = random_density(rng, g);
        auto b = random_density(rng, g);
        double Bab = var_convolve(a, b).bhattacharyya();
        double prod = a.bhattacharyya() * b.bhattacharyya();
        worst_mult = std::max(worst_mult, std::abs(Bab - prod));
        if (std::abs(Bab - prod) > 5.0 * delta) ++mult_viol;
        double Bbox = chk_convolve(a, b).bhattacharyya();
        if (Bbox > a.bhattacharyya() + b.bhattacharyya() + 1e-9) ++add_viol;
    }
    report(5, "B functional identities", mult_viol == 0 && add_viol == 0,
           fmt("500 pairs: %d multiplicativity (worst |d| = %.2e vs 5delta = %.2e), "
               "%d subadditivity violations",
               mult_viol, worst_mult, 5.0 * delta, add_viol));
}

// 6. Degradation chain a -> saturate -> saturate_sym raises B, E, H.
void criterion_6() {
    Grid g;
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> kpick(2, 8);
    int violations = 0;
    for (int t = 0; t < 200; ++t) {
        auto a = random_symmetric(rng, g);
        double K = kpick(rng);
        auto s = saturate(a, K);
        auto ss = saturate_sym(a, K);
        auto leq = [&](double x, double y) { return x <= y + 1e-12; };
        if (!(leq(a.bhattacharyya(), s.bhattacharyya()) &&
              leq(s.bhattacharyya(), ss.bhattacharyya()) &&
              leq(a.error_probability(), s.error_probability()) &&
              leq(s.error_probability(), ss.error_probability()) &&
              leq(a.entropy(), s.entropy()) && leq(s.entropy(), ss.entropy())))
            ++violations;
    }
    report(6, "degradation chain monotone in B, E, H", violations == 0,
           fmt("200 densities, %d violations", violations));
}

// 7. Stability matrix scan for (3,6) plus the Eq.-of-section-V tail bounds.
// The tail bounds are stated for the saturated (non-symmetrized) recursion
// S_K, whose rail flip mass is not pinned; they are checked on SatBP tails.
void criterion_7() {
    Grid g;
    auto fam = ChannelFamily::make(ChannelKind::BSC);
    auto c = make_channel(fam, 0.04, g);
    double B_c = c.bhattacharyya();
    std::vector<int> degrees{2};

    double K0 = -1.0;
    bool monotone = true;
    double prev = 1e300;
    for (int K = 4; K <= 80; ++K) {
        auto v = stability_matrix((double)K, 6, degrees, B_c);
        if (v.spectral_radius > prev + 1e-12) monotone = false;
        prev = v.spectral_radius;
        if (K0 < 0.0 && v.regime == StabilityRegime::StableDeg3Plus) K0 = K;
    }
    bool all_stable_beyond = true;
    if (K0 > 0.0)
        for (int K = (int)K0; K <= 80; ++K)
            if (stability_matrix((double)K, 6, degrees, B_c).regime !=
                StabilityRegime::StableDeg3Plus)
                all_stable_beyond = false;

    auto ens = EnsembleSpec::regular(3, 6);
    DeOptions opt;
    opt.max_iters = 400;
    int tail_viol = 0;
    for (double K : {20.0, 30.0, 40.0}) {
        auto tr = de_run(c, ens, DeMode::SatBP, K, opt);
        const auto& x = tr.final_density;
        auto b = check_update(x, ens);
        if (x.bhattacharyya() > 2.0 * std::exp(-K / 2.0)) ++tail_viol;
        if (b.bhattacharyya() > 2.0 * ens.rho_prime_1() * std::exp(-K / 2.0)) ++tail_viol;
    }
    bool ok = K0 > 0.0 && all_stable_beyond && monotone && tail_viol == 0;
    report(7, "stability matrix scan and tail bounds", ok,
           fmt("K0 = %.0f, radius monotone: %s, tail violations: %d", K0,
               monotone ? "yes" : "no", tail_viol));
}

// 8. Variable/check node inequalities on a real DE trace.
void criterion_8() {
    Grid g;
    auto c = make_channel(ChannelFamily::make(ChannelKind::BSC), 0.02, g);
    double K = 30.0;
    auto trace = run_vc_trace(c, 3, 6, K, 50);
    auto params = SaturationParams::derive(K, 6);
    auto rep = verify_vc_inequalities(trace, params, 3, c.bhattacharyya());
    bool ok = rep.violations == 0 && rep.applicable_rows > 0;
    report(8, "variable/check node inequality table", ok,
           fmt("50 iterations, %d applicable rows, %d violations", rep.applicable_rows,
               rep.violations));
}

// 9. Degree-2 dichotomy: floor on the BSC, full convergence on the BEC.
void criterion_9() {
    Grid g;
    auto ens = EnsembleSpec::from_coeffs({0.0, 0.5, 0.5}, {0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
    DeOptions opt;
    opt.max_iters = 600;
    auto bsc = make_channel(ChannelFamily::make(ChannelKind::BSC), 0.02, g);
    auto t_bsc = de_run(bsc, ens, DeMode::SatBP, 10.0, opt);
    bool bsc_ok = t_bsc.status == DeStatus::ConvergedFloor && t_bsc.records.back().E > 0.0;

    auto bec = make_channel(ChannelFamily::make(ChannelKind::BEC), 0.25, g);
    auto t_bec = de_run(bec, ens, DeMode::SatBP, 10.0, opt);
    bool bec_ok = t_bec.status == DeStatus::ConvergedZero;
    report(9, "degree-2 saturation dichotomy", bsc_ok && bec_ok,
           fmt("BSC(0.02): %s with E = %.2e; BEC(0.25): %s", to_string(t_bsc.status),
               t_bsc.records.back().E, to_string(t_bec.status)));
}

// 10. Monte Carlo vs density evolution, BEC and BSC.
void criterion_10() {
    auto t0 = std::chrono::steady_clock::now();
    Grid g;
    auto ens = EnsembleSpec::regular(3, 6);
    int n = 10000, trials = 20, iters = 10;
    bool ok = true;
    std::string detail;

    {  // BEC(0.40), K=25, erasure rates vs the scalar recursion
        auto graph = build_regular_graph(n, 3, 6, 1001);
        DecoderConfig cfg;
        cfg.K = 25.0;
        cfg.max_iters = iters;
        cfg.rng_seed = 99;
        auto res = simulate_ber(graph, ChannelFamily::make(ChannelKind::BEC), 0.40, cfg, trials);
        double x = 0.40;
        int miss = 0;
        for (int i = 0; i < iters; ++i) {
            double tolr = 3.0 * res.msg_erasure_stderr[i] + 0.005;
            if (std::abs(res.msg_erasure_by_iter[i] - x) > tolr) ++miss;
            x = bec_step(x, 0.40, 3, 6);
        }
        ok = ok && miss == 0;
        detail += fmt("BEC misses %d/10  ", miss);
    }
    {  // BSC(0.04), K=20, message error rates vs the SatBP DE trace
        auto graph = build_regular_graph(n, 3, 6, 2002);
        DecoderConfig cfg;
        cfg.K = 20.0;
        cfg.max_iters = iters;
        cfg.rng_seed = 177;
        auto res = simulate_ber(graph, ChannelFamily::make(ChannelKind::BSC), 0.04, cfg, trials);
        auto c = make_channel(ChannelFamily::make(ChannelKind::BSC), 0.04, g);
        DeOptions opt;
        opt.max_iters = iters;
        opt.success_E = 0.0;
        opt.interior_success = 0.0;
        auto de = de_run(c, ens, DeMode::SatBP, 20.0, opt);
        int miss = 0;
        for (int i = 0; i < iters; ++i) {
            // decoder iteration i+1 emits messages computed from i check rounds;
            // DE record 0 is likewise the (saturated) channel itself
            double target = de.records[i].E;
            double tolr = 3.0 * res.msg_error_stderr[i] + 0.005;
            if (std::abs(res.msg_error_by_iter[i] - target) > tolr) ++miss;
        }
        ok = ok && miss == 0;
        detail += fmt("BSC misses %d/10  ", miss);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && secs < 300.0;
    detail += fmt("runtime %.1fs", secs);
    report(10, "Monte Carlo cross-validation", ok, detail);
}

// 11. Bit-exact oddness of the decoder under a global sign flip.
void criterion_11() {
    auto graph = build_regular_graph(120, 3, 6, 555);
    DecoderConfig cfg;
    cfg.K = 8.0;
    cfg.max_iters = 10;
    cfg.record_messages = true;
    std::mt19937_64 rng(808);
    std::normal_distribution<double> nd(1.5, 2.5);
    std::vector<double> llrs(graph.n_vars), neg(graph.n_vars);
    for (int i = 0; i < graph.n_vars; ++i) {
        llrs[i] = nd(rng);
        neg[i] = -llrs[i];
    }
    auto r1 = decode(graph, llrs, cfg);
    auto r2 = decode(graph, neg, cfg);
    long long mismatches = 0;
    for (int it = 0; it < cfg.max_iters; ++it)
        for (int e = 0; e < graph.n_edges(); ++e)
            if (r2.v2c_by_iter[it][e] != -r1.v2c_by_iter[it][e]) ++mismatches;
    report(11, "decoder sign-flip symmetry", mismatches == 0,
           fmt("%lld mismatches over %d messages", mismatches,
               cfg.max_iters * graph.n_edges()));
}

// 12. Flip-probability forward identity and its cap.
void criterion_12() {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int id_viol = 0, cap_viol = 0;
    for (int t = 0; t < 1000; ++t) {
        double K = 0.5 + 12.0 * uni(rng);
        double z = K + 25.0 * uni(rng);
        double lam = flip_probability(z, K);
        double cap = std::exp(-K) / (1.0 + std::exp(-K));
        if (lam > cap + 1e-15) ++cap_viol;
        double fwd =
            lam / (1.0 + std::exp(-z)) + (1.0 - lam) * std::exp(-z) / (1.0 + std::exp(-z));
        if (std::abs(fwd - cap) > 1e-12) ++id_viol;
    }
    report(12, "flip-probability identity", id_viol == 0 && cap_viol == 0,
           fmt("1000 pairs: %d identity, %d cap violations", id_viol, cap_viol));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    std::printf("%d of 12 criteria passed\n", 12 - g_failures);
    return g_failures == 0 ? 0 : 1;
}

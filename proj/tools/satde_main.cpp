// satde: density-evolution and Monte Carlo decoder lab for saturated BP.
//
// Exit codes: 0 success, 2 config validation failure, 3 numerical failure,
// 4 inconclusive verdict / degenerate search.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "satde/cli_config.hpp"
#include "satde/density_json.hpp"
#include "satde/stability.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInconclusive = 4;

void write_text(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << body;
}

std::string trace_csv(const satde::DeTrace& trace) {
    std::ostringstream os;
    os << "# schema_version: 1\n";
    os << "iter,B,E,H,wasserstein_step\n";
    os.precision(17);
    for (const auto& r : trace.records)
        os << r.iter << ',' << r.B << ',' << r.E << ',' << r.H << ',' << r.wasserstein_step
           << '\n';
    return os.str();
}

int cmd_de_run(const satde::RunConfig& cfg) {
    auto grid = cfg.grid();
    auto ens = cfg.ensemble();
    auto chan = cfg.channel();
    auto c = chan.density(grid);
    satde::DeOptions opt;
    opt.max_iters = cfg.max_iters;
    std::optional<double> K;
    if (cfg.mode() != satde::DeMode::BP) K = cfg.K;
    auto trace = satde::de_run(c, ens, cfg.mode(), K, opt);
    std::string body;
    if (cfg.format == "json") {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["config"] = cfg.to_json();
        j["status"] = satde::to_string(trace.status);
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : trace.records)
            rows.push_back({{"iter", r.iter},
                            {"B", r.B},
                            {"E", r.E},
                            {"H", r.H},
                            {"wasserstein_step", r.wasserstein_step}});
        j["trace"] = rows;
        j["final_density"] = satde::to_json(trace.final_density);
        body = j.dump(2) + "\n";
    } else {
        body = trace_csv(trace);
    }
    write_text(cfg.out, body);
    std::cerr << "de-run: " << trace.records.size() << " iterations, status "
              << satde::to_string(trace.status) << "\n";
    return trace.status == satde::DeStatus::Diverged ? kExitNumerical : kExitOk;
}

int cmd_threshold(const satde::RunConfig& cfg) {
    auto grid = cfg.grid();
    auto ens = cfg.ensemble();
    auto chan = cfg.channel();
    satde::DeOptions opt;
    opt.max_iters = cfg.max_iters;
    std::optional<double> K;
    if (cfg.mode() != satde::DeMode::BP) K = cfg.K;
    auto res = satde::threshold_search(chan.family(), ens, cfg.mode(), K, cfg.tol, grid, opt);
    nlohmann::json j;
    j["schema_version"] = 1;
    j["config"] = cfg.to_json();
    j["sigma_star"] = res.sigma_star;
    j["h_star"] = res.h_star;
    j["bracket"] = res.bracket;
    j["degenerate"] = res.degenerate;
    j["mode"] = satde::to_string(res.mode);
    j["grid"] = {{"delta", res.grid.delta}, {"support", res.grid.support}};
    j["max_iters"] = res.max_iters;
    j["tol"] = res.tol;
    write_text(cfg.out, j.dump(2) + "\n");
    std::cerr << "threshold: sigma* = " << res.sigma_star << " (h* = " << res.h_star << ")"
              << (res.degenerate ? " [degenerate]" : "") << "\n";
    return res.degenerate ? kExitInconclusive : kExitOk;
}

int cmd_stability(const satde::RunConfig& cfg) {
    auto grid = cfg.grid();
    auto ens = cfg.ensemble();
    auto chan = cfg.channel();
    if (cfg.K <= 0.0) throw satde::ConfigError("K", "required for stability analysis");
    double K = cfg.K;
    int d_r = ens.max_chk_degree();
    auto params = satde::SaturationParams::derive(K, d_r);
    double B_c = chan.density(grid).bhattacharyya();

    nlohmann::json j;
    j["schema_version"] = 1;
    j["config"] = cfg.to_json();
    j["constants"] = {{"K", params.K},
                      {"K_prime", params.K_prime},
                      {"K_dprime", params.K_dprime},
                      {"c_const", 2.0 * (d_r - 1.0)},
                      {"C_const", 2.0 * (d_r - 1.0) + 1.0 + std::sqrt((double)d_r - 1.0)},
                      {"B_channel", B_c}};

    auto deg2 = satde::degree_two_verdict(ens, chan.kind);
    satde::StabilityVerdict verdict = deg2;
    if (deg2.regime == satde::StabilityRegime::Deg2Unstable) {
        auto near2 = satde::near_stability_deg2(ens.lambda2(), B_c, ens.rho_prime_1(), K, 0.05);
        j["near_stability"] = {{"eta", near2.eta},
                               {"conclusive", near2.conclusive},
                               {"floor_bound", near2.floor_bound}};
        verdict.eta = near2.eta;
        verdict.asymptotic_B_bound = near2.floor_bound;
        if (near2.conclusive) verdict.regime = satde::StabilityRegime::Deg2Unstable;
    } else if (ens.min_var_degree() >= 3) {
        std::vector<int> degrees;
        for (int d = 2; d <= std::max(2, ens.max_var_degree() - 1); ++d) degrees.push_back(d);
        verdict = satde::stability_matrix(K, d_r, degrees, B_c);
        if (ens.lambda3() > 0.0) {
            auto near3 = satde::near_stability_deg3(ens.lambda3(), B_c, ens.rho_prime_1(), K);
            j["near_stability"] = {{"xi", near3.xi},
                                   {"conclusive", near3.conclusive},
                                   {"floor_bound", near3.floor_bound},
                                   {"chk_floor_bound", near3.chk_floor_bound}};
            verdict.xi = near3.xi;
        }
        // per-iteration inequality table on an actual DE trace (regular only)
        if (ens.is_regular()) {
            int l = ens.min_var_degree();
            auto trace = satde::run_vc_trace(chan.density(grid), l, d_r, K, 50);
            auto rep = satde::verify_vc_inequalities(trace, params, l, B_c);
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& r : rep.rows)
                rows.push_back({{"iter", r.iter},
                                {"applicable", r.applicable},
                                {"chk_gp_ok", r.chk_gp_ok},
                                {"chk_p_ok", r.chk_p_ok},
                                {"chk_bm_ok", r.chk_bm_ok},
                                {"var_bm_ok", r.var_bm_ok},
                                {"var_gp_ok", r.var_gp_ok}});
            j["inequality_table"] = rows;
            j["inequality_violations"] = rep.violations;
        }
    }
    j["verdict"] = satde::to_string(verdict.regime);
    j["matrix"] = {{"a", verdict.mat_a},
                   {"b", verdict.mat_b},
                   {"c", verdict.mat_c},
                   {"d", verdict.mat_d}};
    j["spectral_radius"] = verdict.spectral_radius;
    j["asymptotic_B_bound"] = verdict.asymptotic_B_bound;
    // 'r' in the variable-node bound denotes the check degree d_r
    j["notation"] = {{"r_read_as", "d_r"}};
    write_text(cfg.out, j.dump(2) + "\n");
    std::cerr << "stability: verdict " << satde::to_string(verdict.regime)
              << ", spectral radius " << verdict.spectral_radius << "\n";
    return verdict.regime == satde::StabilityRegime::Inconclusive ? kExitInconclusive : kExitOk;
}

int cmd_mc(const satde::RunConfig& cfg) {
    auto ens = cfg.ensemble();
    if (!ens.is_regular()) throw satde::ConfigError("ensemble", "mc requires a regular ensemble");
    auto chan = cfg.channel();
    int l = ens.min_var_degree(), r = ens.max_chk_degree();
    auto graph = satde::build_regular_graph(cfg.n, l, r, cfg.seed);
    satde::DecoderConfig dc;
    dc.K = cfg.K > 0.0 ? cfg.K : 20.0;
    dc.max_iters = cfg.iters;
    dc.rule = cfg.rule();
    dc.symmetrize = cfg.symmetrize;
    dc.rng_seed = cfg.seed;
    auto res = satde::simulate_ber(graph, chan.family(), chan.param, dc, cfg.trials);
    std::ostringstream os;
    os << "# schema_version: 1\n";
    os << "iter,msg_err_rate,ci_lo,ci_hi\n";
    os.precision(17);
    for (int it = 0; it < cfg.iters; ++it) {
        double m = res.msg_error_by_iter[it];
        double half = 1.959963984540054 * res.msg_error_stderr[it];
        os << (it + 1) << ',' << m << ',' << std::max(0.0, m - half) << ',' << (m + half)
           << '\n';
    }
    write_text(cfg.out, os.str());
    std::cerr << "mc: ber = " << res.ber << " [" << res.ci_lo << ", " << res.ci_hi << "]\n";
    return kExitOk;
}

int cmd_compare(const satde::RunConfig& cfg) {
    auto ens = cfg.ensemble();
    if (!ens.is_regular())
        throw satde::ConfigError("ensemble", "compare requires a regular ensemble");
    auto chan = cfg.channel();
    auto graph = satde::build_regular_graph(cfg.n, ens.min_var_degree(), ens.max_chk_degree(),
                                            cfg.seed);
    satde::DecoderConfig dc;
    dc.K = cfg.K > 0.0 ? cfg.K : 20.0;
    dc.max_iters = cfg.iters;
    dc.rule = cfg.rule();
    dc.rng_seed = cfg.seed;
    auto rep = satde::compare_sat_vs_symsat(graph, chan.family(), chan.param, dc, cfg.trials);
    std::ostringstream os;
    os << "# schema_version: 1\n";
    os << "iter,err_plain,err_symmetrized,ratio\n";
    os.precision(17);
    for (int it = 0; it < cfg.iters; ++it)
        os << (it + 1) << ',' << rep.err_plain[it] << ',' << rep.err_symmetrized[it] << ','
           << rep.ratio[it] << '\n';
    write_text(cfg.out, os.str());
    return kExitOk;
}

int cmd_wasserstein(const satde::RunConfig& cfg) {
    auto load = [](const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open density file: " + path);
        nlohmann::json j;
        f >> j;
        // accept either a bare density file or a de-run result file
        if (j.contains("final_density")) return satde::density_from_json(j["final_density"]);
        return satde::density_from_json(j);
    };
    auto a = load(cfg.a_path);
    auto b = load(cfg.b_path);
    double d = satde::wasserstein(a, b);
    nlohmann::json j;
    j["schema_version"] = 1;
    j["distance"] = d;
    write_text(cfg.out, j.dump(2) + "\n");
    std::cerr << "wasserstein: " << d << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"saturated-BP density evolution laboratory"};
    app.require_subcommand(1);

    satde::RunConfig cfg;
    cfg.apply_environment();

    // pre-scan for --config so flags can override file values
    for (int i = 1; i < argc - 1; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream f(argv[i + 1]);
            if (!f) {
                std::cerr << "config field 'config': cannot open " << argv[i + 1] << "\n";
                return kExitConfig;
            }
            try {
                nlohmann::json j;
                f >> j;
                if (j.contains("config")) j = j["config"];  // accept emitted result files
                cfg.apply_json(j);
            } catch (const std::exception& e) {
                std::cerr << "config field 'config': " << e.what() << "\n";
                return kExitConfig;
            }
        }
    }

    std::string config_path;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags win)");
        sub->add_option("--ensemble", cfg.ensemble_str, "'l,r' or JSON lambda/rho");
        sub->add_option("--channel", cfg.channel_str, "FAMILY:param, e.g. BSC:0.07");
        sub->add_option("--K", cfg.K, "saturation level (grid multiple)");
        sub->add_option("--grid", cfg.grid_delta, "grid spacing delta");
        sub->add_option("--support", cfg.grid_support, "grid half-width");
        sub->add_option("--mode", cfg.mode_str, "bp | sat | symsat");
        sub->add_option("--tol", cfg.tol, "bisection tolerance");
        sub->add_option("--iters", cfg.iters, "decoder iterations");
        sub->add_option("--max-iters", cfg.max_iters, "DE iteration cap");
        sub->add_option("--trials", cfg.trials, "Monte Carlo trials");
        sub->add_option("--n", cfg.n, "code length");
        sub->add_option("--rule", cfg.rule_str, "bp | minsum");
        sub->add_flag("--symmetrize", cfg.symmetrize, "rail-flip symmetrization");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--out", cfg.out, "output path (stdout if omitted)");
        sub->add_option("--format", cfg.format, "csv | json");
        sub->add_option("--clip", [&cfg](const std::vector<std::string>& v) {
            cfg.clip = std::stod(v[0]);
            return true;
        }, "channel support clip K''");
    };

    auto* de = app.add_subcommand("de-run", "run density evolution");
    add_common(de);
    auto* th = app.add_subcommand("threshold", "bisection threshold search");
    add_common(th);
    th->add_option("--family", cfg.channel_str,
                   "channel family (param ignored; accepts FAMILY or FAMILY:param)");
    auto* st = app.add_subcommand("stability", "stability analysis");
    add_common(st);
    st->add_option("--report", cfg.out, "report output path");
    auto* mc = app.add_subcommand("mc", "Monte Carlo decoder simulation");
    add_common(mc);
    auto* cp = app.add_subcommand("compare", "paired sat vs symsat decoding");
    add_common(cp);
    auto* ws = app.add_subcommand("wasserstein", "distance between two density files");
    add_common(ws);
    ws->add_option("--a", cfg.a_path, "first density JSON");
    ws->add_option("--b", cfg.b_path, "second density JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command == "threshold" && cfg.channel_str.find(':') == std::string::npos &&
        !cfg.channel_str.empty())
        cfg.channel_str += ":0";

    try {
        cfg.validate();
        if (cfg.command == "de-run") return cmd_de_run(cfg);
        if (cfg.command == "threshold") return cmd_threshold(cfg);
        if (cfg.command == "stability") return cmd_stability(cfg);
        if (cfg.command == "mc") return cmd_mc(cfg);
        if (cfg.command == "compare") return cmd_compare(cfg);
        if (cfg.command == "wasserstein") return cmd_wasserstein(cfg);
        std::cerr << "unknown command\n";
        return kExitConfig;
    } catch (const satde::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

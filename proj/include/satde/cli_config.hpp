#pragma once

// Run configuration shared by the satde CLI and its tests: parsing of
// ensemble/channel specs, JSON config ingestion, validation.

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>

#include "json.hpp"
#include "satde/channels.hpp"
#include "satde/de_engine.hpp"
#include "satde/density.hpp"
#include "satde/ensemble.hpp"
#include "satde/mc_decoder.hpp"

namespace satde {

struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string f, const std::string& msg)
        : std::runtime_error("config field '" + f + "': " + msg), field(std::move(f)) {}
};

// "3,6" for regular, or JSON {"lambda":[...],"rho":[...]} in edge perspective
// (add "perspective":"node" for node-perspective input).
inline EnsembleSpec parse_ensemble(const std::string& s) {
    try {
        if (!s.empty() && s.front() == '{') {
            auto j = nlohmann::json::parse(s);
            auto lam = j.at("lambda").get<std::vector<double>>();
            auto rho = j.at("rho").get<std::vector<double>>();
            if (j.value("perspective", "edge") == "node")
                return EnsembleSpec::from_node_perspective(lam, rho);
            return EnsembleSpec::from_coeffs(lam, rho);
        }
        auto comma = s.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("expected 'l,r' or JSON");
        int l = std::stoi(s.substr(0, comma));
        int r = std::stoi(s.substr(comma + 1));
        return EnsembleSpec::regular(l, r);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("ensemble", e.what());
    }
}

struct ChannelSpec {
    ChannelKind kind = ChannelKind::BSC;
    double param = 0.0;
    std::optional<double> clip;

    ChannelFamily family() const { return ChannelFamily::make(kind, clip); }
    QuantizedDensity density(const Grid& g) const { return make_channel(family(), param, g); }
};

// "BSC:0.07", "BEC:0.4", "BIAWGN:1.0"
inline ChannelSpec parse_channel(const std::string& s) {
    try {
        auto colon = s.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("expected FAMILY:param");
        ChannelSpec c;
        c.kind = channel_kind_from_string(s.substr(0, colon));
        c.param = std::stod(s.substr(colon + 1));
        return c;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("channel", e.what());
    }
}

struct RunConfig {
    std::string command;
    std::string ensemble_str;
    std::string channel_str;
    double K = 0.0;  // 0 = not set
    double grid_delta = 1.0 / 16.0;
    double grid_support = 64.0;
    std::string mode_str = "bp";
    double tol = 1e-4;
    int iters = 10;
    int max_iters = 2000;
    int trials = 20;
    int n = 10000;
    std::string rule_str = "bp";
    bool symmetrize = false;
    uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
    std::string a_path, b_path;  // wasserstein inputs
    std::optional<double> clip;  // channel support clip K''

    Grid grid() const { return Grid{grid_delta, grid_support}; }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["command"] = command;
        j["ensemble"] = ensemble_str;
        j["channel"] = channel_str;
        j["K"] = K;
        j["grid_delta"] = grid_delta;
        j["grid_support"] = grid_support;
        j["mode"] = mode_str;
        j["tol"] = tol;
        j["iters"] = iters;
        j["max_iters"] = max_iters;
        j["trials"] = trials;
        j["n"] = n;
        j["rule"] = rule_str;
        j["symmetrize"] = symmetrize;
        j["seed"] = seed;
        if (clip) j["clip"] = *clip;
        return j;
    }

    void apply_json(const nlohmann::json& j) {
        if (j.contains("command")) command = j["command"].get<std::string>();
        if (j.contains("ensemble")) ensemble_str = j["ensemble"].is_string()
                                                       ? j["ensemble"].get<std::string>()
                                                       : j["ensemble"].dump();
        if (j.contains("channel")) {
            if (j["channel"].is_string()) {
                channel_str = j["channel"].get<std::string>();
            } else {
                const auto& c = j["channel"];
                channel_str = c.at("family").get<std::string>() + ":" +
                              std::to_string(c.at("param").get<double>());
                if (c.contains("clip")) clip = c["clip"].get<double>();
            }
        }
        if (j.contains("K")) K = j["K"].get<double>();
        if (j.contains("grid_delta")) grid_delta = j["grid_delta"].get<double>();
        if (j.contains("grid_support")) grid_support = j["grid_support"].get<double>();
        if (j.contains("mode")) mode_str = j["mode"].get<std::string>();
        if (j.contains("tol")) tol = j["tol"].get<double>();
        if (j.contains("iters")) iters = j["iters"].get<int>();
        if (j.contains("max_iters")) max_iters = j["max_iters"].get<int>();
        if (j.contains("trials")) trials = j["trials"].get<int>();
        if (j.contains("n")) n = j["n"].get<int>();
        if (j.contains("rule")) rule_str = j["rule"].get<std::string>();
        if (j.contains("symmetrize")) symmetrize = j["symmetrize"].get<bool>();
        if (j.contains("seed")) seed = j["seed"].get<uint64_t>();
        if (j.contains("clip")) clip = j["clip"].get<double>();
    }

    void apply_environment() {
        if (const char* d = std::getenv("SATDE_GRID_DELTA")) grid_delta = std::atof(d);
    }

    // Validated, resolved views. Each throws ConfigError naming the field.
    EnsembleSpec ensemble() const {
        if (ensemble_str.empty()) throw ConfigError("ensemble", "missing");
        return parse_ensemble(ensemble_str);
    }
    ChannelSpec channel() const {
        if (channel_str.empty()) throw ConfigError("channel", "missing");
        ChannelSpec c = parse_channel(channel_str);
        if (clip) c.clip = clip;
        return c;
    }
    DeMode mode() const {
        try {
            return de_mode_from_string(mode_str);
        } catch (const std::exception& e) {
            throw ConfigError("mode", e.what());
        }
    }
    CheckRule rule() const {
        if (rule_str == "bp") return CheckRule::BP;
        if (rule_str == "minsum") return CheckRule::MinSum;
        throw ConfigError("rule", "expected bp or minsum");
    }

    void validate() const {
        if (grid_delta <= 0.0) throw ConfigError("grid_delta", "must be positive");
        if (grid_support <= 0.0 || std::fmod(grid_support, grid_delta) > 1e-9)
            throw ConfigError("grid_support", "must be a positive multiple of grid_delta");
        if (K != 0.0) {
            if (K < 0.0) throw ConfigError("K", "must be positive");
            double q = K / grid_delta;
            if (std::abs(q - std::llround(q)) > 1e-9)
                throw ConfigError("K", "must be a multiple of grid_delta");
        }
        if (tol <= 0.0) throw ConfigError("tol", "must be positive");
        if (iters < 1) throw ConfigError("iters", "must be >= 1");
        if (trials < 1) throw ConfigError("trials", "must be >= 1");
        if (n < 1) throw ConfigError("n", "must be >= 1");
        if (format != "csv" && format != "json") throw ConfigError("format", "csv or json");
        if (mode_str != "bp" && K == 0.0 && (command == "de-run" || command == "threshold"))
            throw ConfigError("K", "required for saturated modes");
    }
};

}  // namespace satde

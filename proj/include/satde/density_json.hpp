#pragma once

#include "json.hpp"
#include "satde/density.hpp"

namespace satde {

inline nlohmann::json to_json(const QuantizedDensity& d) {
    nlohmann::json j;
    j["grid_spacing"] = d.grid.delta;
    j["support_bound"] = d.grid.support;
    j["interior_mass"] = d.interior;
    j["atoms"] = {{"neg_sat", d.rail_neg},
                  {"pos_sat", d.rail_pos},
                  {"neg_inf", d.inf_neg},
                  {"pos_inf", d.inf_pos}};
    j["saturation_K"] = d.rail_mag;
    j["symmetric_flag"] = d.symmetric;
    return j;
}

inline QuantizedDensity density_from_json(const nlohmann::json& j) {
    Grid g;
    g.delta = j.at("grid_spacing").get<double>();
    g.support = j.at("support_bound").get<double>();
    QuantizedDensity d(g);
    d.interior = j.at("interior_mass").get<std::vector<double>>();
    if ((int)d.interior.size() != g.size())
        throw std::invalid_argument("interior_mass size does not match grid");
    const auto& atoms = j.at("atoms");
    d.rail_neg = atoms.at("neg_sat").get<double>();
    d.rail_pos = atoms.at("pos_sat").get<double>();
    d.inf_neg = atoms.at("neg_inf").get<double>();
    d.inf_pos = atoms.at("pos_inf").get<double>();
    d.rail_mag = j.at("saturation_K").get<double>();
    d.symmetric = j.at("symmetric_flag").get<bool>();
    return d;
}

}  // namespace satde

#include "qmem/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace qmem {

using nlohmann::json;

namespace {

void read_rates(const json& j, const char* key, Config& c, bool symmetric)
{
    if (!j.contains(key)) return;
    for (const auto& e : j.at(key)) {
        if (!e.is_array() || e.size() != 3) throw ConfigError(std::string(key) + ": entries must be [i, j, kHz]");
        const int a = e[0].get<int>(), b = e[1].get<int>();
        const double v = e[2].get<double>();
        if (a < 1 || b < 1 || a > c.system.n_levels || b > c.system.n_levels || a == b)
            throw ConfigError(std::string(key) + ": level index out of range");
        if (symmetric)
            c.system.set_dephasing(a, b, v);
        else
            c.system.set_Gamma(a, b, v);
    }
}

}  // namespace

Config parse_config(const std::string& text)
{
    Config c;
    try {
        const json j = json::parse(text);
        c.system.n_levels = j.value("levels", 3);
        if (c.system.n_levels != 3 && c.system.n_levels != 4) throw ConfigError("levels must be 3 or 4");

        if (j.contains("transitions")) {
            for (const auto& t : j.at("transitions")) {
                const auto name = t.at("field").get<std::string>();
                const auto f = field_from_name(name);
                if (!f) throw ConfigError("unknown field '" + name + "'");
                c.system.transitions.push_back({*f, t.at("lower").get<int>(), t.at("upper").get<int>()});
            }
        } else {
            c.system.transitions = {{Field::probe, 1, 3}, {Field::coupling, 2, 3}};
            if (c.system.n_levels == 4) c.system.transitions.push_back({Field::aux, 3, 4});
        }
        read_rates(j, "gamma", c, true);
        read_rates(j, "big_gamma", c, false);
        c.system.shift_target = j.value("shift_target", 2);
        c.ensemble.shift_target = c.system.shift_target;
        if (j.contains("ensemble")) {
            const auto& e = j.at("ensemble");
            c.ensemble.fwhm_khz = e.value("fwhm_khz", c.ensemble.fwhm_khz);
            c.ensemble.spacing_khz = e.value("spacing_khz", c.ensemble.spacing_khz);
            c.ensemble.truncation_khz = e.value("truncation_khz", c.ensemble.truncation_khz);
        }
        if (j.contains("initial_populations"))
            c.initial_populations = j.at("initial_populations").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const Config& c)
{
    nlohmann::ordered_json j;
    const auto& s = c.system;
    j["levels"] = s.n_levels;
    j["transitions"] = nlohmann::ordered_json::array();
    for (const auto& t : s.transitions)
        j["transitions"].push_back({{"field", std::string(field_name(t.field))}, {"lower", t.lower}, {"upper", t.upper}});
    j["gamma"] = nlohmann::ordered_json::array();
    j["big_gamma"] = nlohmann::ordered_json::array();
    for (int a = 1; a <= s.n_levels; ++a) {
        for (int b = 1; b <= s.n_levels; ++b) {
            if (a > b && s.dephasing(a, b) != 0.0) j["gamma"].push_back({a, b, s.dephasing(a, b)});
            if (s.Gamma(a, b) != 0.0) j["big_gamma"].push_back({a, b, s.Gamma(a, b)});
        }
    }
    j["shift_target"] = s.shift_target;
    j["ensemble"] = {{"fwhm_khz", c.ensemble.fwhm_khz},
                     {"spacing_khz", c.ensemble.spacing_khz},
                     {"truncation_khz", c.ensemble.truncation_khz}};
    if (!c.initial_populations.empty()) j["initial_populations"] = c.initial_populations;
    return j.dump(2) + "\n";
}

}  // namespace qmem

#pragma once

// JSON system/ensemble configuration:
//
// {
//   "levels": 3,
//   "transitions": [{"field": "probe", "lower": 1, "upper": 3},
//                   {"field": "coupling", "lower": 2, "upper": 3}],
//   "gamma": [[2, 1, 1.0], [3, 1, 25.0], [3, 2, 25.0]],     // [i, j, kHz]
//   "big_gamma": [[3, 1, 0.5], [3, 2, 0.5]],                // |i> -> |j>, kHz
//   "shift_target": 2,
//   "ensemble": {"fwhm_khz": 200, "spacing_khz": 2, "truncation_khz": 250},
//   "initial_populations": [0.5, 0.5]
// }
//
// Missing transitions default to probe 1-3, coupling 2-3 and (4 levels) aux 3-4.
// Missing rates are zero; a missing ensemble block takes the defaults.

#include "qmem/model.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace qmem {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    LevelSystem system;
    EnsembleSpec ensemble;
    std::vector<double> initial_populations;  // empty when not given
};

Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);
std::string config_to_json(const Config& c);

}  // namespace qmem

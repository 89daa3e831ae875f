#pragma once

#include <optional>
#include <string>
#include <vector>

#include "admercs/model.hpp"

namespace admercs {

struct Preset {
    std::string name;
    TreeParams tree;
    ScoringParams scoring;
};

// Per-benchmark default hyperparameters.
const std::vector<Preset>& presets();
std::optional<Preset> find_preset(const std::string& name);

// Canonical one-line rendering of fit parameters, used for report hashing.
std::string params_text(const FitParams& p);

}  // namespace admercs

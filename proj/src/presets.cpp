#include "admercs/presets.hpp"

#include <sstream>

namespace admercs {

namespace {

Preset make(const std::string& name, double min_samples_leaf, double min_impurity_decrease,
            double rho, double gamma_lambda, double gamma_delta) {
    Preset p;
    p.name = name;
    p.tree.max_depth = 10;
    p.tree.min_samples_leaf_frac = min_samples_leaf;
    p.tree.min_impurity_decrease = min_impurity_decrease;
    p.scoring.rho = rho;
    p.scoring.gamma_lambda = gamma_lambda;
    p.scoring.gamma_delta = gamma_delta;
    p.scoring.iterations = 10;
    return p;
}

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = {
        make("campos", 0.05, 0.05, 0.9, 0.5, 0.7),
        make("campos-hd", 0.1, 0.2, 0.7, 1.0, 0.7),
        make("hics", 0.02, 0.5, 0.9, 1.0, 1.0),
        make("synth-c", 0.02, 0.001, 0.7, 0.5, 0.2),
        make("synth-cs", 0.05, 0.001, 0.9, 1.0, 1.0),
        make("synth-i", 0.005, 0.001, 0.9, 0.5, 0.9),
    };
    return all;
}

std::optional<Preset> find_preset(const std::string& name) {
    for (const Preset& p : presets()) {
        if (p.name == name) return p;
    }
    return std::nullopt;
}

std::string params_text(const FitParams& p) {
    std::ostringstream os;
    os.precision(12);
    os << "max_depth=" << p.tree.max_depth
       << " min_samples_leaf=" << p.tree.min_samples_leaf_frac
       << " min_impurity_decrease=" << p.tree.min_impurity_decrease
       << " rho=" << p.scoring.rho << " gamma_delta=" << p.scoring.gamma_delta
       << " gamma_lambda=" << p.scoring.gamma_lambda
       << " iterations=" << p.scoring.iterations
       << " freeze_lambda=" << (p.scoring.freeze_lambda ? 1 : 0)
       << " seed=" << p.seed;
    return os.str();
}

}  // namespace admercs

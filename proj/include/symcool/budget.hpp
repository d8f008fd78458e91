#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "symcool/constants.hpp"
#include "symcool/error.hpp"

namespace symcool {

struct BudgetInput {
    double heating_rate = 1e3;                    // quanta/s
    double isotope_shift = two_pi * 5.2e9;        // rad/s
    double gamma = two_pi * 47e6;                 // rad/s
    double refrigerator_saturation = 12.0;

    void validate() const {
        if (!(heating_rate > 0.0) || !(isotope_shift > 0.0) || !(gamma > 0.0) || !(refrigerator_saturation > 0.0)) {
            throw ArgumentError("budget inputs must be finite and > 0");
        }
        if (!std::isfinite(heating_rate) || !std::isfinite(isotope_shift) || !std::isfinite(gamma) ||
            !std::isfinite(refrigerator_saturation)) {
            throw ArgumentError("budget inputs must be finite and > 0");
        }
    }
};

struct BudgetReport {
    double refrigerator_scatter = 0.0;  // 1/s
    double qubit_scatter = 0.0;         // 1/s
    double ac_stark_shift_hz = 0.0;     // Hz
    double cooling_margin = 0.0;
    std::vector<std::string> warnings;
};

inline BudgetReport compute_budget(const BudgetInput& in) {
    in.validate();
    BudgetReport r;
    r.refrigerator_scatter = in.refrigerator_saturation * in.gamma / 2.0;
    r.qubit_scatter = in.heating_rate * in.gamma * in.gamma / (4.0 * in.isotope_shift * in.isotope_shift);
    r.ac_stark_shift_hz = in.heating_rate / two_pi * in.gamma / (4.0 * in.isotope_shift);
    r.cooling_margin = r.refrigerator_scatter / in.heating_rate;
    if (in.isotope_shift < 10.0 * in.gamma) {
        r.warnings.push_back("isotope shift below 10 gamma: far-detuning estimates are unreliable");
    }
    return r;
}

inline const std::vector<std::string>& budget_parameters() {
    static const std::vector<std::string> names{"heating_rate", "isotope_shift", "gamma", "refrigerator_saturation"};
    return names;
}

inline double& budget_field(BudgetInput& in, const std::string& name) {
    if (name == "heating_rate") return in.heating_rate;
    if (name == "isotope_shift") return in.isotope_shift;
    if (name == "gamma") return in.gamma;
    if (name == "refrigerator_saturation") return in.refrigerator_saturation;
    throw ArgumentError("unknown budget parameter '" + name + "'");
}

inline std::vector<BudgetReport> sweep_budget(const BudgetInput& base, const std::string& parameter,
                                              const std::vector<double>& grid) {
    BudgetInput in = base;
    double& field = budget_field(in, parameter);
    std::vector<BudgetReport> out;
    out.reserve(grid.size());
    for (double value : grid) {
        field = value;
        out.push_back(compute_budget(in));
    }
    return out;
}

}  // namespace symcool

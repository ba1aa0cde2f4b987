#pragma once

// Parameter sweeps: run the averaging engine per value of gamma (or eta),
// extract ramp features, and tabulate t_d, t_p, and their ratio.

#include <string>
#include <vector>

#include "sffmon/averaging.hpp"
#include "sffmon/features.hpp"

namespace sffmon {

enum class SweepParameter { gamma, eta };

inline std::string to_string(SweepParameter p) {
    return p == SweepParameter::gamma ? "gamma" : "eta";
}

struct SweepRow {
    double value = 0.0;
    RampFeatures features;
    CurveMeta meta;
};

struct SweepProtocol {
    AverageSffParams base;
    TimeGrid grid;
    AveragingSpec averaging;
    std::size_t smooth_window = 9;
    double plateau_override = 0.0;
    double plateau_tol = 0.2;
    std::size_t plateau_sustain = 10;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SffCurve> curves; // one per value, same order
};

inline SweepResult sweep(const SpectrumProvider& provider, SweepParameter parameter,
                         const std::vector<double>& values, const SweepProtocol& protocol) {
    if (values.empty()) throw ValidationError("sweep needs at least one value");
    SweepResult result;
    result.rows.reserve(values.size());
    for (double v : values) {
        AverageSffParams params = protocol.base;
        if (parameter == SweepParameter::gamma)
            params.gamma = v;
        else
            params.eta = v;
        SffCurve curve = average_sff(provider, params, protocol.grid, protocol.averaging);
        SweepRow row;
        row.value = v;
        row.features = ramp_features(curve, protocol.smooth_window, protocol.plateau_override,
                                     protocol.plateau_tol, protocol.plateau_sustain);
        row.meta = curve.meta;
        result.rows.push_back(row);
        result.curves.push_back(std::move(curve));
    }
    return result;
}

} // namespace sffmon

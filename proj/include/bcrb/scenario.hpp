#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>

#include "comms.hpp"
#include "error.hpp"
#include "gaussian_beam.hpp"
#include "link_budget.hpp"
#include "ray_matrix.hpp"
#include "search.hpp"

namespace bcrb {

/// Point the loss scale factor N is fitted to: the baseline cavity delivering
/// 5 W at 3 m from 210 W of input power.
struct CalibrationAnchor {
    double distance = 3.0;           ///< m
    double beam_power = 5.0;         ///< W
    double pump_input_power = 210.0; ///< W
    SystemKind system = SystemKind::original;

    friend bool operator==(const CalibrationAnchor&, const CalibrationAnchor&) = default;
};

enum class NSource { explicit_value, calibrated };

inline std::string_view to_string(NSource s) noexcept {
    return s == NSource::calibrated ? "calibrated" : "explicit";
}

struct ModelChoices {
    LogBase log_base = LogBase::two;
    NSource n_source = NSource::calibrated;
    bool clamp_negative_power = true;
    CalibrationAnchor anchor;

    friend bool operator==(const ModelChoices&, const ModelChoices&) = default;
};

/// Complete parameter set for one evaluation. Wavelength lives in `geometry`.
struct Scenario {
    CavityGeometry geometry;
    LinkBudgetParams link;
    ReceiverParams receiver;
    ModelChoices model;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline void validate(const Scenario& s) {
    validate(s.geometry);
    validate(s.link);
    validate(s.receiver);
    const auto& a = s.model.anchor;
    if (!(a.distance > 0.0)) throw validation_error("model_choices.anchor.d", "must be positive");
    if (!(a.pump_input_power >= 0.0)) throw validation_error("model_choices.anchor.P_in", "must be non-negative");
    if (!std::isfinite(a.beam_power)) throw validation_error("model_choices.anchor.P_beam", "must be finite");
}

inline PowerClamp clamp_mode(const Scenario& s) noexcept {
    return s.model.clamp_negative_power ? PowerClamp::clamp : PowerClamp::raw;
}

/// N fitted to the scenario's calibration anchor, using the anchor system's aperture.
inline double calibrated_N(const Scenario& s) {
    const auto& a = s.model.anchor;
    return calibrate_N(a.distance, a.beam_power, a.pump_input_power, effective_aperture(s.geometry, a.system),
                       s.geometry.lambda, s.link);
}

/// Copy of `s` whose link.N holds the value actually used by the power model.
inline Scenario resolve_calibration(Scenario s) {
    if (s.model.n_source == NSource::calibrated) {
        s.link.N = calibrated_N(s);
    }
    return s;
}

/// All model outputs at the scenario's operating point (geometry.d,
/// link.pump_input_power, receiver.mu) for one cavity.
struct PointEvaluation {
    Matrix2 round_trip;
    StabilityReport stability;
    std::optional<SpotRadii> spots; ///< empty when unstable
    double aperture = 0.0;          ///< m
    double delta_t = 0.0;
    double beam_power = 0.0;        ///< W
    double pv_output = 0.0;         ///< W
    DataSignalLevel data;
    NoiseBudget noise;
    double spectral_efficiency = 0.0;
};

/// `resolved` must already carry its final N (see resolve_calibration).
inline PointEvaluation evaluate_point(const Scenario& resolved, SystemKind system) {
    const auto& g = resolved.geometry;
    PointEvaluation out;
    out.round_trip = round_trip(g, system);
    out.stability = stability_check(out.round_trip);
    if (out.stability.stable) {
        out.spots = spot_radii(g, system);
    }
    out.aperture = effective_aperture(g, system);
    out.delta_t = transmission_loss(g.d, out.aperture, g.lambda, resolved.link.N);
    const PowerClamp clamp = clamp_mode(resolved);
    out.beam_power = beam_power(resolved.link.pump_input_power, out.delta_t, resolved.link, clamp);
    const double delivered = std::max(out.beam_power, 0.0);
    out.pv_output = pv_output(delivered, resolved.receiver.mu, resolved.link, clamp);
    out.data = data_signal(delivered, resolved.receiver);
    out.noise = noise_budget(out.data, resolved.receiver);
    out.spectral_efficiency = spectral_efficiency(out.data, out.noise.total(), resolved.model.log_base);
    return out;
}

/// Parameter names accepted by set_parameter, values in SI units.
inline constexpr std::string_view sweepable_parameters[] = {
    "d", "P_in", "mu", "M", "rho1", "rho2", "f_R", "f1", "L1", "L2", "lambda", "b_gain", "b_tim", "N",
};

/// Set one named parameter (SI units). Setting N switches the scenario to an explicit N.
inline void set_parameter(Scenario& s, std::string_view name, double value) {
    auto& g = s.geometry;
    if (name == "d") g.d = value;
    else if (name == "P_in") s.link.pump_input_power = value;
    else if (name == "mu") s.receiver.mu = value;
    else if (name == "M") g.magnification = value;
    else if (name == "rho1") g.rho1 = value;
    else if (name == "rho2") g.rho2 = value;
    else if (name == "f_R") g.f_R = value;
    else if (name == "f1") g.f1 = value;
    else if (name == "L1") g.L1 = value;
    else if (name == "L2") g.L2 = value;
    else if (name == "lambda") g.lambda = value;
    else if (name == "b_gain") g.b_gain = value;
    else if (name == "b_tim") g.b_tim = value;
    else if (name == "N") {
        s.link.N = value;
        s.model.n_source = NSource::explicit_value;
    } else {
        throw domain_error("unknown parameter '" + std::string(name) + "'");
    }
}

} // namespace bcrb

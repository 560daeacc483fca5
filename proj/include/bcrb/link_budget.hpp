#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "error.hpp"
#include "ray_matrix.hpp"

namespace bcrb {

/**
 * Constants of the cyclic-power model and the PV converter.
 *
 * `pump_input_power` is the single input-power knob. It is described both
 * as the electrical input and as the energy stored in the gain module; the
 * model uses it identically in either reading.
 */
struct LinkBudgetParams {
    double R = 0.2618;               ///< effective reflectivity
    double eta_c = 0.3384;           ///< compounded conversion efficiency
    double C = -51.83;               ///< intercept power (W)
    double N = 1.0;                  ///< transmission-loss scale factor
    double a1 = 0.3487;              ///< PV slope
    double b1 = -1.535;              ///< PV intercept (W)
    double pump_input_power = 210.0; ///< W

    friend bool operator==(const LinkBudgetParams&, const LinkBudgetParams&) = default;
};

inline void validate(const LinkBudgetParams& p, std::string_view path = "link") {
    const auto fail = [&](std::string_view field, const std::string& why) {
        throw validation_error(std::string(path) + "." + std::string(field), why);
    };
    for (auto [name, v] : {std::pair<std::string_view, double>{"R", p.R}, {"eta_c", p.eta_c}, {"C", p.C},
                           {"N", p.N}, {"a1", p.a1}, {"b1", p.b1}, {"pump_input_power", p.pump_input_power}}) {
        if (!std::isfinite(v)) fail(name, "must be finite");
    }
    if (!(p.R > 0.0 && p.R < 1.0)) fail("R", "must lie in (0, 1)");
    if (!(p.eta_c > 0.0 && p.eta_c <= 1.0)) fail("eta_c", "must lie in (0, 1]");
    if (!(p.N > 0.0)) fail("N", "must be positive");
    if (!(p.a1 > 0.0)) fail("a1", "must be positive");
    if (p.pump_input_power < 0.0) fail("pump_input_power", "must be non-negative");
}

/// Whether negative power results (below lasing threshold) are clamped to 0 W.
enum class PowerClamp { clamp, raw };

/// Diffraction/spillover loss at an aperture of radius `aperture`:
/// N exp(-2 pi b^2 / (lambda d)). Increases with distance from 0 towards N.
inline double transmission_loss(double distance, double aperture, double lambda, double N) {
    if (!(distance > 0.0)) {
        throw domain_error("transmission_loss: distance must be positive");
    }
    if (!(aperture > 0.0) || !(lambda > 0.0) || !(N > 0.0)) {
        throw domain_error("transmission_loss: aperture, wavelength and N must be positive");
    }
    return N * std::exp(-2.0 * std::numbers::pi * aperture * aperture / (lambda * distance));
}

/// Slope of the cyclic-power line before the loss term: 2(1-R)eta_c/(1+R).
inline double slope_numerator(const LinkBudgetParams& p) noexcept {
    return 2.0 * (1.0 - p.R) * p.eta_c / (1.0 + p.R);
}

/**
 * External beam power leaving M2:
 *
 *     P_beam = 2(1-R) eta_c / ((1+R)(delta_t - ln R)) * P_in + C
 *
 * `delta_t` is added to -ln R as a bare number.
 */
inline double beam_power(double pump_input_power, double delta_t, const LinkBudgetParams& p,
                         PowerClamp clamp = PowerClamp::clamp) {
    if (!(pump_input_power >= 0.0) || !(delta_t >= 0.0)) {
        throw domain_error("beam_power: input power and loss must be non-negative");
    }
    const double power = slope_numerator(p) / (delta_t - std::log(p.R)) * pump_input_power + p.C;
    return clamp == PowerClamp::clamp && power < 0.0 ? 0.0 : power;
}

/// Loss delta_t that makes beam_power(pump_input_power, delta_t) equal `target`
/// on the unclamped line. May be negative when the target is unreachable.
inline double loss_for_beam_power(double target, double pump_input_power, const LinkBudgetParams& p) {
    if (!(target > p.C)) {
        throw domain_error("loss_for_beam_power: target must exceed the intercept C");
    }
    return slope_numerator(p) * pump_input_power / (target - p.C) + std::log(p.R);
}

/// Limiting aperture of each system: the telescope rim once the beam is
/// compressed, otherwise the gain module itself.
inline double effective_aperture(const CavityGeometry& g, SystemKind system) noexcept {
    return system == SystemKind::bcrb ? g.b_tim : g.b_gain;
}

/// Electrical output of the PV cell fed with the fraction `mu` of the beam.
inline double pv_output(double beam, double mu, const LinkBudgetParams& p, PowerClamp clamp = PowerClamp::clamp) {
    if (!(mu >= 0.0 && mu <= 1.0)) {
        throw domain_error("pv_output: split ratio mu must lie in [0, 1]");
    }
    if (!(beam >= 0.0)) {
        throw domain_error("pv_output: beam power must be non-negative");
    }
    const double out = p.a1 * mu * beam + p.b1;
    return clamp == PowerClamp::clamp && out < 0.0 ? 0.0 : out;
}

} // namespace bcrb

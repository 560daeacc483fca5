#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "error.hpp"

namespace bcrb {

/// APD receiver and noise constants. `q` is the physical electron charge.
struct ReceiverParams {
    double gamma = 0.6;    ///< APD responsivity (A/W)
    double mu = 0.9;       ///< fraction of the beam sent to the PV cell
    double q = 1.602e-19;  ///< electron charge (C)
    double I_bg = 5.1e-3;  ///< background current (A)
    double B_x = 811.7e6;  ///< noise bandwidth (Hz)
    double K = 1.38e-23;   ///< Boltzmann constant (J/K)
    double T = 300.0;      ///< temperature (K)
    double R_L = 1e4;      ///< load resistor (Ohm)

    friend bool operator==(const ReceiverParams&, const ReceiverParams&) = default;
};

inline void validate(const ReceiverParams& r, std::string_view path = "receiver") {
    const auto fail = [&](std::string_view field, const std::string& why) {
        throw validation_error(std::string(path) + "." + std::string(field), why);
    };
    if (!(r.mu >= 0.0 && r.mu <= 1.0)) fail("mu", "must lie in [0, 1] (got " + std::to_string(r.mu) + ")");
    const std::pair<std::string_view, double> positives[] = {{"gamma", r.gamma}, {"q", r.q}, {"I_bg", r.I_bg},
                                                             {"B_x", r.B_x},     {"K", r.K}, {"T", r.T},
                                                             {"R_L", r.R_L}};
    for (auto [name, v] : positives) {
        if (!std::isfinite(v) || !(v > 0.0)) fail(name, "must be positive and finite");
    }
}

/**
 * Level of the APD data branch, gamma (1 - mu) P_beam. Its unit is
 * responsivity times power; it feeds the noise and capacity expressions as
 * a bare scalar, so it is kept distinct from a power in watts.
 */
struct DataSignalLevel {
    double value = 0.0;
};

struct NoiseBudget {
    double shot = 0.0;    ///< 2 q (P_data + I_bg) B_x
    double thermal = 0.0; ///< 4 K T B_x / R_L
    double total() const noexcept { return shot + thermal; }
};

enum class LogBase { two, natural };

inline std::string_view to_string(LogBase b) noexcept { return b == LogBase::two ? "2" : "e"; }

inline DataSignalLevel data_signal(double beam, const ReceiverParams& r) {
    if (!(beam >= 0.0)) {
        throw domain_error("data_signal: beam power must be non-negative");
    }
    return {r.gamma * (1.0 - r.mu) * beam};
}

inline double shot_noise(DataSignalLevel data, const ReceiverParams& r) {
    if (!(data.value >= 0.0)) {
        throw domain_error("shot_noise: data signal must be non-negative");
    }
    return 2.0 * r.q * (data.value + r.I_bg) * r.B_x;
}

inline double thermal_noise(const ReceiverParams& r) noexcept { return 4.0 * r.K * r.T * r.B_x / r.R_L; }

inline NoiseBudget noise_budget(DataSignalLevel data, const ReceiverParams& r) {
    return {shot_noise(data, r), thermal_noise(r)};
}

/// 1/2 log(1 + P_data^2 e / (2 pi n_total)); bit/s/Hz for base 2, nat/s/Hz for base e.
inline double spectral_efficiency(DataSignalLevel data, double n2_total, LogBase base = LogBase::two) {
    if (!(n2_total > 0.0)) {
        throw domain_error("spectral_efficiency: total noise power must be positive");
    }
    const double snr = data.value * data.value * std::numbers::e / (2.0 * std::numbers::pi * n2_total);
    return 0.5 * (base == LogBase::two ? std::log2(1.0 + snr) : std::log1p(snr));
}

} // namespace bcrb

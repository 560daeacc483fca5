#pragma once

#include <cmath>
#include <concepts>
#include <numbers>
#include <string>

#include "error.hpp"
#include "ray_matrix.hpp"

namespace bcrb {

template <std::floating_point T>
struct MirrorSpots {
    T omega1; ///< spot radius on M1 (m)
    T omega2; ///< spot radius on M2 (m)
};

struct SpotRadii {
    double omega1; ///< on M1 (m)
    double omega2; ///< on M2 (m)
    double omega3; ///< on the gain module (m)
};

/**
 * Fundamental-mode spot radii on the two end mirrors of a resonator with
 * round-trip matrix `m`:
 *
 *     omega1^4 = -(lambda/pi)^2 b^2 d / (a (ad - 1))
 *     omega2^4 = -(lambda/pi)^2 b^2 a / (d (ad - 1))
 *
 * A radicand that is not strictly positive means the cavity sits on or beyond
 * its stability boundary and raises unstable_cavity; it is never clamped.
 */
template <std::floating_point T>
MirrorSpots<T> mirror_spot_radii(const TransferMatrix<T>& m, T lambda) {
    if (!(lambda > T(0)) || !std::isfinite(lambda)) {
        throw domain_error("mirror_spot_radii: wavelength must be positive");
    }
    const auto report = stability_check(m);
    if (!report.stable) {
        throw unstable_cavity("mirror_spot_radii: cavity unstable (" + std::string(report.diagnostic) +
                              ", a*d = " + std::to_string(report.product) + ")");
    }
    const T scale = lambda / std::numbers::pi_v<T>;
    const T denom_core = m.a * m.d - T(1);
    const T radicand1 = -(scale * scale) * m.b * m.b * m.d / (m.a * denom_core);
    const T radicand2 = -(scale * scale) * m.b * m.b * m.a / (m.d * denom_core);
    if (!(radicand1 > T(0)) || !std::isfinite(radicand1)) {
        throw unstable_cavity("mirror_spot_radii: omega1 radicand is not positive");
    }
    if (!(radicand2 > T(0)) || !std::isfinite(radicand2)) {
        throw unstable_cavity("mirror_spot_radii: omega2 radicand is not positive");
    }
    return {std::sqrt(std::sqrt(radicand1)), std::sqrt(std::sqrt(radicand2))};
}

/**
 * Gaussian spot radius after propagating `distance` from a mirror of
 * curvature `rho1` on which the spot radius is `omega1`:
 *
 *     omega3^2 = omega1^2 [ (1 + L/rho1)^2 + (L lambda / (pi omega1^2))^2 ]
 *
 * Zero distance returns `omega1` unchanged.
 */
template <std::floating_point T>
T propagate_spot(T omega1, T rho1, T distance, T lambda) {
    if (!(omega1 > T(0)) || !(lambda > T(0)) || !(distance >= T(0)) || rho1 == T(0)) {
        throw domain_error("propagate_spot: need omega1 > 0, lambda > 0, distance >= 0, rho1 != 0");
    }
    const T focus = T(1) + distance / rho1;
    const T diffraction = distance * lambda / (std::numbers::pi_v<T> * omega1 * omega1);
    return omega1 * std::sqrt(focus * focus + diffraction * diffraction);
}

/// Spot radii on M1, M2 and the gain module for the chosen cavity at `g.d`.
inline SpotRadii spot_radii(const CavityGeometry& g, SystemKind system) {
    const auto mirrors = mirror_spot_radii(round_trip(g, system), g.lambda);
    return {mirrors.omega1, mirrors.omega2, propagate_spot(mirrors.omega1, g.rho1, g.L1, g.lambda)};
}

} // namespace bcrb

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "error.hpp"
#include "gaussian_beam.hpp"
#include "link_budget.hpp"
#include "ray_matrix.hpp"

namespace bcrb {

struct DistanceSearchOptions {
    double stride = 0.1;     ///< scan step before bisection (m)
    double tolerance = 1e-3; ///< final bracket width (m)
};

/// Upper edge of the first stable band in transmission distance.
struct StabilityEdge {
    double d_max = 0.0;          ///< largest stable distance found (m)
    double unstable_probe = 0.0; ///< nearest probe beyond d_max known to be unstable (m); equals d_max when range-limited
    std::size_t band_count = 0;  ///< stable bands seen on the scan grid
    bool range_limited = false;  ///< stable all the way to d_hi
};

namespace detail {

inline bool stable_at_distance(CavityGeometry g, double d, SystemKind system) {
    g.d = d;
    return is_stable(round_trip(g, system));
}

inline bool stable_with_rho2(CavityGeometry g, double rho2, SystemKind system) {
    g.rho2 = rho2;
    return is_stable(round_trip(g, system));
}

} // namespace detail

/**
 * Largest distance d <= d_hi at which the cavity is stable, restricted to the
 * band containing the smallest stable d. The range (0, d_hi] is scanned on a
 * fixed stride; the first stable-to-unstable transition is then bisected down
 * to `tolerance`. Other bands are counted, not merged.
 */
inline StabilityEdge max_stable_distance(const CavityGeometry& g, double d_hi, DistanceSearchOptions opt = {},
                                         SystemKind system = SystemKind::bcrb) {
    if (!(d_hi > 0.0) || !(opt.stride > 0.0) || !(opt.tolerance > 0.0)) {
        throw domain_error("max_stable_distance: d_hi, stride and tolerance must be positive");
    }
    std::vector<double> grid;
    for (std::size_t k = 1;; ++k) {
        const double d = static_cast<double>(k) * opt.stride;
        if (d >= d_hi) break;
        grid.push_back(d);
    }
    grid.push_back(d_hi);

    std::vector<bool> stable(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        stable[i] = detail::stable_at_distance(g, grid[i], system);
    }

    StabilityEdge edge;
    std::size_t first_stable = grid.size();
    std::size_t first_exit = grid.size();
    bool previous = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (stable[i] && !previous) {
            ++edge.band_count;
            if (first_stable == grid.size()) first_stable = i;
        }
        if (!stable[i] && previous && first_exit == grid.size()) first_exit = i;
        previous = stable[i];
    }
    if (first_stable == grid.size()) {
        throw infeasible_search("max_stable_distance: no stable distance in (0, " + std::to_string(d_hi) + "] m");
    }
    if (first_exit == grid.size()) {
        edge.d_max = edge.unstable_probe = d_hi;
        edge.range_limited = true;
        return edge;
    }

    double lo = grid[first_exit - 1];
    double hi = grid[first_exit];
    while (hi - lo > opt.tolerance) {
        const double mid = 0.5 * (lo + hi);
        (detail::stable_at_distance(g, mid, system) ? lo : hi) = mid;
    }
    edge.d_max = lo;
    edge.unstable_probe = hi;
    return edge;
}

struct CurvatureSearchOptions {
    std::size_t scan_points = 2000;  ///< geometric grid size over [floor_ratio*hi, hi]
    double floor_ratio = 1e-6;
    double rel_tolerance = 1e-12;    ///< bisection bracket relative to the result
};

/**
 * Smallest positive M2 curvature radius that keeps the cavity stable at
 * distance `d`, searched over (0, rho2_hi]. Scans a geometric grid upward,
 * then bisects the first unstable-to-stable transition.
 */
inline double required_rho2(const CavityGeometry& g, double d, double rho2_hi, CurvatureSearchOptions opt = {},
                            SystemKind system = SystemKind::bcrb) {
    if (!(rho2_hi > 0.0) || !(d > 0.0) || opt.scan_points < 2 || !(opt.floor_ratio > 0.0 && opt.floor_ratio < 1.0)) {
        throw domain_error("required_rho2: invalid search range");
    }
    CavityGeometry at_d = g;
    at_d.d = d;

    const double lo_edge = rho2_hi * opt.floor_ratio;
    const double ratio = std::pow(1.0 / opt.floor_ratio, 1.0 / static_cast<double>(opt.scan_points - 1));
    double previous = 0.0;
    for (std::size_t i = 0; i < opt.scan_points; ++i) {
        const double rho2 = i + 1 == opt.scan_points ? rho2_hi : lo_edge * std::pow(ratio, static_cast<double>(i));
        if (detail::stable_with_rho2(at_d, rho2, system)) {
            if (i == 0) return rho2;
            double lo = previous;
            double hi = rho2;
            while (hi - lo > opt.rel_tolerance * hi) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                (detail::stable_with_rho2(at_d, mid, system) ? hi : lo) = mid;
            }
            return hi;
        }
        previous = rho2;
    }
    throw infeasible_search("required_rho2: no rho2 in (0, " + std::to_string(rho2_hi) + "] m stabilises d = " +
                            std::to_string(d) + " m");
}

struct SpotMaximum {
    double omega3_max = 0.0; ///< m
    double at_distance = 0.0; ///< m
};

/// Largest gain-module spot radius over `samples` evenly spaced distances in
/// [d_lo, d_hi]. A degenerate range evaluates the single point.
inline SpotMaximum max_spot_over_range(const CavityGeometry& g, double d_lo, double d_hi, std::size_t samples = 200,
                                       SystemKind system = SystemKind::bcrb) {
    if (!(d_lo > 0.0) || !(d_hi >= d_lo)) {
        throw domain_error("max_spot_over_range: need 0 < d_lo <= d_hi");
    }
    if (d_hi > d_lo && samples < 200) {
        throw domain_error("max_spot_over_range: at least 200 samples required");
    }
    const std::size_t n = d_hi == d_lo ? 1 : samples;
    SpotMaximum best;
    CavityGeometry probe = g;
    for (std::size_t i = 0; i < n; ++i) {
        probe.d = n == 1 ? d_lo
                         : (i + 1 == n ? d_hi
                                       : d_lo + (d_hi - d_lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        if (!is_stable(round_trip(probe, system))) {
            throw unstable_cavity("max_spot_over_range: cavity unstable at d = " + std::to_string(probe.d) + " m");
        }
        const double omega3 = spot_radii(probe, system).omega3;
        if (omega3 > best.omega3_max) best = {omega3, probe.d};
    }
    return best;
}

/**
 * Loss scale factor N that puts the cyclic-power line through an anchor
 * (distance, beam power) at the given input power and aperture. Throws
 * infeasible_search when the anchor would need zero or negative loss.
 */
inline double calibrate_N(double anchor_d, double anchor_beam_power, double pump_input_power, double aperture,
                          double lambda, const LinkBudgetParams& p) {
    if (!(anchor_beam_power > p.C)) {
        throw infeasible_search("calibrate_N: anchor beam power lies below the intercept C");
    }
    const double required_loss = loss_for_beam_power(anchor_beam_power, pump_input_power, p);
    if (!(required_loss > 1e-12)) {
        throw infeasible_search("calibrate_N: anchor is reachable only with non-positive loss (delta_t = " +
                                std::to_string(required_loss) + ")");
    }
    return required_loss / transmission_loss(anchor_d, aperture, lambda, 1.0);
}

} // namespace bcrb

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "error.hpp"
#include "scenario.hpp"
#include "scenario_io.hpp"
#include "search.hpp"

namespace bcrb {

/// Evenly spaced samples including both ends; the last sample is exactly `hi`.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2) {
        throw domain_error("linspace: need at least two samples");
    }
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    v.back() = hi;
    return v;
}

/**
 * Evaluate `fn(i)` for i in [0, n) on up to `threads` workers (0 = hardware
 * concurrency) and return the results in index order. The first exception
 * thrown by any worker is rethrown after all workers have joined.
 */
template <class Fn>
auto parallel_map(std::size_t n, Fn fn, unsigned threads = 0) -> std::vector<decltype(fn(std::size_t{}))> {
    using Result = decltype(fn(std::size_t{}));
    std::vector<Result> results(n);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t i = t; i < n; i += threads) {
                    try {
                        results[i] = fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

struct Column {
    std::string name;
    std::string unit;
    std::vector<double> values;
};

/// Plot-ready table plus the parameter snapshot that produced it.
struct FigureDataset {
    std::string figure_id;
    std::vector<Column> columns;
    std::vector<std::pair<std::string, std::string>> metadata;

    std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().values.size(); }

    const Column& column(std::string_view name) const {
        for (const auto& c : columns) {
            if (c.name == name) return c;
        }
        throw domain_error("dataset " + figure_id + " has no column '" + std::string(name) + "'");
    }
};

enum class FigureId { fig6, fig7, fig8, fig9, fig10, fig11, fig12, fig13 };

inline constexpr FigureId all_figures[] = {FigureId::fig6,  FigureId::fig7,  FigureId::fig8,  FigureId::fig9,
                                           FigureId::fig10, FigureId::fig11, FigureId::fig12, FigureId::fig13};

inline std::string_view to_string(FigureId id) noexcept {
    constexpr std::string_view names[] = {"fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13"};
    return names[static_cast<std::size_t>(id)];
}

inline FigureId parse_figure_id(std::string_view text) {
    for (FigureId id : all_figures) {
        if (to_string(id) == text) return id;
    }
    throw domain_error("unknown figure id '" + std::string(text) + "' (expected fig6..fig13)");
}

/// Sweep ranges and series sets. Defaults follow the reference evaluation.
struct FigureOptions {
    // fig6: distance sweep comparing both cavities
    double compare_d_lo = 1.5, compare_d_hi = 6.0;
    std::size_t compare_d_samples = 46;
    // fig7: input-power sweep at geometry.d
    double compare_pin_lo = 150.0, compare_pin_hi = 300.0;
    std::size_t compare_pin_samples = 31;
    // fig8: d_max versus rho2
    std::vector<double> fig8_magnifications{2.5, 3.5, 5.0};
    double fig8_rho2_lo = 5.0, fig8_rho2_hi = 50.0;
    std::size_t fig8_samples = 46;
    double fig8_d_hi = 200.0;
    DistanceSearchOptions distance_search{};
    // fig9 / fig10: magnification sweeps at several distances
    std::vector<double> target_distances{10.0, 20.0, 30.0, 40.0};
    double magnification_lo = 1.5, magnification_hi = 6.0;
    std::size_t magnification_samples = 46;
    double fig9_rho2_hi = 1000.0;
    CurvatureSearchOptions curvature_search{};
    double fig10_rho2 = 100.0;
    double fig10_d_lo = 0.1;
    std::size_t fig10_range_samples = 200;
    // fig11..fig13: long-range link sweeps on the telescope cavity
    double link_d_lo = 1.0, link_d_hi = 300.0;
    std::size_t link_d_samples = 300;
    std::vector<double> fig11_input_powers{200.0, 225.0, 250.0};
    double fig12_input_power = 200.0;
    std::vector<double> fig12_split_ratios{0.01, 0.1, 0.5, 0.9, 0.99};
    double fig13_split_ratio = 0.9;
    std::vector<double> fig13_input_powers{200.0, 225.0, 250.0};

    unsigned threads = 0; ///< 0 = hardware concurrency
};

namespace detail {

inline std::string compact(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%g", v);
    return buffer;
}

inline std::string exact(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

inline std::string join(const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) out += ' ';
        out += exact(v);
    }
    return out;
}

inline std::string efficiency_unit(const Scenario& s) {
    return s.model.log_base == LogBase::two ? "bit/s/Hz" : "nat/s/Hz";
}

constexpr double not_a_number = std::numeric_limits<double>::quiet_NaN();

inline void add_common_metadata(FigureDataset& ds, const Scenario& given, const Scenario& resolved) {
    ds.metadata.emplace_back("figure", ds.figure_id);
    ds.metadata.emplace_back("N", exact(resolved.link.N));
    ds.metadata.emplace_back("N_source", std::string(to_string(resolved.model.n_source)));
    ds.metadata.emplace_back("lambda_m", exact(resolved.geometry.lambda));
    ds.metadata.emplace_back("log_base", std::string(to_string(resolved.model.log_base)));
    ds.metadata.emplace_back("clamp_negative_power", resolved.model.clamp_negative_power ? "true" : "false");
    ds.metadata.emplace_back("scenario", to_json(given).dump());
}

/// Output of the link chain for a telescope cavity at distance `d`.
inline PointEvaluation link_point(Scenario s, double d, double pump_input_power, double mu) {
    s.geometry.d = d;
    s.link.pump_input_power = pump_input_power;
    s.receiver.mu = mu;
    return evaluate_point(s, SystemKind::bcrb);
}

} // namespace detail

/**
 * Regenerate one figure's dataset. `scenario` supplies every fixed parameter;
 * N is resolved from it first. Rows are computed in parallel and assembled in
 * sweep order, so the result does not depend on `opt.threads`.
 */
inline FigureDataset generate_figure(FigureId id, const Scenario& scenario, const FigureOptions& opt = {}) {
    validate(scenario);
    const Scenario s = resolve_calibration(scenario);
    FigureDataset ds;
    ds.figure_id = std::string(to_string(id));
    detail::add_common_metadata(ds, scenario, s);
    const auto& fmt = detail::compact;

    switch (id) {
    case FigureId::fig6: {
        const auto ds_grid = linspace(opt.compare_d_lo, opt.compare_d_hi, opt.compare_d_samples);
        struct Row {
            double w3b, w3o, w1b, w1o, pb, po;
        };
        const auto rows = parallel_map(
            ds_grid.size(),
            [&](std::size_t i) {
                Scenario p = s;
                p.geometry.d = ds_grid[i];
                const auto b = evaluate_point(p, SystemKind::bcrb);
                const auto o = evaluate_point(p, SystemKind::original);
                return Row{b.spots ? b.spots->omega3 : detail::not_a_number,
                           o.spots ? o.spots->omega3 : detail::not_a_number,
                           b.spots ? b.spots->omega1 : detail::not_a_number,
                           o.spots ? o.spots->omega1 : detail::not_a_number, b.beam_power, o.beam_power};
            },
            opt.threads);
        ds.columns = {{"d", "m", ds_grid},           {"omega3_bcrb", "m", {}},  {"omega3_original", "m", {}},
                      {"omega1_bcrb", "m", {}},      {"omega1_original", "m", {}}, {"P_beam_bcrb", "W", {}},
                      {"P_beam_original", "W", {}}};
        for (const auto& r : rows) {
            ds.columns[1].values.push_back(r.w3b);
            ds.columns[2].values.push_back(r.w3o);
            ds.columns[3].values.push_back(r.w1b);
            ds.columns[4].values.push_back(r.w1o);
            ds.columns[5].values.push_back(r.pb);
            ds.columns[6].values.push_back(r.po);
        }
        ds.metadata.emplace_back("P_in_W", detail::exact(s.link.pump_input_power));
        break;
    }
    case FigureId::fig7: {
        const auto pins = linspace(opt.compare_pin_lo, opt.compare_pin_hi, opt.compare_pin_samples);
        ds.columns = {{"P_in", "W", pins},
                      {"P_beam_bcrb", "W", {}},
                      {"P_beam_original", "W", {}},
                      {"efficiency_bcrb", "1", {}},
                      {"efficiency_original", "1", {}}};
        for (double pin : pins) {
            Scenario p = s;
            p.link.pump_input_power = pin;
            const double pb = evaluate_point(p, SystemKind::bcrb).beam_power;
            const double po = evaluate_point(p, SystemKind::original).beam_power;
            ds.columns[1].values.push_back(pb);
            ds.columns[2].values.push_back(po);
            ds.columns[3].values.push_back(pin > 0.0 ? pb / pin : 0.0);
            ds.columns[4].values.push_back(pin > 0.0 ? po / pin : 0.0);
        }
        ds.metadata.emplace_back("d_m", detail::exact(s.geometry.d));
        break;
    }
    case FigureId::fig8: {
        const auto rho2s = linspace(opt.fig8_rho2_lo, opt.fig8_rho2_hi, opt.fig8_samples);
        ds.columns.push_back({"rho2", "m", rho2s});
        for (double M : opt.fig8_magnifications) {
            const auto edges = parallel_map(
                rho2s.size(),
                [&](std::size_t i) {
                    CavityGeometry g = s.geometry;
                    g.magnification = M;
                    g.rho2 = rho2s[i];
                    return max_stable_distance(g, opt.fig8_d_hi, opt.distance_search);
                },
                opt.threads);
            Column dmax{"d_max_M" + fmt(M), "m", {}};
            Column bands{"bands_M" + fmt(M), "1", {}};
            for (const auto& e : edges) {
                dmax.values.push_back(e.d_max);
                bands.values.push_back(static_cast<double>(e.band_count));
            }
            ds.columns.push_back(std::move(dmax));
            ds.columns.push_back(std::move(bands));
        }
        ds.metadata.emplace_back("magnifications", detail::join(opt.fig8_magnifications));
        ds.metadata.emplace_back("d_hi_m", detail::exact(opt.fig8_d_hi));
        ds.metadata.emplace_back("scan_stride_m", detail::exact(opt.distance_search.stride));
        ds.metadata.emplace_back("bisection_tolerance_m", detail::exact(opt.distance_search.tolerance));
        break;
    }
    case FigureId::fig9: {
        const auto Ms = linspace(opt.magnification_lo, opt.magnification_hi, opt.magnification_samples);
        ds.columns.push_back({"M", "1", Ms});
        for (double d : opt.target_distances) {
            ds.columns.push_back({"rho2_min_d" + fmt(d), "m",
                                  parallel_map(
                                      Ms.size(),
                                      [&](std::size_t i) {
                                          CavityGeometry g = s.geometry;
                                          g.magnification = Ms[i];
                                          return required_rho2(g, d, opt.fig9_rho2_hi, opt.curvature_search);
                                      },
                                      opt.threads)});
        }
        ds.metadata.emplace_back("distances_m", detail::join(opt.target_distances));
        ds.metadata.emplace_back("rho2_hi_m", detail::exact(opt.fig9_rho2_hi));
        break;
    }
    case FigureId::fig10: {
        const auto Ms = linspace(opt.magnification_lo, opt.magnification_hi, opt.magnification_samples);
        ds.columns.push_back({"M", "1", Ms});
        for (double d : opt.target_distances) {
            ds.columns.push_back({"omega3_max_d" + fmt(d), "m",
                                  parallel_map(
                                      Ms.size(),
                                      [&](std::size_t i) {
                                          CavityGeometry g = s.geometry;
                                          g.magnification = Ms[i];
                                          g.rho2 = opt.fig10_rho2;
                                          return max_spot_over_range(g, opt.fig10_d_lo, d, opt.fig10_range_samples)
                                              .omega3_max;
                                      },
                                      opt.threads)});
        }
        ds.metadata.emplace_back("distances_m", detail::join(opt.target_distances));
        ds.metadata.emplace_back("rho2_m", detail::exact(opt.fig10_rho2));
        ds.metadata.emplace_back("d_lo_m", detail::exact(opt.fig10_d_lo));
        break;
    }
    case FigureId::fig11:
    case FigureId::fig12:
    case FigureId::fig13: {
        const auto dgrid = linspace(opt.link_d_lo, opt.link_d_hi, opt.link_d_samples);
        ds.columns.push_back({"d", "m", dgrid});
        struct Series {
            std::string name;
            double pump;
            double mu;
        };
        std::vector<Series> series;
        if (id == FigureId::fig11) {
            for (double pin : opt.fig11_input_powers) series.push_back({"P_out_Pin" + fmt(pin), pin, 1.0});
        } else if (id == FigureId::fig12) {
            for (double mu : opt.fig12_split_ratios)
                series.push_back({"C_tilde_mu" + fmt(mu), opt.fig12_input_power, mu});
        } else {
            for (double pin : opt.fig13_input_powers)
                series.push_back({"C_tilde_Pin" + fmt(pin), pin, opt.fig13_split_ratio});
        }
        for (const auto& sr : series) {
            Column col{sr.name, id == FigureId::fig11 ? "W" : detail::efficiency_unit(s), {}};
            col.values = parallel_map(
                dgrid.size(),
                [&](std::size_t i) {
                    const auto pt = detail::link_point(s, dgrid[i], sr.pump, sr.mu);
                    return id == FigureId::fig11 ? pt.pv_output : pt.spectral_efficiency;
                },
                opt.threads);
            ds.columns.push_back(std::move(col));
        }
        ds.metadata.emplace_back("system", "bcrb");
        ds.metadata.emplace_back("aperture_m", detail::exact(s.geometry.b_tim));
        if (id == FigureId::fig11) ds.metadata.emplace_back("mu", "1");
        if (id == FigureId::fig12) ds.metadata.emplace_back("P_in_W", detail::exact(opt.fig12_input_power));
        if (id == FigureId::fig13) ds.metadata.emplace_back("mu", detail::exact(opt.fig13_split_ratio));
        break;
    }
    }
    return ds;
}

/// One-dimensional sweep of a named parameter over [lo, hi] (SI units).
struct SweepSpec {
    std::string variable;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t samples = 2;
    Scenario fixed;
    SystemKind system = SystemKind::bcrb;
};

inline void validate(const SweepSpec& spec) {
    if (std::find(std::begin(sweepable_parameters), std::end(sweepable_parameters), spec.variable) ==
        std::end(sweepable_parameters)) {
        throw domain_error("sweep: unknown variable '" + spec.variable + "'");
    }
    if (!(spec.lo < spec.hi)) throw domain_error("sweep: require lo < hi");
    if (spec.samples < 2) throw domain_error("sweep: require at least two samples");
}

/**
 * Evaluate the full model at each sample. Cavity quantities of unstable
 * points are written as NaN; the power chain is evaluated regardless.
 */
inline FigureDataset run_sweep(const SweepSpec& spec, unsigned threads = 0) {
    validate(spec);
    validate(spec.fixed);
    const auto grid = linspace(spec.lo, spec.hi, spec.samples);
    const auto points = parallel_map(
        grid.size(),
        [&](std::size_t i) {
            Scenario p = spec.fixed;
            set_parameter(p, spec.variable, grid[i]);
            validate(p);
            return evaluate_point(resolve_calibration(p), spec.system);
        },
        threads);

    FigureDataset ds;
    ds.figure_id = "sweep";
    detail::add_common_metadata(ds, spec.fixed, resolve_calibration(spec.fixed));
    ds.metadata.emplace_back("variable", spec.variable);
    ds.metadata.emplace_back("system", std::string(to_string(spec.system)));

    ds.columns = {{spec.variable, "SI", grid}, {"AD", "1", {}},      {"stable", "1", {}},
                  {"omega1", "m", {}},         {"omega2", "m", {}},  {"omega3", "m", {}},
                  {"delta_t", "1", {}},        {"P_beam", "W", {}},  {"P_out", "W", {}},
                  {"C_tilde", detail::efficiency_unit(spec.fixed), {}}};
    for (const auto& pt : points) {
        ds.columns[1].values.push_back(pt.stability.product);
        ds.columns[2].values.push_back(pt.stability.stable ? 1.0 : 0.0);
        ds.columns[3].values.push_back(pt.spots ? pt.spots->omega1 : detail::not_a_number);
        ds.columns[4].values.push_back(pt.spots ? pt.spots->omega2 : detail::not_a_number);
        ds.columns[5].values.push_back(pt.spots ? pt.spots->omega3 : detail::not_a_number);
        ds.columns[6].values.push_back(pt.delta_t);
        ds.columns[7].values.push_back(pt.beam_power);
        ds.columns[8].values.push_back(pt.pv_output);
        ds.columns[9].values.push_back(pt.spectral_efficiency);
    }
    return ds;
}

} // namespace bcrb

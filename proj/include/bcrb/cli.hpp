#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "figures.hpp"
#include "scenario.hpp"
#include "scenario_io.hpp"
#include "search.hpp"

namespace bcrb::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int { success = 0, domain_failure = 1, infeasible = 2 };

namespace detail {

inline void line(std::ostream& out, std::string_view name, double value, std::string_view unit) {
    out << name << " = " << format_number(value) << " [" << unit << "]\n";
}

inline void line(std::ostream& out, std::string_view name, std::string_view value) {
    out << name << " = " << value << '\n';
}

inline void write_output(const std::optional<std::string>& path, std::ostream& out, const std::string& text) {
    if (!path) {
        out << text;
        return;
    }
    std::ofstream file(*path, std::ios::binary);
    if (!file) throw config_error(*path + ": cannot open output file");
    file << text;
}

} // namespace detail

/**
 * Run one command line (without the program name). Results go to `out`,
 * single-line diagnostics to `err`. Returns 0 on success, 1 on a domain or
 * validation error, 2 when a search or calibration is infeasible.
 */
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Beam-compression resonant beam link simulator"};
    app.name("bcrb");
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_path;
    bool strict = false;
    std::optional<double> distance;
    std::optional<double> pump_input_power;
    std::optional<double> split_ratio;
    std::string system_name = "bcrb";

    app.add_option("--config", config_path, "Scenario JSON file (defaults apply when omitted)");
    app.add_flag("--strict", strict, "Treat unknown scenario keys as errors");
    app.add_option("--d", distance, "Transmission distance (m)");
    app.add_option("--P-in", pump_input_power, "Pump input power (W)");
    app.add_option("--mu", split_ratio, "Split ratio to the PV cell, 0..1");
    app.add_option("--system", system_name, "Cavity: bcrb or original")
        ->check(CLI::IsMember({"bcrb", "original"}));

    auto* stability = app.add_subcommand("stability", "Round-trip stability and maximum stable distance");
    double d_hi = 1000.0;
    stability->add_option("--d-hi", d_hi, "Upper end of the distance search (m)");

    auto* spot = app.add_subcommand("spot", "Spot radii on M1, M2 and the gain module");
    auto* power = app.add_subcommand("power", "Transmission loss, beam power and PV output");
    auto* comms = app.add_subcommand("comms", "Noise terms and spectral efficiency");

    auto* calibrate = app.add_subcommand("calibrate", "Fit the loss scale factor N to the calibration anchor");
    std::optional<std::string> calibrate_out;
    calibrate->add_option("--out", calibrate_out, "Write the calibrated scenario (explicit N) to this path");

    auto* figure = app.add_subcommand("figure", "Write a figure dataset as CSV");
    std::string figure_id;
    std::optional<std::string> figure_out;
    figure->add_option("id", figure_id, "fig6 .. fig13")->required();
    figure->add_option("--out", figure_out, "CSV path (stdout when omitted)");

    auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and write CSV");
    SweepSpec spec;
    std::optional<std::string> sweep_out;
    sweep->add_option("--var", spec.variable, "Parameter name (SI units)")->required();
    sweep->add_option("--lo", spec.lo, "Lower end")->required();
    sweep->add_option("--hi", spec.hi, "Upper end")->required();
    sweep->add_option("--samples", spec.samples, "Number of samples (>= 2)");
    sweep->add_option("--out", sweep_out, "CSV path (stdout when omitted)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? success : domain_failure;
    }

    try {
        Scenario scenario;
        if (config_path) {
            auto loaded = load_scenario(*config_path, strict ? Strictness::strict : Strictness::lax);
            for (const auto& w : loaded.warnings) err << "warning: " << w << '\n';
            scenario = loaded.scenario;
        }
        if (distance) scenario.geometry.d = *distance;
        if (pump_input_power) scenario.link.pump_input_power = *pump_input_power;
        if (split_ratio) scenario.receiver.mu = *split_ratio;
        validate(scenario);
        const SystemKind system = system_name == "original" ? SystemKind::original : SystemKind::bcrb;

        if (*stability) {
            const auto report = stability_check(round_trip(scenario.geometry, system));
            detail::line(out, "system", to_string(system));
            detail::line(out, "d", scenario.geometry.d, "m");
            detail::line(out, "AD", report.product, "1");
            detail::line(out, "stable", report.stable ? "true" : "false");
            const auto edge = max_stable_distance(scenario.geometry, d_hi, {}, system);
            detail::line(out, "d_max", edge.d_max, "m");
            detail::line(out, "stability_bands", static_cast<double>(edge.band_count), "1");
            if (edge.range_limited) detail::line(out, "d_max_limited_by_search_range", "true");
        } else if (*spot) {
            const auto radii = spot_radii(scenario.geometry, system);
            detail::line(out, "system", to_string(system));
            detail::line(out, "d", scenario.geometry.d, "m");
            detail::line(out, "omega1", radii.omega1, "m");
            detail::line(out, "omega2", radii.omega2, "m");
            detail::line(out, "omega3", radii.omega3, "m");
        } else if (*power || *comms) {
            const Scenario resolved = resolve_calibration(scenario);
            const auto pt = evaluate_point(resolved, system);
            detail::line(out, "system", to_string(system));
            detail::line(out, "d", resolved.geometry.d, "m");
            detail::line(out, "P_in", resolved.link.pump_input_power, "W");
            detail::line(out, "mu", resolved.receiver.mu, "1");
            detail::line(out, "N", resolved.link.N, "1");
            if (*power) {
                detail::line(out, "delta_t", pt.delta_t, "1");
                detail::line(out, "P_beam", pt.beam_power, "W");
                detail::line(out, "P_out", pt.pv_output, "W");
            } else {
                detail::line(out, "P_beam", pt.beam_power, "W");
                detail::line(out, "P_data", pt.data.value, "A");
                detail::line(out, "n2_shot", pt.noise.shot, "A^2");
                detail::line(out, "n2_thermal", pt.noise.thermal, "A^2");
                detail::line(out, "n2_total", pt.noise.total(), "A^2");
                detail::line(out, "C_tilde", pt.spectral_efficiency,
                             resolved.model.log_base == LogBase::two ? "bit/s/Hz" : "nat/s/Hz");
            }
        } else if (*calibrate) {
            const double N = calibrated_N(scenario);
            const auto& a = scenario.model.anchor;
            detail::line(out, "anchor_system", to_string(a.system));
            detail::line(out, "anchor_d", a.distance, "m");
            detail::line(out, "anchor_P_beam", a.beam_power, "W");
            detail::line(out, "anchor_P_in", a.pump_input_power, "W");
            detail::line(out, "N", N, "1");
            if (calibrate_out) {
                Scenario fitted = scenario;
                fitted.link.N = N;
                fitted.model.n_source = NSource::explicit_value;
                save_scenario(*calibrate_out, fitted);
            }
        } else if (*figure) {
            const auto ds = generate_figure(parse_figure_id(figure_id), scenario);
            detail::write_output(figure_out, out, to_csv(ds));
        } else if (*sweep) {
            spec.fixed = scenario;
            spec.system = system;
            detail::write_output(sweep_out, out, to_csv(run_sweep(spec)));
        }
    } catch (const infeasible_search& e) {
        err << "error: " << e.what() << '\n';
        return infeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return domain_failure;
    }
    return success;
}

} // namespace bcrb::cli

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "scenario.hpp"

namespace bcrb {

/// Unknown keys raise config_error in strict mode and become warnings otherwise.
enum class Strictness { strict, lax };

struct LoadedScenario {
    Scenario scenario;
    std::vector<std::string> warnings;
};

namespace io {

/// Unit a bare number is read in. Lengths may also be written as "<value> <unit>".
enum class Unit { none, metre, millimetre, nanometre };

/// Exact conversion to metres: sub-metre units divide so that, e.g., 880 mm
/// becomes the double nearest to 0.88.
inline double to_metres(double value, std::string_view unit, const std::string& path) {
    if (unit == "m") return value;
    if (unit == "km") return value * 1e3;
    if (unit == "cm") return value / 1e2;
    if (unit == "mm") return value / 1e3;
    if (unit == "um" || unit == "µm") return value / 1e6;
    if (unit == "nm") return value / 1e9;
    throw config_error(path + ": unit error: unknown length unit '" + std::string(unit) + "'");
}

inline std::string_view default_unit(Unit u) noexcept {
    switch (u) {
    case Unit::millimetre: return "mm";
    case Unit::nanometre: return "nm";
    default: return "m";
    }
}

inline double parse_quantity(const nlohmann::json& value, Unit unit, const std::string& path) {
    if (value.is_number()) {
        const double number = value.get<double>();
        return unit == Unit::none ? number : to_metres(number, default_unit(unit), path);
    }
    if (!value.is_string()) {
        throw config_error(path + ": expected a number");
    }
    if (unit == Unit::none) {
        throw config_error(path + ": unit error: dimensionless field does not accept a unit string");
    }
    const std::string text = value.get<std::string>();
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first != last && std::isspace(static_cast<unsigned char>(*first))) ++first;
    double number = 0.0;
    const auto [rest, ec] = std::from_chars(first, last, number);
    if (ec != std::errc{}) {
        throw config_error(path + ": unit error: cannot parse quantity '" + text + "'");
    }
    std::string_view suffix(rest, static_cast<std::size_t>(last - rest));
    while (!suffix.empty() && std::isspace(static_cast<unsigned char>(suffix.front()))) suffix.remove_prefix(1);
    while (!suffix.empty() && std::isspace(static_cast<unsigned char>(suffix.back()))) suffix.remove_suffix(1);
    return to_metres(number, suffix.empty() ? default_unit(unit) : suffix, path);
}

struct NumberField {
    std::string_view key;
    double* target;
    Unit unit;
};

/// Collects unknown-key diagnostics for one document.
class KeyChecker {
public:
    KeyChecker(Strictness mode, std::vector<std::string>& warnings) : mode_(mode), warnings_(warnings) {}

    void check(const nlohmann::json& object, const std::string& path, std::initializer_list<std::string_view> known) {
        for (const auto& item : object.items()) {
            if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
                const std::string where = path.empty() ? item.key() : path + "." + item.key();
                if (mode_ == Strictness::strict) {
                    throw config_error(where + ": unknown key");
                }
                warnings_.push_back(where + ": unknown key ignored");
            }
        }
    }

private:
    Strictness mode_;
    std::vector<std::string>& warnings_;
};

inline const nlohmann::json* section(const nlohmann::json& root, std::string_view key, const std::string& path) {
    const auto it = root.find(key);
    if (it == root.end()) return nullptr;
    if (!it->is_object()) throw config_error(path + std::string(key) + ": expected an object");
    return &*it;
}

inline void read_numbers(const nlohmann::json& object, const std::string& path, std::initializer_list<NumberField> fields) {
    for (const auto& f : fields) {
        const auto it = object.find(f.key);
        if (it != object.end()) {
            *f.target = parse_quantity(*it, f.unit, path + "." + std::string(f.key));
        }
    }
}

inline SystemKind parse_system(const nlohmann::json& value, const std::string& path) {
    if (value == "bcrb") return SystemKind::bcrb;
    if (value == "original") return SystemKind::original;
    throw config_error(path + ": expected \"bcrb\" or \"original\"");
}

/// Lengths are written in metres with a unit string so that reloading is exact.
inline std::string metres(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g m", value);
    return buffer;
}

} // namespace io

/**
 * Build a validated Scenario from a JSON document. Missing keys keep their
 * defaults. Bare numbers for optical lengths are millimetres, the distance
 * `d` and anchor distance are metres, `lambda` is nanometres; any length may
 * instead be a string such as "0.88 m" or "880 mm".
 */
inline LoadedScenario parse_scenario(const nlohmann::json& doc, Strictness mode = Strictness::lax) {
    using io::Unit;
    LoadedScenario out;
    if (doc.is_null()) {
        return out;
    }
    if (!doc.is_object()) {
        throw config_error("scenario: top level must be a JSON object");
    }
    io::KeyChecker keys(mode, out.warnings);
    keys.check(doc, "", {"geometry", "link", "receiver", "model_choices"});
    Scenario& s = out.scenario;

    if (const auto* g = io::section(doc, "geometry", "")) {
        keys.check(*g, "geometry",
                   {"rho1", "rho2", "f_R", "f1", "M", "L1", "L2", "d", "b_gain", "b_tim", "lambda"});
        auto& geo = s.geometry;
        io::read_numbers(*g, "geometry",
                         {{"rho1", &geo.rho1, Unit::millimetre},
                          {"rho2", &geo.rho2, Unit::millimetre},
                          {"f_R", &geo.f_R, Unit::millimetre},
                          {"f1", &geo.f1, Unit::millimetre},
                          {"M", &geo.magnification, Unit::none},
                          {"L1", &geo.L1, Unit::millimetre},
                          {"L2", &geo.L2, Unit::millimetre},
                          {"d", &geo.d, Unit::metre},
                          {"b_gain", &geo.b_gain, Unit::millimetre},
                          {"b_tim", &geo.b_tim, Unit::millimetre},
                          {"lambda", &geo.lambda, Unit::nanometre}});
    }
    if (const auto* l = io::section(doc, "link", "")) {
        keys.check(*l, "link", {"R", "eta_c", "C", "N", "a1", "b1", "pump_input_power"});
        auto& link = s.link;
        io::read_numbers(*l, "link",
                         {{"R", &link.R, Unit::none},
                          {"eta_c", &link.eta_c, Unit::none},
                          {"C", &link.C, Unit::none},
                          {"N", &link.N, Unit::none},
                          {"a1", &link.a1, Unit::none},
                          {"b1", &link.b1, Unit::none},
                          {"pump_input_power", &link.pump_input_power, Unit::none}});
    }
    if (const auto* r = io::section(doc, "receiver", "")) {
        keys.check(*r, "receiver", {"gamma", "mu", "q", "I_bg", "B_x", "K", "T", "R_L"});
        auto& rx = s.receiver;
        io::read_numbers(*r, "receiver",
                         {{"gamma", &rx.gamma, Unit::none},
                          {"mu", &rx.mu, Unit::none},
                          {"q", &rx.q, Unit::none},
                          {"I_bg", &rx.I_bg, Unit::none},
                          {"B_x", &rx.B_x, Unit::none},
                          {"K", &rx.K, Unit::none},
                          {"T", &rx.T, Unit::none},
                          {"R_L", &rx.R_L, Unit::none}});
    }
    if (const auto* m = io::section(doc, "model_choices", "")) {
        keys.check(*m, "model_choices", {"log_base", "N_source", "clamp_negative_power", "anchor"});
        auto& model = s.model;
        if (const auto it = m->find("log_base"); it != m->end()) {
            if (*it == "2" || *it == 2) model.log_base = LogBase::two;
            else if (*it == "e") model.log_base = LogBase::natural;
            else throw config_error("model_choices.log_base: expected \"2\" or \"e\"");
        }
        if (const auto it = m->find("N_source"); it != m->end()) {
            if (*it == "calibrated") model.n_source = NSource::calibrated;
            else if (*it == "explicit") model.n_source = NSource::explicit_value;
            else throw config_error("model_choices.N_source: expected \"explicit\" or \"calibrated\"");
        }
        if (const auto it = m->find("clamp_negative_power"); it != m->end()) {
            if (!it->is_boolean()) throw config_error("model_choices.clamp_negative_power: expected a boolean");
            model.clamp_negative_power = it->get<bool>();
        }
        if (const auto* a = io::section(*m, "anchor", "model_choices.")) {
            keys.check(*a, "model_choices.anchor", {"d", "P_beam", "P_in", "system"});
            io::read_numbers(*a, "model_choices.anchor",
                             {{"d", &model.anchor.distance, Unit::metre},
                              {"P_beam", &model.anchor.beam_power, Unit::none},
                              {"P_in", &model.anchor.pump_input_power, Unit::none}});
            if (const auto it = a->find("system"); it != a->end()) {
                model.anchor.system = io::parse_system(*it, "model_choices.anchor.system");
            }
        }
    }
    validate(s);
    return out;
}

/// Read a scenario file. An empty (or whitespace-only) file yields the defaults.
inline LoadedScenario load_scenario(const std::string& path, Strictness mode = Strictness::lax) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw config_error(path + ": cannot open scenario file");
    }
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        return {};
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(path + ": parse error: " + e.what());
    }
    return parse_scenario(doc, mode);
}

inline nlohmann::json to_json(const Scenario& s) {
    const auto& g = s.geometry;
    const auto& l = s.link;
    const auto& r = s.receiver;
    const auto& m = s.model;
    return {
        {"geometry",
         {{"rho1", io::metres(g.rho1)},
          {"rho2", io::metres(g.rho2)},
          {"f_R", io::metres(g.f_R)},
          {"f1", io::metres(g.f1)},
          {"M", g.magnification},
          {"L1", io::metres(g.L1)},
          {"L2", io::metres(g.L2)},
          {"d", io::metres(g.d)},
          {"b_gain", io::metres(g.b_gain)},
          {"b_tim", io::metres(g.b_tim)},
          {"lambda", io::metres(g.lambda)}}},
        {"link",
         {{"R", l.R},
          {"eta_c", l.eta_c},
          {"C", l.C},
          {"N", l.N},
          {"a1", l.a1},
          {"b1", l.b1},
          {"pump_input_power", l.pump_input_power}}},
        {"receiver",
         {{"gamma", r.gamma},
          {"mu", r.mu},
          {"q", r.q},
          {"I_bg", r.I_bg},
          {"B_x", r.B_x},
          {"K", r.K},
          {"T", r.T},
          {"R_L", r.R_L}}},
        {"model_choices",
         {{"log_base", std::string(to_string(m.log_base))},
          {"N_source", std::string(to_string(m.n_source))},
          {"clamp_negative_power", m.clamp_negative_power},
          {"anchor",
           {{"d", io::metres(m.anchor.distance)},
            {"P_beam", m.anchor.beam_power},
            {"P_in", m.anchor.pump_input_power},
            {"system", std::string(to_string(m.anchor.system))}}}}},
    };
}

inline void save_scenario(const std::string& path, const Scenario& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw config_error(path + ": cannot write scenario file");
    }
    out << to_json(s).dump(2) << '\n';
}

} // namespace bcrb

#pragma once

// Scenario ingestion: presets by name ("na2", "fig1b", "fig1c") and scenario
// files in TOML or JSON with an identical schema mirroring SchemeConfig and
// FieldSet field names:
//
//   scheme = "na2"                  # or a [scheme] table:
//   [scheme]
//   u_mps = 538.29
//   gamma02_mhz = 2.38              # optional, derived when absent
//   dipole_ratio_sq = 1.0
//   alpha01 = 1.0
//   [scheme.transitions.01]
//   wavelength_nm = 661.0
//   gamma_mhz = 20.69
//   ... (12, 23, 03)
//
//   fields = "fig1b"                # or [fields.E2] style tables:
//   [fields.E2]
//   rabi_mhz = 128.5
//   detuning_mhz = 92300.0
//   [fields.E3minus]
//   rabi_mhz = 25200.0
//   detuning_mhz = 73200.0
//   direction = -1
//   [fields.E1]
//   detuning_mhz = 100140.0         # optional; leave out to let commands choose
//
// JSON uses the same nested keys. Unknown keys are rejected by name. The TOML
// reader covers the subset used by this schema: tables, key = value with
// strings, numbers, booleans and flat numeric arrays.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dfwm/errors.hpp"
#include "dfwm/scheme.hpp"

namespace dfwm {

struct Scenario {
    SchemeConfig scheme;
    FieldSet fields;
    std::optional<double> omega1_mhz;
    std::string scheme_name = "custom";
    std::string fields_name = "custom";
};

inline SchemeConfig scheme_preset(const std::string& name) {
    if (name == "na2") return sodium_preset();
    throw config_error("unknown scheme preset: " + name);
}

inline FieldSet fields_preset(const std::string& name, const SchemeConfig& s) {
    if (name == "fig1b") return fig1b_fields(s);
    if (name == "fig1c") return fig1c_fields(s);
    if (name == "off") return detail::base_fields(s);
    throw config_error("unknown fields preset: " + name);
}

inline Scenario scenario_preset(const std::string& name) {
    Scenario sc;
    if (name == "fig1b" || name == "fig1c") {
        sc.scheme = sodium_preset();
        sc.fields = fields_preset(name, sc.scheme);
        sc.scheme_name = "na2";
        sc.fields_name = name;
        return sc;
    }
    if (name == "na2") {
        sc.scheme = sodium_preset();
        sc.fields = detail::base_fields(sc.scheme);
        sc.scheme_name = "na2";
        sc.fields_name = "off";
        return sc;
    }
    throw config_error("unknown preset: " + name);
}

namespace detail {

using ConfigValue = std::variant<double, std::string, bool, std::vector<double>>;
using ConfigMap = std::map<std::string, ConfigValue>;

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool parse_number(const std::string& text, double* out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) return false;
    *out = v;
    return true;
}

inline ConfigValue parse_toml_value(const std::string& raw, int line_no) {
    const std::string t = trim(raw);
    if (t.empty()) throw config_error("toml line " + std::to_string(line_no) + ": missing value");
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"')
            throw config_error("toml line " + std::to_string(line_no) + ": unterminated string");
        return t.substr(1, t.size() - 2);
    }
    if (t == "true") return true;
    if (t == "false") return false;
    if (t.front() == '[') {
        if (t.back() != ']')
            throw config_error("toml line " + std::to_string(line_no) + ": unterminated array");
        std::vector<double> xs;
        std::string body = t.substr(1, t.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (trim(item).empty()) continue;
            double v;
            if (!parse_number(item, &v))
                throw config_error("toml line " + std::to_string(line_no) +
                                   ": arrays may contain numbers only");
            xs.push_back(v);
        }
        return xs;
    }
    double v;
    if (!parse_number(t, &v))
        throw config_error("toml line " + std::to_string(line_no) + ": cannot parse value '" + t + "'");
    return v;
}

inline std::string strip_toml_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

inline bool valid_key_path(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
            return false;
    return true;
}

inline ConfigMap parse_toml(const std::string& text) {
    ConfigMap out;
    std::string prefix;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string t = trim(strip_toml_comment(line));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw config_error("toml line " + std::to_string(line_no) + ": malformed table header");
            prefix = trim(t.substr(1, t.size() - 2));
            if (!valid_key_path(prefix))
                throw config_error("toml line " + std::to_string(line_no) + ": bad table name '" +
                                   prefix + "'");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("toml line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        if (!valid_key_path(key))
            throw config_error("toml line " + std::to_string(line_no) + ": bad key '" + key + "'");
        const std::string full = prefix.empty() ? key : prefix + "." + key;
        if (out.count(full))
            throw config_error("toml line " + std::to_string(line_no) + ": duplicate key '" + full + "'");
        out[full] = parse_toml_value(t.substr(eq + 1), line_no);
    }
    return out;
}

inline void flatten_json(const nlohmann::json& j, const std::string& prefix, ConfigMap& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
            flatten_json(it.value(), key, out);
        }
        return;
    }
    if (j.is_number()) {
        out[prefix] = j.get<double>();
    } else if (j.is_string()) {
        out[prefix] = j.get<std::string>();
    } else if (j.is_boolean()) {
        out[prefix] = j.get<bool>();
    } else if (j.is_array()) {
        std::vector<double> xs;
        for (const auto& e : j) {
            if (!e.is_number()) throw config_error("config key '" + prefix + "': arrays may contain numbers only");
            xs.push_back(e.get<double>());
        }
        out[prefix] = xs;
    } else {
        throw config_error("config key '" + prefix + "': unsupported value type");
    }
}

inline double require_number(const ConfigMap& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end()) throw config_error("missing required key: " + key);
    if (!std::holds_alternative<double>(it->second))
        throw config_error("key '" + key + "' must be a number");
    return std::get<double>(it->second);
}

inline std::optional<double> maybe_number(const ConfigMap& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end()) return std::nullopt;
    if (!std::holds_alternative<double>(it->second))
        throw config_error("key '" + key + "' must be a number");
    return std::get<double>(it->second);
}

inline std::optional<std::string> maybe_string(const ConfigMap& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end()) return std::nullopt;
    if (!std::holds_alternative<std::string>(it->second)) return std::nullopt;
    return std::get<std::string>(it->second);
}

inline bool key_known(const std::string& k) {
    static const char* exact[] = {
        "scheme", "fields",
        "scheme.u_mps", "scheme.gamma02_mhz", "scheme.dipole_ratio_sq", "scheme.alpha01",
    };
    for (const char* e : exact)
        if (k == e) return true;
    for (const char* t : {"01", "12", "23", "03"}) {
        const std::string base = std::string("scheme.transitions.") + t + ".";
        if (k == base + "wavelength_nm" || k == base + "gamma_mhz") return true;
    }
    for (const char* role : {"E1", "E2", "E3plus", "E3minus"}) {
        const std::string base = std::string("fields.") + role + ".";
        if (k == base + "rabi_mhz" || k == base + "detuning_mhz" ||
            k == base + "inv_wavelength_nm")
            return true;
        if (k == base + "direction" && std::string(role) == "E3minus") return true;
    }
    return false;
}

inline Scenario build_scenario(const ConfigMap& m) {
    for (const auto& [k, v] : m)
        if (!key_known(k)) throw config_error("unknown key: " + k);

    Scenario sc;

    if (auto preset = maybe_string(m, "scheme")) {
        sc.scheme = scheme_preset(*preset);
        sc.scheme_name = *preset;
    } else {
        std::array<double, 4> lambdas{}, gammas{};
        static const char* tags[] = {"01", "12", "23", "03"};
        for (std::size_t i = 0; i < 4; ++i) {
            const std::string base = std::string("scheme.transitions.") + tags[i] + ".";
            lambdas[i] = require_number(m, base + "wavelength_nm");
            gammas[i] = require_number(m, base + "gamma_mhz");
        }
        sc.scheme = make_scheme(lambdas, gammas, require_number(m, "scheme.u_mps"),
                                maybe_number(m, "scheme.gamma02_mhz").value_or(0.0),
                                maybe_number(m, "scheme.dipole_ratio_sq").value_or(1.0),
                                maybe_number(m, "scheme.alpha01").value_or(1.0));
    }

    if (auto preset = maybe_string(m, "fields")) {
        sc.fields = fields_preset(*preset, sc.scheme);
        sc.fields_name = *preset;
    } else {
        sc.fields = base_fields(sc.scheme);
        auto apply = [&](const char* role, Field& fld) {
            const std::string base = std::string("fields.") + role + ".";
            if (auto v = maybe_number(m, base + "rabi_mhz")) fld.rabi_mhz = *v;
            if (auto v = maybe_number(m, base + "detuning_mhz")) fld.detuning_mhz = *v;
            if (auto v = maybe_number(m, base + "inv_wavelength_nm")) fld.inv_wavelength_nm = *v;
            if (auto v = maybe_number(m, base + "direction")) {
                if (*v != 1.0 && *v != -1.0)
                    throw config_error("key '" + base + "direction' must be +1 or -1");
                fld.direction = static_cast<int>(*v);
            }
        };
        apply("E1", sc.fields.e1);
        apply("E2", sc.fields.e2);
        apply("E3plus", sc.fields.e3p);
        apply("E3minus", sc.fields.e3m);
        validate(sc.fields);
    }

    if (sc.fields.omega1_set()) sc.omega1_mhz = sc.fields.e1.detuning_mhz;
    return sc;
}

}  // namespace detail

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    const bool looks_json = [&] {
        if (path.size() > 5 && path.substr(path.size() - 5) == ".json") return true;
        if (path.size() > 5 && path.substr(path.size() - 5) == ".toml") return false;
        const std::string t = detail::trim(text);
        return !t.empty() && t.front() == '{';
    }();

    detail::ConfigMap m;
    if (looks_json) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw config_error(std::string("json parse error in ") + path + ": " + e.what());
        }
        detail::flatten_json(j, "", m);
    } else {
        m = detail::parse_toml(text);
    }
    return detail::build_scenario(m);
}

}  // namespace dfwm

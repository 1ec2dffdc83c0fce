#pragma once

// Flat `key = value` configuration files. Frequencies are quoted as nu = omega / 2pi in the
// unit named by the key suffix; everything is converted to rad/s on load.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <iterator>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "magkerr/errors.hpp"
#include "magkerr/model.hpp"

namespace magkerr {

enum class DampingConvention {
    rate,  ///< quoted value is the amplitude decay rate gamma
    fwhm,  ///< quoted value is the full linewidth, gamma = quoted / 2
};

struct Config {
    SystemParams params;
    DampingConvention damping = DampingConvention::rate;
    std::map<std::string, double> raw;  ///< numeric values as written
};

namespace detail {

inline const std::set<std::string, std::less<>>& numeric_keys() {
    static const std::set<std::string, std::less<>> keys{
        "omega_c_ghz", "gamma_c_mhz", "omega_1_ghz", "gamma_1_mhz", "g_1_mhz", "u_1_nhz",
        "omega_2_ghz", "gamma_2_mhz", "g_2_mhz", "u_2_nhz", "omega_d_ghz", "power_mw",
        "rabi_override", "sphere_diameter_mm", "spin_density_per_m3", "total_spin", "rabi_scale"};
    return keys;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline double parse_number(std::string_view text, int line) {
    double v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError("not a finite number: '" + std::string(text) + "'", line);
    }
    return v;
}

}  // namespace detail

[[nodiscard]] inline Config parse_config(std::string_view text) {
    Config cfg;
    std::map<std::string, int, std::less<>> seen;
    std::optional<std::string> damping;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key", line_no);
        if (value.empty()) throw ConfigError("missing value for '" + key + "'", line_no);
        if (auto it = seen.find(key); it != seen.end()) {
            throw ConfigError("duplicate key '" + key + "' (first on line " + std::to_string(it->second) + ")", line_no);
        }
        seen.emplace(key, line_no);
        if (key == "damping_convention") {
            if (value != "rate" && value != "fwhm") throw ConfigError("damping_convention must be rate or fwhm", line_no);
            damping = std::string(value);
        } else if (detail::numeric_keys().contains(key)) {
            cfg.raw[key] = detail::parse_number(value, line_no);
        } else {
            throw ConfigError("unknown key '" + key + "'", line_no);
        }
    }

    auto need = [&](const char* key) {
        auto it = cfg.raw.find(key);
        if (it == cfg.raw.end()) throw ConfigError(std::string("missing required key '") + key + "'", 0);
        return it->second;
    };
    auto get = [&](const char* key) -> std::optional<double> {
        auto it = cfg.raw.find(key);
        if (it == cfg.raw.end()) return std::nullopt;
        return it->second;
    };

    cfg.damping = damping == "fwhm" ? DampingConvention::fwhm : DampingConvention::rate;
    const double width = cfg.damping == DampingConvention::fwhm ? 0.5 : 1.0;

    auto& p = cfg.params;
    if (auto v = get("sphere_diameter_mm")) p.constants.sphere_diameter = *v * 0.1;
    if (auto v = get("spin_density_per_m3")) p.constants.spin_density = *v * 1e-6;
    if (auto v = get("total_spin")) p.constants.total_spin = *v;
    if (auto v = get("rabi_scale")) p.constants.rabi_scale = *v;

    p.cavity.omega_c = from_ghz(need("omega_c_ghz"));
    p.cavity.gamma_c = width * from_mhz(need("gamma_c_mhz"));
    p.magnons.push_back(MagnonMode{from_ghz(need("omega_1_ghz")), width * from_mhz(need("gamma_1_mhz")),
                                   from_mhz(need("g_1_mhz")), from_nhz(need("u_1_nhz"))});
    const char* second[] = {"omega_2_ghz", "gamma_2_mhz", "g_2_mhz", "u_2_nhz"};
    const auto present = std::count_if(std::begin(second), std::end(second), [&](const char* k) { return get(k).has_value(); });
    if (present == 4) {
        p.magnons.push_back(MagnonMode{from_ghz(need("omega_2_ghz")), width * from_mhz(need("gamma_2_mhz")),
                                       from_mhz(need("g_2_mhz")), from_nhz(need("u_2_nhz"))});
    } else if (present != 0) {
        throw ConfigError("second magnon needs all of omega_2_ghz, gamma_2_mhz, g_2_mhz, u_2_nhz", 0);
    }

    const double omega_d = from_ghz(need("omega_d_ghz"));
    const auto power = get("power_mw");
    const auto rabi = get("rabi_override");
    if (power && rabi) throw ConfigError("power_mw and rabi_override are mutually exclusive", seen["rabi_override"]);
    p.drive = rabi ? Drive::with_rabi(omega_d, *rabi) : Drive::with_power(omega_d, power.value_or(0.0) * 1e-3);

    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), 0);
    }
    return cfg;
}

[[nodiscard]] inline Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace magkerr

#pragma once

// Physical parameters of a driven cavity coupled to one or two Kerr magnon modes.
// Everything is stored in angular-frequency units (rad/s); the Rabi drive formula
// is evaluated in Gaussian-CGS.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "magkerr/errors.hpp"

namespace magkerr {

using complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// nu = omega / 2pi conversions. Config files quote nu in the unit named by the key.
[[nodiscard]] constexpr double from_ghz(double nu) { return two_pi * nu * 1e9; }
[[nodiscard]] constexpr double from_mhz(double nu) { return two_pi * nu * 1e6; }
[[nodiscard]] constexpr double from_nhz(double nu) { return two_pi * nu * 1e-9; }
[[nodiscard]] constexpr double to_ghz(double omega) { return omega / two_pi * 1e-9; }
[[nodiscard]] constexpr double to_mhz(double omega) { return omega / two_pi * 1e-6; }
[[nodiscard]] constexpr double to_nhz(double omega) { return omega / two_pi * 1e9; }

struct PhysicalConstants {
    double gyro_ratio = two_pi * 2.8e6;  ///< rad s^-1 G^-1 (28 GHz/T)
    double spin_density = 4.22e21;       ///< cm^-3
    double sphere_diameter = 0.1;        ///< cm
    double light_speed = 2.99792458e10;  ///< cm/s
    double total_spin = 1.1e19;          ///< 2S, upper bound on magnon number
    double rabi_scale = 1.0;             ///< multiplicative calibration applied to Omega(P)

    void validate() const {
        if (!(gyro_ratio > 0 && spin_density > 0 && sphere_diameter > 0 && light_speed > 0 &&
              total_spin > 0 && rabi_scale > 0)) {
            throw DomainError("physical constants must be strictly positive");
        }
    }
};

struct MagnonMode {
    double omega = 0;  ///< Kittel frequency (rad/s)
    double gamma = 0;  ///< dissipation rate (rad/s)
    double g = 0;      ///< cavity coupling (rad/s)
    double U = 0;      ///< Kerr coefficient (rad/s)
};

struct CavityMode {
    double omega_c = 0;
    double gamma_c = 0;
};

struct Drive {
    double omega_d = 0;
    /// Exactly one of these is set.
    std::optional<double> power;          ///< W
    std::optional<double> rabi_override;  ///< rad/s

    [[nodiscard]] static Drive with_power(double omega_d, double watts) {
        return Drive{omega_d, watts, std::nullopt};
    }
    [[nodiscard]] static Drive with_rabi(double omega_d, double rabi) {
        return Drive{omega_d, std::nullopt, rabi};
    }
};

struct SystemParams {
    PhysicalConstants constants;
    CavityMode cavity;
    std::vector<MagnonMode> magnons;
    Drive drive;

    [[nodiscard]] std::size_t magnon_count() const noexcept { return magnons.size(); }
    [[nodiscard]] bool two_yig() const noexcept { return magnons.size() == 2; }

    void validate() const {
        constants.validate();
        if (magnons.empty() || magnons.size() > 2) {
            throw DomainError("one or two magnon modes required");
        }
        if (!(cavity.omega_c > 0 && cavity.gamma_c > 0)) {
            throw DomainError("cavity frequency and leakage must be strictly positive");
        }
        for (const auto& m : magnons) {
            if (!(m.omega > 0) || !(m.gamma > 0) || m.g < 0 || m.U < 0) {
                throw DomainError("magnon mode requires omega > 0, gamma > 0, g >= 0, U >= 0");
            }
        }
        if (drive.power.has_value() == drive.rabi_override.has_value()) {
            throw DomainError("drive needs exactly one of power or rabi_override");
        }
        if (drive.power && *drive.power < 0) throw DomainError("drive power must be >= 0");
        if (drive.rabi_override && *drive.rabi_override < 0) {
            throw DomainError("rabi_override must be >= 0");
        }
    }

    /// Copy with the drive replaced by a power setting (W).
    [[nodiscard]] SystemParams at_power(double watts) const {
        SystemParams p = *this;
        p.drive = Drive::with_power(drive.omega_d, watts);
        return p;
    }
};

/// Omega = gyro * sqrt(5 pi rho d P / 3c), Gaussian-CGS with P in erg/s (1 W = 1e7 erg/s).
[[nodiscard]] inline double rabi_from_power(double watts, const PhysicalConstants& k) {
    if (!(watts >= 0)) throw DomainError("drive power must be >= 0");
    const double erg_per_s = watts * 1e7;
    return k.rabi_scale * k.gyro_ratio *
           std::sqrt(5.0 * std::numbers::pi * k.spin_density * k.sphere_diameter * erg_per_s /
                     (3.0 * k.light_speed));
}

[[nodiscard]] inline double rabi_frequency(const SystemParams& p) {
    if (p.drive.rabi_override) return *p.drive.rabi_override;
    return rabi_from_power(p.drive.power.value_or(0.0), p.constants);
}

struct Detunings {
    std::vector<double> delta;         ///< omega_i + U_i - omega_d
    double delta_c = 0;                ///< omega_c - omega_d
    complex D_c;                       ///< delta_c - i gamma_c
    std::vector<complex> tilde_delta;  ///< delta_i - i gamma_i - g_i^2 / D_c
};

[[nodiscard]] inline Detunings derive_detunings(const SystemParams& p) {
    p.validate();
    Detunings d;
    d.delta_c = p.cavity.omega_c - p.drive.omega_d;
    d.D_c = complex(d.delta_c, -p.cavity.gamma_c);
    for (const auto& m : p.magnons) {
        const double delta = m.omega + m.U - p.drive.omega_d;
        d.delta.push_back(delta);
        d.tilde_delta.push_back(complex(delta, -m.gamma) - m.g * m.g / d.D_c);
    }
    return d;
}

}  // namespace magkerr

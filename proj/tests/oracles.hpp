#pragma once

// Independent reference computations used only by the tests.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "magkerr/config.hpp"
#include "magkerr/model.hpp"

namespace oracle {

using cd = std::complex<double>;

inline std::string config_path(const std::string& name) {
    return std::string(MAGKERR_CONFIG_DIR) + "/" + name + ".cfg";
}

inline magkerr::SystemParams load(const std::string& name) { return magkerr::load_config(config_path(name)).params; }

/// Right-hand side of the mean-field equations written out from scratch.
/// State layout: (m1, [m2,] a).
struct MeanField {
    double d1, d2, dc, gm1, gm2, gc, g1, g2, U1, U2, rabi;
    bool two;

    explicit MeanField(const magkerr::SystemParams& p) {
        const double wd = p.drive.omega_d;
        const auto& k1 = p.magnons[0];
        two = p.magnons.size() == 2;
        d1 = k1.omega + k1.U - wd;
        gm1 = k1.gamma;
        g1 = k1.g;
        U1 = k1.U;
        if (two) {
            const auto& k2 = p.magnons[1];
            d2 = k2.omega + k2.U - wd;
            gm2 = k2.gamma;
            g2 = k2.g;
            U2 = k2.U;
        } else {
            d2 = gm2 = g2 = U2 = 0;
        }
        dc = p.cavity.omega_c - wd;
        gc = p.cavity.gamma_c;
        const double P = p.drive.power.value_or(0.0) * 1e7;
        const auto& c = p.constants;
        rabi = p.drive.rabi_override
                   ? *p.drive.rabi_override
                   : c.rabi_scale * c.gyro_ratio *
                         std::sqrt(5.0 * M_PI * c.spin_density * c.sphere_diameter * P / (3.0 * c.light_speed));
    }

    std::vector<cd> operator()(const std::vector<cd>& s) const {
        const cd I(0, 1);
        std::vector<cd> r(s.size());
        const cd a = s.back();
        r[0] = -(I * d1 + gm1) * s[0] - 2.0 * I * U1 * std::norm(s[0]) * s[0] - I * g1 * a + rabi;
        cd cav = -(I * dc + gc) * a - I * g1 * s[0];
        if (two) {
            r[1] = -(I * d2 + gm2) * s[1] - 2.0 * I * U2 * std::norm(s[1]) * s[1] - I * g2 * a;
            cav -= I * g2 * s[1];
        }
        r.back() = cav;
        return r;
    }
};

inline double distance(const std::vector<cd>& a, const std::vector<cd>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

inline double norm(const std::vector<cd>& a) {
    double s = 0;
    for (const auto& z : a) s += std::norm(z);
    return std::sqrt(s);
}

struct Trajectory {
    double initial = 0;
    double final = 0;
    double peak = 0;  ///< largest deviation seen
};

/// Classic fixed-step RK4 from steady + perturbation, tracking the deviation from steady.
inline Trajectory integrate(const MeanField& f, const std::vector<cd>& steady, const std::vector<cd>& start,
                            double t_end, double dt) {
    std::vector<cd> y = start;
    Trajectory tr;
    tr.initial = distance(y, steady);
    tr.peak = tr.initial;
    const auto steps = static_cast<long>(std::ceil(t_end / dt));
    const double h = t_end / static_cast<double>(steps);
    auto axpy = [](const std::vector<cd>& y0, const std::vector<cd>& k, double c) {
        std::vector<cd> r(y0.size());
        for (std::size_t i = 0; i < y0.size(); ++i) r[i] = y0[i] + c * k[i];
        return r;
    };
    for (long n = 0; n < steps; ++n) {
        const auto k1 = f(y);
        const auto k2 = f(axpy(y, k1, h / 2));
        const auto k3 = f(axpy(y, k2, h / 2));
        const auto k4 = f(axpy(y, k3, h));
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        const double d = distance(y, steady);
        tr.peak = std::max(tr.peak, d);
        if (!std::isfinite(d) || d > 1e3 * tr.initial) break;  // clearly departed
    }
    tr.final = distance(y, steady);
    return tr;
}

/// Kerr-free spin current evaluated straight from the model equations: solve the 3x3 complex
/// linear steady state and return |M2|^2.
inline double linear_spin_current(const magkerr::SystemParams& p) {
    const MeanField f(p);
    const cd I(0, 1);
    Eigen::Matrix3cd A;
    A << I * f.d1 + f.gm1, 0.0, I * f.g1,
         0.0, I * f.d2 + f.gm2, I * f.g2,
         I * f.g1, I * f.g2, I * f.dc + f.gc;
    Eigen::Vector3cd b(f.rabi, 0.0, 0.0);
    const Eigen::Vector3cd z = A.partialPivLu().solve(b);
    return std::norm(z(1));
}

/// Undamped normal-mode detunings of two magnons and a cavity, ascending.
inline std::array<double, 3> eigenfrequencies(const magkerr::SystemParams& p) {
    const MeanField f(p);
    Eigen::Matrix3d H;
    H << f.d1, 0.0, f.g1,
         0.0, f.d2, f.g2,
         f.g1, f.g2, f.dc;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
    return {es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
}

}  // namespace oracle

#pragma once

// Weak-probe linear response around a steady state.
//
// The probe adds E_p exp(-i delta t) to the cavity equation; to first order each amplitude
// picks up sidebands X0 + X+ exp(-i delta t) + X- exp(i delta t). The (X+, conj(X-)) pairs
// obey a linear system that is solved directly; T(delta) = A+ / E_p.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "magkerr/errors.hpp"
#include "magkerr/model.hpp"
#include "magkerr/parallel.hpp"
#include "magkerr/steady.hpp"
#include "magkerr/sweep.hpp"

namespace magkerr {

struct ProbeSpec {
    std::vector<double> delta_grid;  ///< probe detuning omega - omega_d (rad/s), strictly increasing
    double Ep = 1.0;                 ///< probe amplitude (rad/s); T is normalized by it

    void validate() const {
        if (delta_grid.empty()) throw DomainError("probe grid is empty");
        for (std::size_t i = 1; i < delta_grid.size(); ++i) {
            if (!(delta_grid[i] > delta_grid[i - 1])) throw DomainError("probe grid must be strictly increasing");
        }
        if (!(Ep > 0)) throw DomainError("probe amplitude must be positive");
    }
};

/// `points` samples of delta/2pi over [delta_c/2pi - half_width, delta_c/2pi + half_width] (MHz).
[[nodiscard]] inline ProbeSpec default_probe_grid(const SystemParams& p, int points = 4001,
                                                  double half_width_mhz = 150.0) {
    if (points < 3) throw DomainError("probe grid needs at least 3 points");
    const double centre = p.cavity.omega_c - p.drive.omega_d;
    const double hw = from_mhz(half_width_mhz);
    ProbeSpec s;
    s.delta_grid.resize(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        s.delta_grid[static_cast<std::size_t>(i)] = centre - hw + 2.0 * hw * static_cast<double>(i) / (points - 1);
    }
    return s;
}

/// Grid between two probe detunings given as delta/2pi in MHz.
[[nodiscard]] inline ProbeSpec probe_grid_mhz(double from_mhz_value, double to_mhz_value, int points) {
    if (points < 3) throw DomainError("probe grid needs at least 3 points");
    if (!(to_mhz_value > from_mhz_value)) throw DomainError("probe grid needs from < to");
    ProbeSpec s;
    s.delta_grid.resize(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double nu = from_mhz_value + (to_mhz_value - from_mhz_value) * static_cast<double>(i) / (points - 1);
        s.delta_grid[static_cast<std::size_t>(i)] = from_mhz(nu);
    }
    return s;
}

struct Spectrum {
    std::vector<double> delta;
    std::vector<complex> T;
    std::vector<double> magnitude2;
    SteadyBranch branch;
    double cavity_peak = 0;  ///< 1/gamma_c^2, the bare-cavity |T|^2 maximum
};

namespace detail {

/// Linear system for the sidebands: unknowns (M1+, conj M1-, [M2+, conj M2-,] A+, conj A-).
inline Eigen::MatrixXcd sideband_matrix(const SystemParams& p, const SteadyBranch& b, double delta) {
    const Detunings det = derive_detunings(p);
    const int k = static_cast<int>(p.magnon_count());
    const int n = 2 * (k + 1);
    const int cav = 2 * k;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < k; ++j) {
        const auto& m = p.magnons[static_cast<std::size_t>(j)];
        const complex z = j == 0 ? b.m1 : b.m2.value_or(0.0);
        const complex D(det.delta[static_cast<std::size_t>(j)] + 4.0 * m.U * std::norm(z), -m.gamma);
        const int r = 2 * j;
        A(r, r) = D - delta;
        A(r, r + 1) = 2.0 * m.U * z * z;
        A(r, cav) = m.g;
        A(r + 1, r) = 2.0 * m.U * std::conj(z) * std::conj(z);
        A(r + 1, r + 1) = std::conj(D) + delta;
        A(r + 1, cav + 1) = m.g;
        A(cav, r) = m.g;
        A(cav + 1, r + 1) = m.g;
    }
    A(cav, cav) = det.D_c - delta;
    A(cav + 1, cav + 1) = std::conj(det.D_c) + delta;
    return A;
}

inline complex solve_transmission(const SystemParams& p, const SteadyBranch& b, double delta, double Ep) {
    const Eigen::MatrixXcd A = sideband_matrix(p, b, delta);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(A.rows());
    const Eigen::Index cav = A.rows() - 2;
    rhs(cav) = complex(0.0, -Ep);
    const Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    if (!lu.isInvertible()) throw SingularityError("sideband system is singular at this probe detuning");
    return lu.solve(rhs)(cav) / Ep;
}

inline Spectrum build_spectrum(const SystemParams& p, const SteadyBranch& b, const ProbeSpec& spec) {
    spec.validate();
    Spectrum s;
    s.delta = spec.delta_grid;
    s.branch = b;
    s.cavity_peak = 1.0 / (p.cavity.gamma_c * p.cavity.gamma_c);
    s.T.resize(s.delta.size());
    s.magnitude2.resize(s.delta.size());
    parallel_for(s.delta.size(), [&](std::size_t i) {
        s.T[i] = solve_transmission(p, b, s.delta[i], spec.Ep);
        s.magnitude2[i] = std::norm(s.T[i]);
    });
    return s;
}

}  // namespace detail

/// Transmission at a single probe detuning by direct solve.
[[nodiscard]] inline complex transmission(const SystemParams& p, const SteadyBranch& b, double delta,
                                          double Ep = 1.0) {
    return detail::solve_transmission(p, b, delta, Ep);
}

[[nodiscard]] inline Spectrum response_single(const SystemParams& p, const SteadyBranch& b, const ProbeSpec& spec) {
    if (p.magnon_count() != 1) throw DomainError("response_single needs one magnon mode");
    return detail::build_spectrum(p, b, spec);
}

[[nodiscard]] inline Spectrum response_two(const SystemParams& p, const SteadyBranch& b, const ProbeSpec& spec) {
    if (!p.two_yig()) throw DomainError("response_two needs two magnon modes");
    return detail::build_spectrum(p, b, spec);
}

[[nodiscard]] inline Spectrum response(const SystemParams& p, const SteadyBranch& b, const ProbeSpec& spec) {
    return detail::build_spectrum(p, b, spec);
}

/// Steady state with all amplitudes zero: the background used for drive-off spectra.
[[nodiscard]] inline SteadyBranch zero_background(const SystemParams& p) {
    SteadyBranch b;
    b.stable = true;
    if (p.two_yig()) b.m2 = complex(0.0);
    return b;
}

/// Single-YIG closed form, T = -i/(Dc - d) [1 + g^2 / ((Dc - d) v)].
[[nodiscard]] inline complex closed_form_single(const SystemParams& p, const SteadyBranch& b, double delta) {
    if (p.magnon_count() != 1) throw DomainError("closed_form_single needs one magnon mode");
    const Detunings det = derive_detunings(p);
    const auto& m = p.magnons[0];
    const double x0 = std::norm(b.m1);
    const complex Dm(det.delta[0] + 4.0 * m.U * x0, -m.gamma);
    const complex Dc = det.D_c;
    const complex I(0.0, 1.0);
    const double g2 = m.g * m.g;
    const complex cav = Dc - delta;
    if (cav == complex(0.0)) throw SingularityError("cavity denominator vanishes");
    const complex cross = (std::conj(Dc) + delta) * (std::conj(Dm) + delta) - g2;
    if (cross == complex(0.0)) throw SingularityError("conjugate-sideband denominator vanishes");
    const complex v = Dm - delta - g2 / cav - 4.0 * m.U * m.U * x0 * x0 * (std::conj(Dc) + delta) / cross;
    if (v == complex(0.0)) throw SingularityError("v vanishes");
    return -I / cav * (1.0 + g2 / (cav * v));
}

/// Undamped single-YIG polariton detunings (delta_LP, delta_HP) at background |M0|^2 = x0.
///
/// delta^2 = 1/2 [a^2 + dc^2 + 2g^2 - b^2 +- sqrt(F + 4 b^2 dc^2)],
/// F = ((a - dc)^2 + 4g^2 - b^2)((a + dc)^2 - b^2), a = dm + 4U x0, b = 2U x0.
/// Each delta^2 root gives a +- pair; the sign kept is the one nearest the corresponding
/// Kerr-free normal mode of [[a, g], [g, dc]].
[[nodiscard]] inline std::pair<double, double> peak_positions_single(const SystemParams& p, double x0) {
    if (p.magnon_count() != 1) throw DomainError("peak_positions_single needs one magnon mode");
    if (!(x0 >= 0)) throw DomainError("x0 must be >= 0");
    const Detunings det = derive_detunings(p);
    const auto& m = p.magnons[0];
    const double a = det.delta[0] + 4.0 * m.U * x0;
    const double b = 2.0 * m.U * x0;
    const double dc = det.delta_c;
    const double g2 = m.g * m.g;
    const double F = ((a - dc) * (a - dc) + 4.0 * g2 - b * b) * ((a + dc) * (a + dc) - b * b);
    const double disc = F + 4.0 * b * b * dc * dc;
    if (disc < 0) throw ComplexFrequencyError("negative discriminant: polariton frequencies are complex");
    const double base = a * a + dc * dc + 2.0 * g2 - b * b;
    const double s_hi = 0.5 * (base + std::sqrt(disc));
    const double s_lo = 0.5 * (base - std::sqrt(disc));
    if (s_lo < 0) throw ComplexFrequencyError("negative delta^2: polariton frequencies are complex");
    const std::array<double, 4> cand{std::sqrt(s_hi), -std::sqrt(s_hi), std::sqrt(s_lo), -std::sqrt(s_lo)};
    const double mean = 0.5 * (a + dc);
    const double half = std::sqrt(0.25 * (a - dc) * (a - dc) + g2);
    auto nearest = [&](double target, int skip) {
        int best = -1;
        for (int i = 0; i < 4; ++i) {
            if (i == skip) continue;
            if (best < 0 || std::abs(cand[static_cast<std::size_t>(i)] - target) <
                                std::abs(cand[static_cast<std::size_t>(best)] - target)) {
                best = i;
            }
        }
        return best;
    };
    const int hp = nearest(mean + half, -1);
    const int lp = nearest(mean - half, hp);
    double d_lp = cand[static_cast<std::size_t>(lp)], d_hp = cand[static_cast<std::size_t>(hp)];
    if (d_lp > d_hp) std::swap(d_lp, d_hp);
    return {d_lp, d_hp};
}

struct ClosedFormTwo {
    complex closed;  ///< closed form with the v_ij, alpha_i coefficients taken verbatim
    complex direct;  ///< direct 6x6 solve at the same point
    double relative_error = 0;
    bool agrees = false;  ///< relative_error < 1e-6
};

/// Two-YIG closed form with the coefficient expressions taken verbatim, returned
/// alongside the direct solve for comparison.
[[nodiscard]] inline ClosedFormTwo closed_form_two(const SystemParams& p, const SteadyBranch& b, double delta) {
    if (!p.two_yig()) throw DomainError("closed_form_two needs two magnon modes");
    const auto& k1 = p.magnons[0];
    const auto& k2 = p.magnons[1];
    const complex M1 = b.m1, M2 = b.m2.value_or(0.0);
    if (M1 == complex(0.0) || M2 == complex(0.0) || k1.U == 0.0 || k2.U == 0.0) {
        throw DomainError("closed form needs nonzero background amplitudes and Kerr coefficients");
    }
    const Detunings det = derive_detunings(p);
    const complex I(0.0, 1.0);
    const complex D1(det.delta[0] + 4.0 * k1.U * std::norm(M1), -k1.gamma);
    const complex D2(det.delta[1] + 4.0 * k2.U * std::norm(M2), -k2.gamma);
    const complex Dc = det.D_c, Dcs = std::conj(Dc);
    const double g1 = k1.g, g2 = k2.g;
    const complex r12 = k1.U * M1 * M1 / (k2.U * M2 * M2);
    const complex r21 = k2.U * M2 * M2 / (k1.U * M1 * M1);
    const complex cav = Dc - delta;
    const complex den_c1 = (Dcs + delta) * (Dc + delta) - g1 * g1;
    const complex den_c2 = (Dcs + delta) * (Dc + delta) - g2 * g2;
    const complex den_1 = (Dcs + delta) * (std::conj(D1) + delta) - g1 * g1;
    const complex den_2 = (Dcs + delta) * (std::conj(D2) + delta) - g2 * g2;
    for (const complex& d : {cav, den_c1, den_c2, den_1, den_2}) {
        if (d == complex(0.0)) throw DomainError("closed-form denominator vanishes");
    }
    const double g12 = g1 * g1 * g2 * g2;
    const complex M1s2 = std::conj(M1) * std::conj(M1), M2s2 = std::conj(M2) * std::conj(M2);
    const complex v11 = D1 - delta - g1 * g1 / cav +
                        r12 * (g12 - 4.0 * k1.U * k2.U * (Dcs + delta) * cav * M1s2 * M2 * M2) / (cav * den_c1);
    const complex v12 = g1 * g2 / cav * (r12 * (g2 * g2 - cav * (D2 - delta)) / den_1 - 1.0);
    const complex v21 = g1 * g2 / cav * (r21 * (g1 * g1 - cav * (D1 - delta)) / den_2 - 1.0);
    const complex v22 = D2 - delta - g2 * g2 / cav +
                        r21 * (g12 - 4.0 * k1.U * k2.U * (Dcs + delta) * cav * M1 * M1 * M2s2) / (cav * den_c2);
    const complex a1 = g1 / cav * (1.0 - r12 * g2 * g2 / den_1);
    const complex a2 = g2 / cav * (1.0 - r21 * g1 * g1 / den_2);
    const complex vdet = v11 * v22 - v12 * v21;
    if (vdet == complex(0.0)) throw DomainError("closed-form determinant vanishes");
    ClosedFormTwo r;
    r.closed = -I / cav * (1.0 + ((g1 * v22 - g2 * v21) * a1 - (g1 * v12 - g2 * v11) * a2) / vdet);
    r.direct = transmission(p, b, delta);
    r.relative_error = std::abs(r.closed - r.direct) / std::abs(r.direct);
    r.agrees = r.relative_error < 1e-6;
    return r;
}

enum class Sigma { LP, MP, HP };

[[nodiscard]] inline std::string_view to_string(Sigma s) {
    switch (s) {
        case Sigma::LP: return "LP";
        case Sigma::MP: return "MP";
        case Sigma::HP: return "HP";
    }
    return "?";
}

[[nodiscard]] inline Sigma parse_sigma(std::string_view s) {
    if (s == "LP") return Sigma::LP;
    if (s == "MP") return Sigma::MP;
    if (s == "HP") return Sigma::HP;
    throw DomainError("sigma must be LP, MP or HP");
}

struct Peak {
    double delta = 0;   ///< rad/s
    double height = 0;  ///< |T|^2 at the refined maximum
    std::string label;
};

struct PolaritonPeaks {
    std::vector<Peak> peaks;  ///< ascending in delta
    std::string warning;      ///< non-empty when no maximum was found

    /// LP is the lowest peak and HP the highest; MP exists only when exactly three peaks were found.
    [[nodiscard]] std::optional<Peak> select(Sigma s) const {
        if (peaks.empty()) return std::nullopt;
        switch (s) {
            case Sigma::LP: return peaks.front();
            case Sigma::HP: return peaks.back();
            case Sigma::MP: return peaks.size() == 3 ? std::optional<Peak>(peaks[1]) : std::nullopt;
        }
        return std::nullopt;
    }
};

/// Strict local maxima of |T|^2 refined by the parabola through the three bracketing samples.
/// Maxima below `relative_floor` times min(spectrum maximum, bare-cavity peak) are dropped; the
/// cap keeps a near-undamped mode close to an instability from hiding the other peaks.
[[nodiscard]] inline PolaritonPeaks extract_peaks(const Spectrum& s, double relative_floor = 1e-2) {
    PolaritonPeaks out;
    const auto& y = s.magnitude2;
    const auto& x = s.delta;
    if (y.size() < 3) {
        out.warning = "spectrum too short for peak extraction";
        return out;
    }
    double top = *std::max_element(y.begin(), y.end());
    if (s.cavity_peak > 0) top = std::min(top, s.cavity_peak);
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] > y[i + 1]) || y[i] < relative_floor * top) continue;
        // Parabola through (x0,y0),(x1,y1),(x2,y2) in Newton form about x1.
        const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
        const double s0 = (y[i] - y[i - 1]) / h0, s1 = (y[i + 1] - y[i]) / h1;
        const double c2 = (s1 - s0) / (h0 + h1);
        const double c1 = s0 + c2 * h0;  // slope at x1
        Peak pk;
        if (c2 < 0) {
            const double dx = std::clamp(-c1 / (2.0 * c2), -h0, h1);
            pk.delta = x[i] + dx;
            pk.height = y[i] + c1 * dx + c2 * dx * dx;
        } else {
            pk.delta = x[i];
            pk.height = y[i];
        }
        out.peaks.push_back(pk);
    }
    if (out.peaks.empty()) {
        out.warning = "no local maximum of |T|^2 on the probe grid";
        return out;
    }
    const std::size_t n = out.peaks.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (n == 2) {
            out.peaks[i].label = i == 0 ? "LP" : "HP";
        } else if (n == 3) {
            out.peaks[i].label = i == 0 ? "LP" : (i == 1 ? "MP" : "HP");
        } else {
            out.peaks[i].label = "P" + std::to_string(i + 1);
        }
    }
    return out;
}

struct ShiftCurve {
    Sigma sigma = Sigma::HP;
    SweepDirection direction = SweepDirection::up;
    std::vector<double> power;                 ///< W, in sweep order
    std::vector<std::optional<double>> shift;  ///< omega_sigma - omega_sigma^0 (rad/s); empty = gap
    std::vector<double> x;                     ///< background branch x per point
    double reference = 0;                      ///< zero-amplitude sigma-peak detuning (rad/s)
    std::vector<Jump> branch_jumps;            ///< jumps of the underlying steady-state sweep
    std::vector<std::size_t> shift_jumps;      ///< discontinuities detected in the shift values
    std::size_t max_stable_count = 0;          ///< most coexisting stable states over the grid

    [[nodiscard]] std::vector<double> shift_or_nan() const {
        std::vector<double> v;
        for (const auto& s : shift) v.push_back(s.value_or(std::numeric_limits<double>::quiet_NaN()));
        return v;
    }
};

/// Discontinuity threshold for shift curves: a step counts as a jump when it exceeds ten times
/// its neighbouring steps and `floor_steps` probe-grid spacings.
struct ShiftOptions {
    double jump_factor = 10.0;
    double floor_steps = 5.0;
    double relative_floor = 1e-2;
};

/// Polariton shift versus drive power. `powers` (W) is traversed in the given order for "up"
/// and reversed for "down"; the background branch follows the sweep module's rule.
[[nodiscard]] inline std::vector<ShiftCurve> shift_vs_power(const SystemParams& p, const std::vector<double>& powers,
                                                            Sigma sigma, SweepDirection direction,
                                                            const ProbeSpec& probe, const ShiftOptions& opt = {}) {
    probe.validate();
    const auto traces = run_sweep_on_grid(p, SweepParameter::power, powers, direction);

    const SystemParams p0 = p.at_power(0.0);
    const auto ref_peaks = extract_peaks(response(p0, zero_background(p0), probe), opt.relative_floor);
    const auto ref = ref_peaks.select(sigma);
    if (!ref) {
        throw DomainError(std::string(to_string(sigma)) + " peak absent from the zero-amplitude spectrum");
    }

    // Peaks are evaluated once per distinct (grid point, branch) pair shared by both traces.
    std::map<std::pair<std::size_t, std::size_t>, std::optional<double>> cache;
    const std::size_t n = powers.size();
    for (const auto& t : traces) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t gi = t.direction == SweepDirection::up ? i : n - 1 - i;
            cache[{gi, t.selected_index[i]}] = std::nullopt;
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> keys;
    for (const auto& kv : cache) keys.push_back(kv.first);
    const auto& up_branches = traces.front().all_branches;
    const bool first_up = traces.front().direction == SweepDirection::up;
    std::vector<std::optional<double>> peak_at(keys.size());
    parallel_for(keys.size(), [&](std::size_t k) {
        const auto [gi, bi] = keys[k];
        const std::size_t row = first_up ? gi : n - 1 - gi;
        const SteadyBranch& b = up_branches[row][bi];
        const auto peaks = extract_peaks(response(p.at_power(powers[gi]), b, probe), opt.relative_floor);
        if (auto pk = peaks.select(sigma)) peak_at[k] = pk->delta;
    });
    for (std::size_t k = 0; k < keys.size(); ++k) cache[keys[k]] = peak_at[k];

    const double dgrid = (probe.delta_grid.back() - probe.delta_grid.front()) /
                         static_cast<double>(std::max<std::size_t>(probe.delta_grid.size() - 1, 1));
    std::vector<ShiftCurve> out;
    for (const auto& t : traces) {
        ShiftCurve c;
        c.sigma = sigma;
        c.direction = t.direction;
        c.power = t.values;
        c.reference = ref->delta;
        c.branch_jumps = t.jumps;
        for (std::size_t i = 0; i < n; ++i) c.max_stable_count = std::max(c.max_stable_count, t.stable_count(i));
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t gi = t.direction == SweepDirection::up ? i : n - 1 - i;
            const auto pk = cache.at({gi, t.selected_index[i]});
            c.shift.push_back(pk ? std::optional<double>(*pk - ref->delta) : std::nullopt);
            c.x.push_back(t.selected[i].x);
        }
        c.shift_jumps = find_discontinuities(c.shift_or_nan(), opt.jump_factor, opt.floor_steps * dgrid);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace magkerr

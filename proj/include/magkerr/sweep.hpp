#pragma once

// Hysteretic parameter sweeps over the steady-state solver.
//
// Branches at consecutive grid points are matched by an order-preserving alignment of their
// sorted x values, so a branch keeps its identity through folds elsewhere in the diagram.
// The system follows its branch until that branch ends (fold) or loses stability (Hopf);
// it then jumps to the stable branch nearest in log x.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "magkerr/errors.hpp"
#include "magkerr/model.hpp"
#include "magkerr/parallel.hpp"
#include "magkerr/steady.hpp"

namespace magkerr {

enum class SweepParameter { power, omega_d, omega_c, gamma_c };
enum class SweepDirection { up, down, both };
enum class Regime { monostable, bistable, multistable };

[[nodiscard]] inline std::string_view to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::power: return "power";
        case SweepParameter::omega_d: return "omega_d";
        case SweepParameter::omega_c: return "omega_c";
        case SweepParameter::gamma_c: return "gamma_c";
    }
    return "?";
}

[[nodiscard]] inline std::string_view to_string(SweepDirection d) {
    switch (d) {
        case SweepDirection::up: return "up";
        case SweepDirection::down: return "down";
        case SweepDirection::both: return "both";
    }
    return "?";
}

[[nodiscard]] inline std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::monostable: return "monostable";
        case Regime::bistable: return "bistable";
        case Regime::multistable: return "multistable";
    }
    return "?";
}

/// start/stop are in internal units: W for power, rad/s for the rest.
struct SweepSpec {
    SweepParameter parameter = SweepParameter::power;
    double start = 0;
    double stop = 0;
    int points = 400;
    SweepDirection direction = SweepDirection::both;

    void validate() const {
        if (start == stop) throw DomainError("sweep start and stop must differ");
        if (points < 2) throw DomainError("sweep needs at least 2 points");
    }

    /// Grid from start to stop; "up" traverses it in this order.
    [[nodiscard]] std::vector<double> grid() const {
        validate();
        std::vector<double> g(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i) {
            g[static_cast<std::size_t>(i)] = start + (stop - start) * static_cast<double>(i) / (points - 1);
        }
        g.back() = stop;
        return g;
    }
};

[[nodiscard]] inline SystemParams with_parameter(const SystemParams& p, SweepParameter which, double value) {
    SystemParams q = p;
    switch (which) {
        case SweepParameter::power: q = p.at_power(value); break;
        case SweepParameter::omega_d: q.drive.omega_d = value; break;
        case SweepParameter::omega_c: q.cavity.omega_c = value; break;
        case SweepParameter::gamma_c: q.cavity.gamma_c = value; break;
    }
    return q;
}

struct Jump {
    std::size_t index = 0;  ///< trace position after the jump; the jump lies between index-1 and index
    double value_before = 0;
    double value_after = 0;
    double x_before = 0;
    double x_after = 0;
    bool ambiguous = false;  ///< more than one stable landing candidate existed

    /// Midpoint of the bracketing interval.
    [[nodiscard]] double location() const { return 0.5 * (value_before + value_after); }
    [[nodiscard]] double uncertainty() const { return 0.5 * std::abs(value_after - value_before); }
};

struct SweepTrace {
    SweepDirection direction = SweepDirection::up;
    std::vector<double> values;  ///< parameter values in sweep order
    std::vector<SteadyBranch> selected;
    std::vector<std::size_t> selected_index;  ///< index into all_branches[i]
    std::vector<std::vector<SteadyBranch>> all_branches;
    std::vector<Jump> jumps;

    [[nodiscard]] std::size_t stable_count(std::size_t i) const {
        return static_cast<std::size_t>(std::count_if(all_branches[i].begin(), all_branches[i].end(),
                                                      [](const SteadyBranch& b) { return b.stable; }));
    }
};

namespace detail {

/// log(1 + x): a distance on magnon number that stays finite at x = 0.
inline double log_x(double x) { return std::log1p(std::max(x, 0.0)); }

}  // namespace detail

/// Order-preserving alignment of two ascending branch lists. Returns, for each entry of `from`,
/// the matched index in `to` or -1. Skipping is priced far above any match, so only the
/// |n - m| entries created or annihilated at a fold go unmatched; among those choices the one
/// minimizing the summed |log(1+x) - log(1+x')| wins.
[[nodiscard]] inline std::vector<int> align_branches(const std::vector<double>& from, const std::vector<double>& to) {
    const std::size_t n = from.size(), m = to.size();
    const double skip = 1e6;
    std::vector<std::vector<double>> cost(n + 1, std::vector<double>(m + 1, 0.0));
    for (std::size_t i = 1; i <= n; ++i) cost[i][0] = skip * static_cast<double>(i);
    for (std::size_t j = 1; j <= m; ++j) cost[0][j] = skip * static_cast<double>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const double match = cost[i - 1][j - 1] + std::abs(detail::log_x(from[i - 1]) - detail::log_x(to[j - 1]));
            cost[i][j] = std::min({match, cost[i - 1][j] + skip, cost[i][j - 1] + skip});
        }
    }
    std::vector<int> map(n, -1);
    std::size_t i = n, j = m;
    while (i > 0 && j > 0) {
        const double match = cost[i - 1][j - 1] + std::abs(detail::log_x(from[i - 1]) - detail::log_x(to[j - 1]));
        if (cost[i][j] == match) {
            map[i - 1] = static_cast<int>(j - 1);
            --i;
            --j;
        } else if (cost[i][j] == cost[i - 1][j] + skip) {
            --i;
        } else {
            --j;
        }
    }
    return map;
}

/// Steady states at every grid point, computed in parallel; ordering matches `values`.
[[nodiscard]] inline std::vector<std::vector<SteadyBranch>> solve_on_grid(const SystemParams& p, SweepParameter which,
                                                                          const std::vector<double>& values) {
    std::vector<std::vector<SteadyBranch>> out(values.size());
    parallel_for(values.size(), [&](std::size_t i) { out[i] = solve_steady(with_parameter(p, which, values[i])); });
    return out;
}

namespace detail {

inline std::size_t nearest_stable(const std::vector<SteadyBranch>& branches, double x_prev, bool& ambiguous) {
    std::size_t best = branches.size();
    double best_d = std::numeric_limits<double>::infinity();
    int candidates = 0;
    for (std::size_t k = 0; k < branches.size(); ++k) {
        if (!branches[k].stable) continue;
        ++candidates;
        const double d = std::abs(log_x(branches[k].x) - log_x(x_prev));
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    ambiguous = candidates > 1;
    return best;
}

inline SweepTrace follow(SweepDirection dir, const std::vector<double>& values,
                         const std::vector<std::vector<SteadyBranch>>& branches) {
    SweepTrace t;
    t.direction = dir;
    t.values = values;
    t.all_branches = branches;
    const bool up = dir == SweepDirection::up;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& here = branches[i];
        std::size_t pick = here.size();
        if (i == 0) {
            // Up sweeps start on the lowest stable state, down sweeps on the highest.
            for (std::size_t k = 0; k < here.size(); ++k) {
                if (!here[k].stable) continue;
                if (pick == here.size() || (up ? here[k].x < here[pick].x : here[k].x > here[pick].x)) pick = k;
            }
        } else {
            const auto& prev = branches[i - 1];
            std::vector<double> xp, xn;
            for (const auto& b : prev) xp.push_back(b.x);
            for (const auto& b : here) xn.push_back(b.x);
            const int mapped = align_branches(xp, xn)[t.selected_index.back()];
            if (mapped >= 0 && here[static_cast<std::size_t>(mapped)].stable) {
                pick = static_cast<std::size_t>(mapped);
            } else {
                bool ambiguous = false;
                pick = nearest_stable(here, t.selected.back().x, ambiguous);
                if (pick < here.size()) {
                    t.jumps.push_back(Jump{i, values[i - 1], values[i], t.selected.back().x, here[pick].x, ambiguous});
                }
            }
        }
        if (pick >= here.size()) {
            throw SweepError("no stable steady state at sweep value " + std::to_string(values[i]));
        }
        t.selected_index.push_back(pick);
        t.selected.push_back(here[pick]);
    }
    return t;
}

}  // namespace detail

/// Sweeps an explicit grid; "up" traverses it in the given order. One trace per requested
/// direction, up first when both.
[[nodiscard]] inline std::vector<SweepTrace> run_sweep_on_grid(const SystemParams& p, SweepParameter which,
                                                               const std::vector<double>& grid,
                                                               SweepDirection direction) {
    if (grid.size() < 2) throw DomainError("sweep needs at least 2 points");
    const auto branches = solve_on_grid(p, which, grid);
    std::vector<SweepTrace> out;
    if (direction != SweepDirection::down) out.push_back(detail::follow(SweepDirection::up, grid, branches));
    if (direction != SweepDirection::up) {
        std::vector<double> rg(grid.rbegin(), grid.rend());
        std::vector<std::vector<SteadyBranch>> rb(branches.rbegin(), branches.rend());
        out.push_back(detail::follow(SweepDirection::down, rg, rb));
    }
    return out;
}

[[nodiscard]] inline std::vector<SweepTrace> run_sweep(const SystemParams& p, const SweepSpec& spec) {
    return run_sweep_on_grid(p, spec.parameter, spec.grid(), spec.direction);
}

struct RegimeReport {
    std::size_t max_stable_count = 0;
    Regime regime = Regime::monostable;
    std::size_t up_jump_count = 0;
    std::size_t down_jump_count = 0;
    std::vector<std::pair<double, double>> hysteresis_window;  ///< parameter intervals where up != down
    std::vector<SweepTrace> traces;                            ///< up, down
};

[[nodiscard]] inline Regime regime_from_count(std::size_t max_stable) {
    if (max_stable >= 3) return Regime::multistable;
    if (max_stable == 2) return Regime::bistable;
    return Regime::monostable;
}

/// Intervals of the grid (ascending) on which up and down selections differ by more than 1e-6 relative.
[[nodiscard]] inline std::vector<std::pair<double, double>> hysteresis_windows(const SweepTrace& up,
                                                                               const SweepTrace& down) {
    std::vector<std::pair<double, double>> w;
    const std::size_t n = up.values.size();
    bool open = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double xu = up.selected[i].x;
        const double xd = down.selected[n - 1 - i].x;
        const bool differ = std::abs(xu - xd) > 1e-6 * std::max(std::abs(xu), std::abs(xd));
        const double v = up.values[i];
        if (differ && !open) {
            w.emplace_back(v, v);
            open = true;
        } else if (differ) {
            w.back().second = v;
        } else {
            open = false;
        }
    }
    for (auto& [a, b] : w) {
        if (a > b) std::swap(a, b);
    }
    return w;
}

[[nodiscard]] inline RegimeReport report_from_traces(std::vector<SweepTrace> traces) {
    if (traces.size() != 2) throw DomainError("regime classification needs an up and a down trace");
    RegimeReport r;
    for (const auto& t : traces) {
        for (std::size_t i = 0; i < t.values.size(); ++i) r.max_stable_count = std::max(r.max_stable_count, t.stable_count(i));
    }
    r.regime = regime_from_count(r.max_stable_count);
    r.up_jump_count = traces[0].jumps.size();
    r.down_jump_count = traces[1].jumps.size();
    r.hysteresis_window = hysteresis_windows(traces[0], traces[1]);
    r.traces = std::move(traces);
    return r;
}

[[nodiscard]] inline RegimeReport classify_regime(const SystemParams& p, const SweepSpec& spec) {
    if (spec.direction != SweepDirection::both) throw DomainError("classify_regime needs direction = both");
    return report_from_traces(run_sweep(p, spec));
}

/// One regime report per cavity leakage value, everything else fixed.
[[nodiscard]] inline std::vector<RegimeReport> leakage_robustness(const SystemParams& p,
                                                                  const std::vector<double>& gamma_c_values,
                                                                  const SweepSpec& power_spec) {
    std::vector<RegimeReport> out;
    for (double gc : gamma_c_values) {
        if (!(gc > 0)) throw DomainError("cavity leakage values must be positive");
        SystemParams q = p;
        q.cavity.gamma_c = gc;
        out.push_back(classify_regime(q, power_spec));
    }
    return out;
}

/// Indices i where |v[i] - v[i-1]| exceeds `factor` times the larger neighbouring increment and
/// `floor` in absolute terms. NaN entries (gaps) are skipped over.
[[nodiscard]] inline std::vector<std::size_t> find_discontinuities(const std::vector<double>& v, double factor = 10.0,
                                                                   double floor = 0.0) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::isfinite(v[i])) idx.push_back(i);
    }
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k < idx.size(); ++k) {
        const double step = std::abs(v[idx[k]] - v[idx[k - 1]]);
        double local = 0.0;
        if (k >= 2) local = std::max(local, std::abs(v[idx[k - 1]] - v[idx[k - 2]]));
        if (k + 1 < idx.size()) local = std::max(local, std::abs(v[idx[k + 1]] - v[idx[k]]));
        if (step > floor && step > factor * local) out.push_back(idx[k]);
    }
    return out;
}

}  // namespace magkerr

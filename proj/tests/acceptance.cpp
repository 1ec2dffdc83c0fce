// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "magkerr/magkerr.hpp"
#include "oracles.hpp"

using namespace magkerr;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<SteadyBranch> stable_only(const std::vector<SteadyBranch>& all) {
    std::vector<SteadyBranch> s;
    for (const auto& b : all) {
        if (b.stable) s.push_back(b);
    }
    return s;
}

Outcome stable_match(const std::string& cfg, double power_w, const std::vector<double>& expected) {
    const auto p = oracle::load(cfg).at_power(power_w);
    const auto t0 = std::chrono::steady_clock::now();
    const auto stable = stable_only(solve_steady(p));
    const double dt = seconds_since(t0);
    std::ostringstream os;
    os << "stable x =";
    bool ok = stable.size() == expected.size() && dt < 1.0;
    for (std::size_t i = 0; i < stable.size(); ++i) {
        os << ' ' << stable[i].x;
        if (i < expected.size()) {
            const double rel = std::abs(stable[i].x - expected[i]) / expected[i];
            os << " (" << std::round(rel * 1e4) / 100 << "%)";
            ok = ok && rel < 0.05;
        }
    }
    os << "; " << dt << " s";
    return {ok, os.str()};
}

Outcome criterion1() { return stable_match("fig2b", 30e-3, {1.58e14, 5.6e14, 8.83e14}); }

Outcome criterion2() { return stable_match("fig5", 90e-3, {0.66e15, 2.55e15}); }

Outcome criterion3() {
    const auto base = oracle::load("fig2b");
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> jitter(0.9, 1.1);
    std::uniform_real_distribution<double> power(1e-3, 50e-3);
    double worst = 0;
    int unique = 0;
    for (int k = 0; k < 20; ++k) {
        SystemParams p = base.at_power(power(rng));
        p.cavity.omega_c *= 1.0 + (jitter(rng) - 1.0) * 1e-3;
        p.cavity.gamma_c *= jitter(rng);
        for (auto& m : p.magnons) {
            m.omega *= 1.0 + (jitter(rng) - 1.0) * 1e-3;
            m.gamma *= jitter(rng);
            m.g *= jitter(rng);
            m.U = 0.0;
        }
        const auto roots = solve_steady(p);
        if (roots.size() != 1) continue;
        ++unique;
        const double ref = oracle::linear_spin_current(p);
        worst = std::max(worst, std::abs(roots[0].x - ref) / ref);
    }
    std::ostringstream os;
    os << unique << "/20 unique roots, worst relative error " << worst;
    return {unique == 20 && worst < 1e-10, os.str()};
}

Outcome criterion4() {
    const char* configs[] = {"fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3d", "fig5", "fig6",
                             "fig7a", "fig7b", "fig7c", "fig7d", "fig8a", "fig8b", "fig8c", "fig8d", "zero_kerr"};
    double worst = 0;
    std::size_t count = 0;
    for (const char* name : configs) {
        const auto base = oracle::load(name);
        for (int i = 0; i < 100; ++i) {
            const SystemParams p = base.at_power(100e-3 * i / 99.0);
            for (const auto& b : solve_steady(p)) {
                ++count;
                worst = std::max(worst, b.residual / std::max(rabi_frequency(p), p.magnons[0].gamma * std::sqrt(b.x)));
            }
        }
    }
    std::ostringstream os;
    os << count << " branches, worst residual / max(Omega, gamma1 sqrt x) = " << worst;
    return {worst < 1e-6, os.str()};
}

Outcome criterion5() {
    struct Case {
        const char* cfg;
        std::size_t up, down;
    };
    const Case cases[] = {{"fig2b", 2, 2}, {"fig2a", 1, 1}, {"zero_kerr", 0, 0}};
    bool ok = true;
    std::ostringstream os;
    for (const auto& c : cases) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = classify_regime(oracle::load(c.cfg), SweepSpec{SweepParameter::power, 0.0, 50e-3, 400,
                                                                      SweepDirection::both});
        const double dt = seconds_since(t0);
        std::vector<double> at;
        for (const auto& t : r.traces) {
            for (const auto& j : t.jumps) at.push_back(j.location());
        }
        std::sort(at.begin(), at.end());
        const bool distinct = std::adjacent_find(at.begin(), at.end()) == at.end();
        const bool this_ok = r.up_jump_count == c.up && r.down_jump_count == c.down && distinct && dt < 30.0;
        ok = ok && this_ok;
        os << c.cfg << ": up " << r.up_jump_count << "/" << c.up << " down " << r.down_jump_count << "/" << c.down
           << " (" << dt << " s)" << (this_ok ? "" : " MISMATCH") << "; ";
    }
    return {ok, os.str()};
}

Outcome criterion6() {
    std::ostringstream os;
    // (a) single-YIG direct vs closed form on the fig5 config.
    const auto p5 = oracle::load("fig5");
    double worst_a = 0;
    {
        std::vector<std::pair<SystemParams, SteadyBranch>> cases{{p5.at_power(0), zero_background(p5)}};
        const auto q = p5.at_power(90e-3);
        for (const auto& b : solve_steady(q)) cases.emplace_back(q, b);
        for (const auto& [p, b] : cases) {
            const auto s = response_single(p, b, default_probe_grid(p));
            for (std::size_t i = 0; i < s.delta.size(); ++i) {
                const complex c = closed_form_single(p, b, s.delta[i]);
                worst_a = std::max(worst_a, std::abs(c - s.T[i]) / std::abs(s.T[i]));
            }
        }
    }
    const bool a = worst_a < 1e-8;
    os << "(a) worst rel " << worst_a << (a ? "" : " FAIL");

    // (b) two-YIG drive-off peaks vs 3x3 eigenfrequencies.
    double worst_b = 0;
    bool count_b = true;
    for (const char* name : {"fig2b", "fig6", "fig7c"}) {
        const auto p = oracle::load(name).at_power(0);
        const auto peaks = extract_peaks(response_two(p, zero_background(p), default_probe_grid(p)));
        const auto ev = oracle::eigenfrequencies(p);
        if (peaks.peaks.size() != 3) {
            count_b = false;
            continue;
        }
        for (int i = 0; i < 3; ++i) {
            worst_b = std::max(worst_b, std::abs(peaks.peaks[static_cast<std::size_t>(i)].delta - ev[static_cast<std::size_t>(i)]) /
                                            (0.5 * p.cavity.gamma_c));
        }
    }
    const bool b = count_b && worst_b < 1.0;
    os << "; (b) worst |peak - eigenfrequency| / (gamma_c/2) " << worst_b << (b ? "" : " FAIL");

    // (c) resonant Kerr-free single YIG.
    SystemParams r = p5.at_power(0);
    r.magnons[0].U = 0;
    r.magnons[0].omega = r.cavity.omega_c;
    const double d0 = r.cavity.omega_c - r.drive.omega_d;
    const double g = r.magnons[0].g;
    const auto grid = default_probe_grid(r);
    const double step = grid.delta_grid[1] - grid.delta_grid[0];
    const auto pk = extract_peaks(response_single(r, zero_background(r), grid));
    bool c = pk.peaks.size() == 2;
    double worst_c = 0;
    if (c) {
        worst_c = std::max(std::abs(pk.peaks[0].delta - (d0 - g)), std::abs(pk.peaks[1].delta - (d0 + g))) /
                  (step / 10 + r.cavity.gamma_c / 2);
        c = worst_c < 1.0;
    }
    os << "; (c) worst offset / (step/10 + gamma_c/2) " << worst_c << (c ? "" : " FAIL");
    return {a && b && c, os.str()};
}

Outcome criterion7() {
    const auto p = oracle::load("fig6");
    std::vector<double> powers;
    for (int i = 0; i < 400; ++i) powers.push_back(50e-3 * i / 399.0);
    const auto curves = shift_vs_power(p, powers, Sigma::HP, SweepDirection::both, default_probe_grid(p));
    const auto traces = run_sweep_on_grid(p, SweepParameter::power, powers, SweepDirection::both);
    const double interval = powers[1] - powers[0];
    bool ok = true;
    double max_shift = 0;
    std::ostringstream os;
    for (std::size_t d = 0; d < curves.size(); ++d) {
        const auto& c = curves[d];
        const auto& t = traces[d];
        for (const auto& s : c.shift) {
            if (s) max_shift = std::max(max_shift, to_mhz(*s));
        }
        os << to_string(c.direction) << ": sweep jumps";
        for (const auto& j : t.jumps) os << ' ' << j.location() * 1e3;
        os << " mW, shift jumps";
        for (std::size_t i : c.shift_jumps) os << ' ' << 0.5 * (c.power[i] + c.power[i - 1]) * 1e3;
        os << " mW; ";
        if (c.shift_jumps.size() != t.jumps.size()) ok = false;
        for (std::size_t k = 0; k < std::min(c.shift_jumps.size(), t.jumps.size()); ++k) {
            const std::size_t i = c.shift_jumps[k];
            const double at = 0.5 * (c.power[i] + c.power[i - 1]);
            if (std::abs(at - t.jumps[k].location()) > interval * (1 + 1e-9)) ok = false;
        }
    }
    os << "max HP shift " << max_shift << " MHz";
    ok = ok && max_shift >= 20 && max_shift <= 40;
    return {ok, os.str()};
}

Outcome criterion8() {
    struct Pick {
        const char* cfg;
        double power;
    };
    const Pick picks[] = {{"fig2b", 30e-3}, {"fig5", 90e-3}, {"fig2a", 20e-3}};
    std::vector<std::pair<SystemParams, SteadyBranch>> samples;
    for (const auto& pk : picks) {
        const auto p = oracle::load(pk.cfg).at_power(pk.power);
        for (const auto& b : solve_steady(p)) samples.emplace_back(p, b);
    }
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    int agree = 0, total = 0;
    std::ostringstream os;
    for (const auto& [p, b] : samples) {
        if (total == 10) break;
        ++total;
        const oracle::MeanField f(p);
        std::vector<oracle::cd> s{b.m1};
        if (b.m2) s.push_back(*b.m2);
        s.push_back(b.a);
        std::vector<oracle::cd> dir(s.size());
        for (auto& z : dir) z = {n01(rng), n01(rng)};
        const double scale = 1e-3 * oracle::norm(s) / oracle::norm(dir);
        std::vector<oracle::cd> start(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) start[i] = s[i] + scale * dir[i];
        const double t_end = 100.0 / p.cavity.gamma_c;
        const auto tr = oracle::integrate(f, s, start, t_end, 2e-11);
        const bool converged = tr.final < 0.5 * tr.initial;
        const bool departed = tr.peak > 10.0 * tr.initial;
        const bool match = b.stable ? (converged && !departed) : departed;
        agree += match;
        os << (b.stable ? 'S' : 'U') << (match ? "" : "!") << ' ';
    }
    os << "-> " << agree << "/" << total << " match the Jacobian classification";
    return {total == 10 && agree == total, os.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1 fig2b three stable states", criterion1},
        {"2 single-YIG bistable states", criterion2},
        {"3 Kerr-free limit oracle", criterion3},
        {"4 residual invariant", criterion4},
        {"5 hysteresis jump structure", criterion5},
        {"6 spectroscopy oracles", criterion6},
        {"7 shift-curve congruence", criterion7},
        {"8 stability vs time integration", criterion8},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

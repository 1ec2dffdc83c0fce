// magkerr: steady states, sweeps, probe spectra and polariton shifts from a config file.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "magkerr/magkerr.hpp"

using namespace magkerr;

namespace {

struct Common {
    std::string config;
    std::string output;
    std::string plot;
};

std::ostream& out_stream(const Common& c, std::unique_ptr<std::ofstream>& file) {
    if (c.output.empty()) return std::cout;
    file = std::make_unique<std::ofstream>(c.output, std::ios::binary);
    if (!*file) throw Error("cannot write '" + c.output + "'");
    return *file;
}

void write_plot(const Common& c, const std::string& body) {
    if (c.plot.empty()) return;
    if (c.output.empty()) throw Error("--plot needs --output so the script can reference the data file");
    std::ofstream f(c.plot, std::ios::binary);
    if (!f) throw Error("cannot write '" + c.plot + "'");
    f << "# gnuplot script\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "data = '" << c.output << "'\n"
      << body;
}

std::string num(double v) { return format_number(v); }

SystemParams with_power_mw(const Config& cfg, std::optional<double> power_mw) {
    if (!power_mw) return cfg.params;
    if (*power_mw < 0) throw DomainError("--power must be >= 0");
    return cfg.params.at_power(*power_mw * 1e-3);
}

std::string describe_branches(const std::vector<SteadyBranch>& branches) {
    std::ostringstream os;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        os << (i ? ", " : "") << i << " (x=" << num(branches[i].x) << (branches[i].stable ? ", stable)" : ", unstable)");
    }
    return os.str();
}

int cmd_steady(const Common& c, std::optional<double> power_mw) {
    const Config cfg = load_config(c.config);
    const SystemParams p = with_power_mw(cfg, power_mw);
    const auto branches = solve_steady(p);
    Table t({"x", "m1_re", "m1_im", "m2_re", "m2_im", "a_re", "a_im", "residual_rad_per_s", "stable",
             "max_re_eigenvalue_rad_per_s"});
    std::size_t stable = 0;
    for (const auto& b : branches) {
        stable += b.stable;
        t.row({num(b.x), num(b.m1.real()), num(b.m1.imag()), b.m2 ? num(b.m2->real()) : "", b.m2 ? num(b.m2->imag()) : "",
               num(b.a.real()), num(b.a.imag()), num(b.residual), b.stable ? "1" : "0", num(b.max_real_eigenvalue())});
    }
    t.comment("rabi_rad_per_s " + num(rabi_frequency(p)));
    t.comment("branches " + std::to_string(branches.size()) + " stable " + std::to_string(stable));
    for (const auto& b : branches) {
        if (!b.within_spin_bound) t.comment("warning: x=" + num(b.x) + " exceeds the total spin bound");
    }
    std::unique_ptr<std::ofstream> f;
    t.write(out_stream(c, f));
    write_plot(c, "set logscale y\nset ylabel 'x'\nplot data using 0:1 with points pt 7\n");
    return 0;
}

struct SweepArgs {
    std::string param = "power";
    double from = 0;
    double to = 50;
    int points = 400;
    std::string direction = "both";
};

SweepParameter parse_param(const std::string& s) {
    if (s == "power") return SweepParameter::power;
    if (s == "omega_d") return SweepParameter::omega_d;
    if (s == "omega_c") return SweepParameter::omega_c;
    if (s == "gamma_c") return SweepParameter::gamma_c;
    throw DomainError("--param must be power, omega_d, omega_c or gamma_c");
}

SweepDirection parse_direction(const std::string& s) {
    if (s == "up") return SweepDirection::up;
    if (s == "down") return SweepDirection::down;
    if (s == "both") return SweepDirection::both;
    throw DomainError("--direction must be up, down or both");
}

// CLI units: power mW, omega_d / omega_c GHz, gamma_c MHz under the config's damping convention.
double to_internal(SweepParameter which, double v, const Config& cfg) {
    switch (which) {
        case SweepParameter::power: return v * 1e-3;
        case SweepParameter::omega_d:
        case SweepParameter::omega_c: return from_ghz(v);
        case SweepParameter::gamma_c: return from_mhz(v) * (cfg.damping == DampingConvention::fwhm ? 0.5 : 1.0);
    }
    return v;
}

double to_cli(SweepParameter which, double v, const Config& cfg) {
    return v / to_internal(which, 1.0, cfg);
}

const char* param_column(SweepParameter which) {
    switch (which) {
        case SweepParameter::power: return "power_mw";
        case SweepParameter::omega_d: return "omega_d_ghz";
        case SweepParameter::omega_c: return "omega_c_ghz";
        case SweepParameter::gamma_c: return "gamma_c_mhz";
    }
    return "value";
}

int cmd_sweep(const Common& c, const SweepArgs& a) {
    const Config cfg = load_config(c.config);
    SweepSpec spec;
    spec.parameter = parse_param(a.param);
    spec.start = to_internal(spec.parameter, a.from, cfg);
    spec.stop = to_internal(spec.parameter, a.to, cfg);
    spec.points = a.points;
    spec.direction = parse_direction(a.direction);
    const auto traces = run_sweep(cfg.params, spec);

    Table t({"direction", param_column(spec.parameter), "x", "stable_count", "jump"});
    for (const auto& tr : traces) {
        std::vector<bool> jumped(tr.values.size(), false);
        for (const auto& j : tr.jumps) jumped[j.index] = true;
        for (std::size_t i = 0; i < tr.values.size(); ++i) {
            t.row({std::string(to_string(tr.direction)), num(to_cli(spec.parameter, tr.values[i], cfg)),
                   num(tr.selected[i].x), std::to_string(tr.stable_count(i)), jumped[i] ? "1" : "0"});
        }
    }
    std::size_t max_stable = 0;
    for (const auto& tr : traces) {
        for (std::size_t i = 0; i < tr.values.size(); ++i) max_stable = std::max(max_stable, tr.stable_count(i));
    }
    t.comment("regime " + std::string(to_string(regime_from_count(max_stable))));
    t.comment("max_stable_count " + std::to_string(max_stable));
    for (const auto& tr : traces) {
        t.comment(std::string(to_string(tr.direction)) + "_jumps " + std::to_string(tr.jumps.size()));
        for (const auto& j : tr.jumps) {
            t.comment(std::string(to_string(tr.direction)) + " jump at " +
                      num(to_cli(spec.parameter, j.location(), cfg)) + " +- " +
                      num(to_cli(spec.parameter, j.uncertainty(), cfg)) + " x " + num(j.x_before) + " -> " +
                      num(j.x_after) + (j.ambiguous ? " (ambiguous landing)" : ""));
        }
    }
    if (traces.size() == 2) {
        for (const auto& [lo, hi] : hysteresis_windows(traces[0], traces[1])) {
            double a0 = to_cli(spec.parameter, lo, cfg), a1 = to_cli(spec.parameter, hi, cfg);
            if (a0 > a1) std::swap(a0, a1);
            t.comment("hysteresis_window " + num(a0) + " " + num(a1));
        }
    }
    std::unique_ptr<std::ofstream> f;
    t.write(out_stream(c, f));
    write_plot(c, std::string("set logscale y\nset xlabel '") + param_column(spec.parameter) +
                      "'\nset ylabel 'x'\nplot data using 2:3 every ::0 with lines title 'selected x'\n");
    return 0;
}

struct GridArg {
    double from = 0, to = 0;
    int points = 0;
};

GridArg parse_grid(const std::string& s) {
    GridArg g;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &g.from, &g.to, &g.points, &extra) != 3) {
        throw DomainError("--grid must be from:to:points (MHz)");
    }
    return g;
}

int cmd_spectrum(const Common& c, std::optional<double> power_mw, const std::string& branch_arg,
                 const std::string& grid_arg) {
    const Config cfg = load_config(c.config);
    const SystemParams p = with_power_mw(cfg, power_mw);
    ProbeSpec probe = default_probe_grid(p);
    if (!grid_arg.empty()) {
        const GridArg g = parse_grid(grid_arg);
        probe = probe_grid_mhz(g.from, g.to, g.points);
    }
    const auto branches = solve_steady(p);
    std::vector<std::size_t> chosen;
    if (branch_arg == "all") {
        for (std::size_t i = 0; i < branches.size(); ++i) {
            if (branches[i].stable) chosen.push_back(i);
        }
    } else {
        std::size_t idx = 0;
        std::size_t used = 0;
        try {
            idx = std::stoul(branch_arg, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != branch_arg.size() || idx >= branches.size()) {
            throw DomainError("invalid branch '" + branch_arg + "'; available: " + describe_branches(branches));
        }
        chosen.push_back(idx);
    }

    const double gc = p.cavity.gamma_c;
    Table t({"branch", "delta_mhz", "t_re", "t_im", "t_abs2"});
    std::vector<std::string> summary;
    for (std::size_t k : chosen) {
        const Spectrum s = response(p, branches[k], probe);
        for (std::size_t i = 0; i < s.delta.size(); ++i) {
            const complex T = s.T[i] * gc;
            t.row({std::to_string(k), num(to_mhz(s.delta[i])), num(T.real()), num(T.imag()), num(std::norm(T))});
        }
        const auto peaks = extract_peaks(s);
        if (!peaks.warning.empty()) summary.push_back("warning: branch " + std::to_string(k) + ": " + peaks.warning);
        summary.push_back("branch " + std::to_string(k) + " x " + num(branches[k].x) + " peaks " +
                          std::to_string(peaks.peaks.size()));
        for (const auto& pk : peaks.peaks) {
            summary.push_back("peak branch " + std::to_string(k) + " " + pk.label + " delta_mhz " +
                              num(to_mhz(pk.delta)) + " probe_ghz " + num(to_ghz(p.drive.omega_d + pk.delta)) +
                              " height " + num(pk.height * gc * gc));
        }
    }
    t.comment("T is scaled by gamma_c (dimensionless); delta = omega_probe - omega_d");
    for (const auto& s : summary) t.comment(s);
    std::unique_ptr<std::ofstream> f;
    t.write(out_stream(c, f));
    write_plot(c, "set xlabel 'delta/2pi (MHz)'\nset ylabel '|T|^2'\nplot data using 2:5 with lines\n");
    return 0;
}

struct ShiftArgs {
    std::string sigma = "HP";
    double from = 0;
    double to = 50;
    int points = 400;
    std::string direction = "both";
};

int cmd_shift(const Common& c, const ShiftArgs& a) {
    const Config cfg = load_config(c.config);
    if (a.points < 2) throw DomainError("--points must be >= 2");
    if (a.from < 0 || a.to < 0 || a.from == a.to) throw DomainError("--from/--to must be distinct and >= 0");
    std::vector<double> powers;
    for (int i = 0; i < a.points; ++i) powers.push_back((a.from + (a.to - a.from) * i / (a.points - 1)) * 1e-3);
    const Sigma sigma = parse_sigma(a.sigma);
    const auto curves = shift_vs_power(cfg.params, powers, sigma, parse_direction(a.direction),
                                       default_probe_grid(cfg.params));

    Table t({"power_mw", "shift_mhz", "direction"});
    std::vector<std::string> warnings;
    std::size_t max_stable = 0;
    for (const auto& cv : curves) {
        max_stable = std::max(max_stable, cv.max_stable_count);
        for (std::size_t i = 0; i < cv.power.size(); ++i) {
            const std::string dir(to_string(cv.direction));
            t.row({num(cv.power[i] * 1e3), cv.shift[i] ? num(to_mhz(*cv.shift[i])) : "", dir});
            if (!cv.shift[i]) {
                warnings.push_back("warning: " + std::string(to_string(sigma)) + " peak unresolved at " +
                                   num(cv.power[i] * 1e3) + " mW (" + dir + ")");
            }
        }
    }
    t.comment("sigma " + std::string(to_string(sigma)) + " reference_delta_mhz " + num(to_mhz(curves.front().reference)));
    t.comment("regime " + std::string(to_string(regime_from_count(max_stable))));
    for (const auto& cv : curves) {
        const std::string dir(to_string(cv.direction));
        double mx = 0;
        for (const auto& s : cv.shift) {
            if (s) mx = std::max(mx, std::abs(*s));
        }
        t.comment(dir + "_max_abs_shift_mhz " + num(to_mhz(mx)));
        for (const auto& j : cv.branch_jumps) t.comment(dir + " branch jump at " + num(j.location() * 1e3) + " mW");
        for (std::size_t i : cv.shift_jumps) {
            t.comment(dir + " shift jump at " + num(0.5 * (cv.power[i] + cv.power[i - 1]) * 1e3) + " mW");
        }
    }
    for (const auto& w : warnings) t.comment(w);
    std::unique_ptr<std::ofstream> f;
    t.write(out_stream(c, f));
    write_plot(c, "set xlabel 'P (mW)'\nset ylabel 'shift/2pi (MHz)'\nplot data using 1:2 with linespoints\n");
    return 0;
}

int cmd_linear(const Common& c, std::optional<double> power_mw) {
    const Config cfg = load_config(c.config);
    const SystemParams p = with_power_mw(cfg, power_mw);
    if (!p.two_yig()) throw DomainError("linear needs a two-YIG config");
    SystemParams lin = p;
    for (auto& m : lin.magnons) m.U = 0.0;
    const double closed = linear_spin_current(lin);
    const auto roots = solve_steady(lin);
    if (roots.size() != 1) throw ConvergenceError("Kerr-free polynomial has " + std::to_string(roots.size()) + " roots", {});
    const double poly = roots.front().x;
    const double rel = closed == 0.0 && poly == 0.0 ? 0.0 : std::abs(closed - poly) / std::max(std::abs(closed), std::abs(poly));
    Table t({"power_mw", "x_closed_form", "x_polynomial", "relative_difference"});
    const double pw = p.drive.power ? *p.drive.power * 1e3 : 0.0;
    t.row({p.drive.power ? num(pw) : "", num(closed), num(poly), num(rel)});
    std::unique_ptr<std::ofstream> f;
    t.write(out_stream(c, f));
    return 0;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "configuration file")->required();
    sub->add_option("--output", c.output, "write CSV here instead of stdout");
    sub->add_option("--plot", c.plot, "also write a gnuplot script reading the CSV");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kerr magnon steady states, hysteresis and probe spectra"};
    app.require_subcommand(1);
    Common common;
    std::optional<double> power;
    SweepArgs sw;
    ShiftArgs sh;
    std::string branch = "all", grid;

    auto* steady = app.add_subcommand("steady", "steady-state branches at one drive power");
    add_common(steady, common);
    steady->add_option("--power", power, "drive power (mW); defaults to the config value");

    auto* sweep = app.add_subcommand("sweep", "hysteretic parameter sweep");
    add_common(sweep, common);
    sweep->add_option("--param", sw.param, "power | omega_d | omega_c | gamma_c")->capture_default_str();
    sweep->add_option("--from", sw.from, "start (mW, GHz or MHz by parameter)")->capture_default_str();
    sweep->add_option("--to", sw.to, "stop")->capture_default_str();
    sweep->add_option("--points", sw.points, "grid points")->capture_default_str();
    sweep->add_option("--direction", sw.direction, "up | down | both")->capture_default_str();

    auto* spectrum = app.add_subcommand("spectrum", "probe transmission spectra");
    add_common(spectrum, common);
    spectrum->add_option("--power", power, "drive power (mW)");
    spectrum->add_option("--branch", branch, "branch index or 'all' (all stable branches)")->capture_default_str();
    spectrum->add_option("--grid", grid, "from:to:points in delta/2pi MHz");

    auto* shift = app.add_subcommand("shift", "polariton shift versus drive power");
    add_common(shift, common);
    shift->add_option("--sigma", sh.sigma, "LP | MP | HP")->capture_default_str();
    shift->add_option("--from", sh.from, "start power (mW)")->capture_default_str();
    shift->add_option("--to", sh.to, "stop power (mW)")->capture_default_str();
    shift->add_option("--points", sh.points, "grid points")->capture_default_str();
    shift->add_option("--direction", sh.direction, "up | down | both")->capture_default_str();

    auto* linear = app.add_subcommand("linear", "Kerr-free spin current cross-check");
    add_common(linear, common);
    linear->add_option("--power", power, "drive power (mW)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*steady) return cmd_steady(common, power);
        if (*sweep) return cmd_sweep(common, sw);
        if (*spectrum) return cmd_spectrum(common, power, branch, grid);
        if (*shift) return cmd_shift(common, sh);
        if (*linear) return cmd_linear(common, power);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

#pragma once

// Steady states of the noise-free mean-field equations.
//
// Two YIGs: the amplitudes are eliminated in favour of x = |M2|^2, which solves a real
// degree-9 polynomial. One YIG: x = |M|^2 solves a real cubic. Amplitudes are rebuilt by
// back-substitution and each branch is classified by the eigenvalues of the linearized flow.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "magkerr/errors.hpp"
#include "magkerr/model.hpp"
#include "magkerr/polynomial.hpp"

namespace magkerr {

struct SteadyBranch {
    double x = 0;  ///< |M2|^2 for two YIGs, |M|^2 for one
    complex m1;
    std::optional<complex> m2;  ///< absent in single-YIG mode
    complex a;
    double residual = 0;  ///< max modulus of the steady-state equations (rad/s)
    bool stable = false;
    std::vector<complex> eigenvalues;
    int multiplicity = 1;
    bool within_spin_bound = true;  ///< x < 2S

    [[nodiscard]] double max_real_eigenvalue() const {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& e : eigenvalues) m = std::max(m, e.real());
        return m;
    }
};

/// p(x) = |bracket(x)|^2 x - rhs for the two-YIG system.
struct SpinPolynomial {
    std::vector<double> coeffs;  ///< ascending, length 10 when both Kerr terms are on
    double rhs = 0;

    [[nodiscard]] Polynomial poly() const { return Polynomial(coeffs); }
};

/// Real and imaginary parts of bracket(x) as real polynomials in x.
struct BracketPolynomials {
    Polynomial re;
    Polynomial im;
};

namespace detail {

inline void require_two(const std::vector<MagnonMode>& magnons) {
    if (magnons.size() != 2) throw DomainError("operation needs two magnon modes");
    if (magnons[0].g == 0.0 || magnons[1].g == 0.0) {
        throw DegenerateCouplingError("two-YIG reduction needs g1 != 0 and g2 != 0");
    }
}

inline double gamma_c_of(const Detunings& det) { return -det.D_c.imag(); }

}  // namespace detail

/// bracket(x) = (t1 + C1 q(x) x)(t2 + 2 U2 x) - g1^2 g2^2 / D_c^2,
/// C1 = 2 U1 |D_c|^2 / (g1^2 g2^2), q(x) = |t2 + 2 U2 x|^2.
[[nodiscard]] inline BracketPolynomials bracket_polynomials(const Detunings& det,
                                                            const std::vector<MagnonMode>& magnons) {
    detail::require_two(magnons);
    const MagnonMode& m1 = magnons[0];
    const MagnonMode& m2 = magnons[1];
    const complex t1 = det.tilde_delta[0], t2 = det.tilde_delta[1];
    const double g12 = m1.g * m1.g * m2.g * m2.g;
    const double C1 = 2.0 * m1.U * std::norm(det.D_c) / g12;
    const Polynomial X = Polynomial::identity();
    const Polynomial q{std::norm(t2), 4.0 * m2.U * t2.real(), 4.0 * m2.U * m2.U};
    const Polynomial a_re = Polynomial::constant(t1.real()) + C1 * (q * X);
    const Polynomial a_im = Polynomial::constant(t1.imag());
    const Polynomial b_re{t2.real(), 2.0 * m2.U};
    const Polynomial b_im = Polynomial::constant(t2.imag());
    const complex K = g12 / (det.D_c * det.D_c);
    return {a_re * b_re - a_im * b_im - Polynomial::constant(K.real()),
            a_re * b_im + a_im * b_re - Polynomial::constant(K.imag())};
}

[[nodiscard]] inline complex evaluate_bracket(const BracketPolynomials& b, double x) {
    return {b.re(x), b.im(x)};
}

[[nodiscard]] inline SpinPolynomial build_spin_polynomial(const Detunings& det,
                                                          const std::vector<MagnonMode>& magnons,
                                                          double rabi) {
    if (!(rabi >= 0)) throw DomainError("Rabi frequency must be >= 0");
    const auto br = bracket_polynomials(det, magnons);
    const double g12 = magnons[0].g * magnons[0].g * magnons[1].g * magnons[1].g;
    SpinPolynomial sp;
    sp.rhs = g12 * rabi * rabi / std::norm(det.D_c);
    const Polynomial p = (br.re * br.re + br.im * br.im) * Polynomial::identity() - Polynomial::constant(sp.rhs);
    sp.coeffs = p.coefficients();
    if (sp.coeffs.empty()) sp.coeffs = {0.0};
    return sp;
}

struct Amplitudes {
    complex m1;
    std::optional<complex> m2;
    complex a;
    double residual = 0;
};

/// Left-hand sides of the steady-state equations (drive moved to the left); all zero at a steady state.
[[nodiscard]] inline std::vector<complex> steady_equations(const SystemParams& p, complex m1,
                                                           std::optional<complex> m2, complex a) {
    const Detunings det = derive_detunings(p);
    const double rabi = rabi_frequency(p);
    const complex I(0.0, 1.0);
    const double gc = p.cavity.gamma_c;
    const auto& k1 = p.magnons[0];
    std::vector<complex> e;
    e.push_back(-(I * det.delta[0] + k1.gamma) * m1 - 2.0 * I * k1.U * std::norm(m1) * m1 - I * k1.g * a + rabi);
    complex cav = -(I * det.delta_c + gc) * a - I * k1.g * m1;
    if (p.two_yig()) {
        const auto& k2 = p.magnons[1];
        const complex z = m2.value_or(0.0);
        e.push_back(-(I * det.delta[1] + k2.gamma) * z - 2.0 * I * k2.U * std::norm(z) * z - I * k2.g * a);
        cav -= I * k2.g * z;
    }
    e.push_back(cav);
    return e;
}

[[nodiscard]] inline double max_modulus(const std::vector<complex>& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

/// Back-substitution for the two-YIG system at a given x = |M2|^2.
[[nodiscard]] inline Amplitudes reconstruct_amplitudes(double x, const Detunings& det,
                                                       const std::vector<MagnonMode>& magnons, double rabi) {
    if (!(x >= 0)) throw DomainError("x must be >= 0");
    const auto br = bracket_polynomials(det, magnons);
    const complex bracket = evaluate_bracket(br, x);
    if (bracket == complex(0.0)) throw SingularityError("bracket(x) vanishes; amplitudes undefined");
    const auto& k1 = magnons[0];
    const auto& k2 = magnons[1];
    const complex I(0.0, 1.0);
    const complex D2(det.delta[1] + 2.0 * k2.U * x, -k2.gamma);
    Amplitudes out;
    const complex m2 = -I * k1.g * k2.g * rabi / (det.D_c * bracket);
    out.m2 = m2;
    out.a = -(D2 / k2.g) * m2;
    out.m1 = (det.D_c * D2 - k2.g * k2.g) * m2 / (k1.g * k2.g);

    // Residual of the original equations, built from the detunings passed in.
    const double gc = detail::gamma_c_of(det);
    const complex e1 = -(I * det.delta[0] + k1.gamma) * out.m1 - 2.0 * I * k1.U * std::norm(out.m1) * out.m1 -
                       I * k1.g * out.a + rabi;
    const complex e2 = -(I * det.delta[1] + k2.gamma) * m2 - 2.0 * I * k2.U * std::norm(m2) * m2 - I * k2.g * out.a;
    const complex e3 = -(I * det.delta_c + gc) * out.a - I * (k1.g * out.m1 + k2.g * m2);
    out.residual = std::max({std::abs(e1), std::abs(e2), std::abs(e3)});
    return out;
}

/// Real Jacobian of the mean-field flow in (Re, Im) pairs ordered (m1, [m2,] a).
[[nodiscard]] inline Eigen::MatrixXd mean_field_jacobian(const SystemParams& p, complex m1,
                                                         std::optional<complex> m2) {
    const Detunings det = derive_detunings(p);
    const int modes = static_cast<int>(p.magnon_count()) + 1;
    const int cav = modes - 1;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    // f = A z + B conj(z) contributes [[Re(A+B), -Im(A-B)], [Im(A+B), Re(A-B)]].
    auto block = [&](int row, int col, complex A, complex B) {
        J(2 * row, 2 * col) += (A + B).real();
        J(2 * row, 2 * col + 1) += -(A - B).imag();
        J(2 * row + 1, 2 * col) += (A + B).imag();
        J(2 * row + 1, 2 * col + 1) += (A - B).real();
    };
    const complex I(0.0, 1.0);
    for (int i = 0; i < cav; ++i) {
        const auto& k = p.magnons[static_cast<std::size_t>(i)];
        const complex z = i == 0 ? m1 : m2.value_or(0.0);
        block(i, i, -(I * det.delta[static_cast<std::size_t>(i)] + k.gamma + 4.0 * I * k.U * std::norm(z)),
              -2.0 * I * k.U * z * z);
        block(i, cav, -I * k.g, 0.0);
        block(cav, i, -I * k.g, 0.0);
    }
    block(cav, cav, -(I * det.delta_c + p.cavity.gamma_c), 0.0);
    return J;
}

struct StabilityResult {
    bool stable = false;
    std::vector<complex> eigenvalues;
};

/// Stable iff every Jacobian eigenvalue has real part below 1e-6 gamma_c; double roots are unstable.
[[nodiscard]] inline StabilityResult classify_stability(const SteadyBranch& branch, const SystemParams& p) {
    const Eigen::MatrixXd J = mean_field_jacobian(p, branch.m1, branch.m2);
    Eigen::EigenSolver<Eigen::MatrixXd> es(J, false);
    StabilityResult r;
    double max_re = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        r.eigenvalues.push_back(es.eigenvalues()[i]);
        max_re = std::max(max_re, es.eigenvalues()[i].real());
    }
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(), [](complex a, complex b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
    });
    r.stable = branch.multiplicity < 2 && max_re < 1e-6 * p.cavity.gamma_c;
    return r;
}

namespace detail {

inline void finish_branch(SteadyBranch& b, const SystemParams& p) {
    const auto s = classify_stability(b, p);
    b.stable = s.stable;
    b.eigenvalues = s.eigenvalues;
    b.within_spin_bound = b.x < p.constants.total_spin;
}

}  // namespace detail

[[nodiscard]] inline std::vector<SteadyBranch> solve_two_yig(const SystemParams& p,
                                                             const RootSearchOptions& opt = {}) {
    if (!p.two_yig()) throw DomainError("solve_two_yig needs two magnon modes");
    const Detunings det = derive_detunings(p);
    detail::require_two(p.magnons);
    const double rabi = rabi_frequency(p);
    const SpinPolynomial sp = build_spin_polynomial(det, p.magnons, rabi);
    const auto roots = positive_real_roots(sp.poly(), opt);
    if (roots.empty()) throw ConvergenceError("no nonnegative root of the spin polynomial", sp.coeffs);

    std::vector<SteadyBranch> out;
    for (const auto& r : roots) {
        const Amplitudes amp = reconstruct_amplitudes(r.x, det, p.magnons, rabi);
        SteadyBranch b;
        b.x = r.x;
        b.m1 = amp.m1;
        b.m2 = amp.m2;
        b.a = amp.a;
        b.residual = amp.residual;
        b.multiplicity = r.multiplicity;
        detail::finish_branch(b, p);
        out.push_back(std::move(b));
    }
    return out;
}

/// The Kerr-free (U -> 0) closed form of the spin current.
[[nodiscard]] inline double linear_spin_current(const SystemParams& p) {
    if (!p.two_yig()) throw DomainError("linear_spin_current needs two magnon modes");
    const Detunings det = derive_detunings(p);
    const double rabi = rabi_frequency(p);
    const double g1 = p.magnons[0].g, g2 = p.magnons[1].g;
    const double g12 = g1 * g1 * g2 * g2;
    const complex denom = det.tilde_delta[0] * det.tilde_delta[1] - g12 / (det.D_c * det.D_c);
    if (std::norm(denom) == 0.0) throw SingularityError("resonance singularity in the linear spin current");
    return g12 * rabi * rabi / (std::norm(det.D_c) * std::norm(denom));
}

/// Single YIG: |t + 2 U x|^2 x = Omega^2 with t = delta_m - i gamma_m - g^2 / D_c.
[[nodiscard]] inline Polynomial single_yig_polynomial(const Detunings& det, const MagnonMode& m, double rabi) {
    const complex t = det.tilde_delta[0];
    return Polynomial{-rabi * rabi, std::norm(t), 4.0 * m.U * t.real(), 4.0 * m.U * m.U};
}

[[nodiscard]] inline std::vector<SteadyBranch> solve_single_yig(const SystemParams& p,
                                                                const RootSearchOptions& opt = {}) {
    if (p.magnon_count() != 1) throw DomainError("solve_single_yig needs one magnon mode");
    const Detunings det = derive_detunings(p);
    const double rabi = rabi_frequency(p);
    const auto& m = p.magnons[0];
    const Polynomial poly = single_yig_polynomial(det, m, rabi);
    const auto roots = positive_real_roots(poly, opt);
    if (roots.empty()) throw ConvergenceError("no nonnegative root of the single-YIG cubic", poly.coefficients());

    const complex I(0.0, 1.0);
    std::vector<SteadyBranch> out;
    for (const auto& r : roots) {
        const complex denom = det.tilde_delta[0] + 2.0 * m.U * r.x;
        if (denom == complex(0.0)) throw SingularityError("singular back-substitution in single-YIG solve");
        SteadyBranch b;
        b.x = r.x;
        b.m1 = -I * rabi / denom;
        b.a = -m.g * b.m1 / det.D_c;
        b.residual = max_modulus(steady_equations(p, b.m1, std::nullopt, b.a));
        b.multiplicity = r.multiplicity;
        detail::finish_branch(b, p);
        out.push_back(std::move(b));
    }
    return out;
}

/// Dispatches on the magnon count.
[[nodiscard]] inline std::vector<SteadyBranch> solve_steady(const SystemParams& p, const RootSearchOptions& opt = {}) {
    return p.two_yig() ? solve_two_yig(p, opt) : solve_single_yig(p, opt);
}

/// Residual bound every returned branch must meet: 1e-6 max(Omega, gamma_1 sqrt(x)).
[[nodiscard]] inline double residual_bound(const SystemParams& p, double x) {
    return 1e-6 * std::max(rabi_frequency(p), p.magnons[0].gamma * std::sqrt(x));
}

}  // namespace magkerr

#pragma once

// Real polynomials with ascending coefficients, and real-root isolation on [0, inf).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "magkerr/errors.hpp"

namespace magkerr {

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) { trim(); }
    Polynomial(std::initializer_list<double> ascending) : c_(ascending) { trim(); }

    [[nodiscard]] static Polynomial constant(double v) { return Polynomial({v}); }
    [[nodiscard]] static Polynomial identity() { return Polynomial({0.0, 1.0}); }

    [[nodiscard]] int degree() const noexcept { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return c_; }
    [[nodiscard]] double coefficient(int k) const {
        return k >= 0 && k < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(k)] : 0.0;
    }

    [[nodiscard]] double operator()(double x) const noexcept {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    /// Largest |c_k x^k|; the natural scale for deciding whether p(x) is zero.
    [[nodiscard]] double term_scale(double x) const noexcept {
        double s = 0.0, xk = 1.0;
        for (double c : c_) {
            s = std::max(s, std::abs(c * xk));
            xk *= x;
        }
        return s;
    }

    [[nodiscard]] Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<double> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
        return Polynomial(std::move(d));
    }

    /// q(s) = p(scale * s).
    [[nodiscard]] Polynomial rescaled(double scale) const {
        std::vector<double> r(c_);
        double f = 1.0;
        for (double& c : r) {
            c *= f;
            f *= scale;
        }
        return Polynomial(std::move(r));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t k = 0; k < a.c_.size(); ++k) r[k] += a.c_[k];
        for (std::size_t k = 0; k < b.c_.size(); ++k) r[k] += b.c_[k];
        return Polynomial(std::move(r));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }
    friend Polynomial operator*(double s, const Polynomial& a) {
        std::vector<double> r(a.c_);
        for (double& c : r) c *= s;
        return Polynomial(std::move(r));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.c_.empty() || b.c_.empty()) return {};
        std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(r));
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }
    std::vector<double> c_;
};

/// All complex roots via eigenvalues of the companion matrix.
[[nodiscard]] inline std::vector<std::complex<double>> companion_roots(const Polynomial& p) {
    const int n = p.degree();
    if (n < 1) return {};
    const double lead = p.coefficient(n);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -p.coefficient(i) / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    std::vector<std::complex<double>> roots;
    roots.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) roots.push_back(es.eigenvalues()[i]);
    return roots;
}

struct RealRoot {
    double x = 0;
    int multiplicity = 1;
};

struct RootSearchOptions {
    double lo = 1e8;           ///< initial log-grid lower end (extended downwards if needed)
    double hi = 1e18;          ///< initial log-grid upper end (extended upwards if needed)
    int grid_points = 2000;
    double dedup_relative = 1e-8;
    double zero_tolerance = 1e-12;  ///< |p| < tol * term_scale counts as zero
};

namespace detail {

inline int sign_of(double v) { return (v > 0) - (v < 0); }

/// Bisection to adjacent doubles followed by one Newton polish inside the bracket.
inline double bisect(const Polynomial& p, double a, double b) {
    double fa = p(a);
    for (int it = 0; it < 400; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = p(m);
        if (fm == 0.0) return m;
        if (sign_of(fm) == sign_of(fa)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    const double x = 0.5 * (a + b);
    const double dp = p.derivative()(x);
    if (dp != 0.0) {
        const double xn = x - p(x) / dp;
        if (xn >= a && xn <= b && std::abs(p(xn)) < std::abs(p(x))) return xn;
    }
    return x;
}

/// Minimum of |p'| sign change in (a, b): a critical point of p, or NaN if none found.
inline double critical_point(const Polynomial& dp, double a, double b) {
    const double da = dp(a), db = dp(b);
    if (sign_of(da) == sign_of(db) || da == 0.0 || db == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return bisect(dp, a, b);
}

}  // namespace detail

/// Nonnegative real roots of p on (0, inf), sorted ascending.
///
/// p is evaluated on a log grid; sign changes are bisected. Pairs of close roots inside a
/// single cell are caught by locating the critical points of p and splitting the cell there.
/// A root where p and p' vanish together is reported with multiplicity 2.
/// A root at exactly 0 is included when p(0) == 0.
[[nodiscard]] inline std::vector<RealRoot> positive_real_roots(const Polynomial& p,
                                                               const RootSearchOptions& opt = {}) {
    std::vector<RealRoot> roots;
    if (p.degree() < 1) return roots;
    if (p.coefficient(0) == 0.0) roots.push_back({0.0, 1});

    const Polynomial dp = p.derivative();
    double lo = opt.lo, hi = opt.hi;
    // Extend the window until the polynomial's sign at both ends matches its asymptotic sign.
    int sign_small = 0;
    for (int k = 0; k <= p.degree() && sign_small == 0; ++k) sign_small = detail::sign_of(p.coefficient(k));
    for (int i = 0; i < 300 && detail::sign_of(p(lo)) != sign_small && lo > 1e-290; ++i) lo *= 1e-2;
    const int sign_large = detail::sign_of(p.coefficient(p.degree()));
    for (int i = 0; i < 300 && detail::sign_of(p(hi)) != sign_large && hi < 1e290; ++i) hi *= 1e2;
    if (!(std::isfinite(p(lo)) && std::isfinite(p(hi)))) {
        throw ConvergenceError("polynomial overflows on the search window", p.coefficients());
    }

    const int n = std::max(opt.grid_points, 16);
    const double step = std::log(hi / lo) / (n - 1);
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    grid.back() = hi;

    auto is_zero = [&](double x) { return std::abs(p(x)) <= opt.zero_tolerance * p.term_scale(x); };
    auto push = [&](double x, int mult) {
        if (!roots.empty() && std::abs(x - roots.back().x) <= opt.dedup_relative * std::abs(x)) {
            roots.back().multiplicity = std::max(roots.back().multiplicity + mult, 2);
            return;
        }
        roots.push_back({x, mult});
    };

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double a = grid[i], b = grid[i + 1];
        // Split the cell at interior critical points so every sub-interval is monotone.
        std::vector<double> cuts{a};
        double c = detail::critical_point(dp, a, b);
        if (std::isfinite(c) && c > a && c < b) {
            const int sa = detail::sign_of(p(a)), sc = detail::sign_of(p(c));
            // A resolved sign flip at c means two simple roots; otherwise a vanishing p(c) is a tangency.
            if (!(sc != 0 && sa != 0 && sc == -sa) && is_zero(c)) {
                push(c, 2);
                if (p(b) == 0.0) push(b, 1);
                continue;
            }
            cuts.push_back(c);
        }
        cuts.push_back(b);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double u = cuts[k], v = cuts[k + 1];
            const double fu = p(u), fv = p(v);
            if (fv == 0.0) {
                push(v, 1);
            } else if (fu != 0.0 && detail::sign_of(fu) != detail::sign_of(fv)) {
                push(detail::bisect(p, u, v), 1);
            }
        }
    }
    for (const auto& r : roots) {
        if (!is_zero(r.x) && r.x != 0.0) {
            // Bracketing guarantees a sign change; a large residual signals catastrophic cancellation.
            const double rel = std::abs(p(r.x)) / std::max(p.term_scale(r.x), std::numeric_limits<double>::min());
            if (rel > 1e-6) throw ConvergenceError("root polish did not converge", p.coefficients());
        }
    }
    return roots;
}

}  // namespace magkerr

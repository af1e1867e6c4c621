#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's formulas; each oracle is derived from the model
// equations directly.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

struct P {
    double a, b, k1, k2, m;
};

/// Interior equilibrium condition in product form, X = x - m > 0, y = k2 + X:
/// a (k2 + X) X - (m + X)(1 - m - X)(k1 + X), monic in X.
inline double residual(const P& p, double X) {
    return p.a * (p.k2 + X) * X - (p.m + X) * (1.0 - p.m - X) * (p.k1 + X);
}

/// Sign changes of residual on an n-point uniform grid over (0, hi].
/// Returns the bracketing intervals. For m > 0 the residual at X = 0 is
/// nonzero, so the scan starts there; for m = 0, X = 0 is the axis root.
inline std::vector<std::pair<double, double>> grid_brackets(const P& p, double hi, std::size_t n) {
    std::vector<std::pair<double, double>> out;
    const double dx = hi / static_cast<double>(n);
    double x_prev = p.m > 0.0 ? 0.0 : dx;
    double f_prev = residual(p, x_prev);
    for (std::size_t i = p.m > 0.0 ? 1 : 2; i <= n; ++i) {
        const double x = dx * static_cast<double>(i);
        const double f = residual(p, x);
        if (f == 0.0) {
            out.emplace_back(x, x);
            // step past the exact zero so it is counted once
            if (i < n) {
                ++i;
                x_prev = dx * static_cast<double>(i);
                f_prev = residual(p, x_prev);
            }
            continue;
        }
        if ((f_prev < 0.0 && f > 0.0) || (f_prev > 0.0 && f < 0.0)) out.emplace_back(x_prev, x);
        x_prev = x;
        f_prev = f;
    }
    return out;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    double flo = f(lo);
    for (int i = 0; i < iters && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline std::array<double, 2> field(const P& p, double x, double y) {
    const double xp = std::max(0.0, x - p.m);
    return {x * (1.0 - x) - p.a * y * xp / (p.k1 + xp), p.b * y * (1.0 - y / (p.k2 + xp))};
}

/// Jacobian by Richardson-extrapolated central differences, row-major.
inline std::array<double, 4> fd_jacobian(const P& p, double x, double y) {
    auto central = [&](int var, double d) {
        const double dx = var == 0 ? d : 0.0, dy = var == 1 ? d : 0.0;
        const auto fp = field(p, x + dx, y + dy);
        const auto fm = field(p, x - dx, y - dy);
        return std::array<double, 2>{(fp[0] - fm[0]) / (2 * d), (fp[1] - fm[1]) / (2 * d)};
    };
    std::array<double, 4> J{};
    for (int var = 0; var < 2; ++var) {
        const double d = 1e-3 * std::max(1.0, var == 0 ? std::abs(x) : std::abs(y));
        const auto c1 = central(var, d);
        const auto c2 = central(var, d / 2);
        for (int row = 0; row < 2; ++row) J[row * 2 + var] = (4.0 * c2[row] - c1[row]) / 3.0;
    }
    return J;
}

/// The discretized Euler recursion, written out term by term.
inline std::pair<double, double> euler_step(const P& p, double x, double y, double h) {
    const double xp = std::max(0.0, x - p.m);
    const double xn = x + (x * (1.0 - x) - p.a * y * xp / (p.k1 + xp)) * h;
    const double yn = y + (p.b * y * (1.0 - y / (p.k2 + xp))) * h;
    return {xn, yn};
}

inline double logistic(double x0, double t) { return x0 * std::exp(t) / (1.0 + x0 * (std::exp(t) - 1.0)); }

/// First Lyapunov coefficient l1 in the normalization z' = i w z + c1 z|z|^2,
/// l1 = Re c1 / w, from the projection formula with eigenvectors of the
/// Jacobian and finite-difference multilinear forms. Valid for x > m.
inline double lyapunov_l1(const P& p, double x, double y, double* omega_out = nullptr) {
    using C = std::complex<double>;
    const double d = 1e-3;
    auto F = [&](double u, double v, int i) { return field(p, u, v)[i]; };
    // second and third partials of component i
    auto fxx = [&](double u, double v, int i) { return (F(u + d, v, i) - 2 * F(u, v, i) + F(u - d, v, i)) / (d * d); };
    auto fyy = [&](double u, double v, int i) { return (F(u, v + d, i) - 2 * F(u, v, i) + F(u, v - d, i)) / (d * d); };
    auto fxy = [&](double u, double v, int i) {
        return (F(u + d, v + d, i) - F(u + d, v - d, i) - F(u - d, v + d, i) + F(u - d, v - d, i)) / (4 * d * d);
    };
    double H[2][2][2], T[2][2][2][2];
    for (int i = 0; i < 2; ++i) {
        H[i][0][0] = fxx(x, y, i);
        H[i][1][1] = fyy(x, y, i);
        H[i][0][1] = H[i][1][0] = fxy(x, y, i);
        const double txxx = (fxx(x + d, y, i) - fxx(x - d, y, i)) / (2 * d);
        const double txxy = (fxx(x, y + d, i) - fxx(x, y - d, i)) / (2 * d);
        const double txyy = (fyy(x + d, y, i) - fyy(x - d, y, i)) / (2 * d);
        const double tyyy = (fyy(x, y + d, i) - fyy(x, y - d, i)) / (2 * d);
        T[i][0][0][0] = txxx;
        T[i][0][0][1] = T[i][0][1][0] = T[i][1][0][0] = txxy;
        T[i][0][1][1] = T[i][1][0][1] = T[i][1][1][0] = txyy;
        T[i][1][1][1] = tyyy;
    }
    const auto J = fd_jacobian(p, x, y);
    const double tr = J[0] + J[3], det = J[0] * J[3] - J[1] * J[2];
    const double w = std::sqrt(det - tr * tr / 4.0);
    if (omega_out) *omega_out = w;
    const C I(0.0, 1.0);
    // A q = i w q, A^T pp = -i w pp, normalized so that conj(pp) . q = 1
    std::array<C, 2> q{C(J[1]), I * w - J[0]};
    std::array<C, 2> pp{C(J[2]), -I * w - J[0]};
    const C norm = std::conj(pp[0]) * q[0] + std::conj(pp[1]) * q[1];
    pp[0] /= std::conj(norm);
    pp[1] /= std::conj(norm);
    auto B = [&](const std::array<C, 2>& u, const std::array<C, 2>& v) {
        std::array<C, 2> r{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) r[i] += H[i][j][k] * u[j] * v[k];
        return r;
    };
    auto Cf = [&](const std::array<C, 2>& u, const std::array<C, 2>& v, const std::array<C, 2>& s) {
        std::array<C, 2> r{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) r[i] += T[i][j][k][l] * u[j] * v[k] * s[l];
        return r;
    };
    auto solve = [](C a11, C a12, C a21, C a22, const std::array<C, 2>& r) {
        const C dt = a11 * a22 - a12 * a21;
        return std::array<C, 2>{(r[0] * a22 - a12 * r[1]) / dt, (a11 * r[1] - a21 * r[0]) / dt};
    };
    auto dot = [](const std::array<C, 2>& u, const std::array<C, 2>& v) {
        return std::conj(u[0]) * v[0] + std::conj(u[1]) * v[1];
    };
    const std::array<C, 2> qb{std::conj(q[0]), std::conj(q[1])};
    // A^{-1} B(q, qbar) and (2 i w - A)^{-1} B(q, q)
    const auto b1 = B(q, qb);
    const auto s1 = solve(C(J[0]), C(J[1]), C(J[2]), C(J[3]), b1);
    const auto b2 = B(q, q);
    const auto s2 = solve(2.0 * I * w - J[0], C(-J[1]), C(-J[2]), 2.0 * I * w - J[3], b2);
    const C g = dot(pp, Cf(q, q, qb)) - 2.0 * dot(pp, B(q, s1)) + dot(pp, B(qb, s2));
    return g.real() / (2.0 * w);
}

}  // namespace oracle

#include "lglab/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lglab/errors.hpp"
#include "lglab/taylor.hpp"

namespace lglab {

std::string_view to_string(Taxonomy t) {
    switch (t) {
        case Taxonomy::Unclassified: return "Unclassified";
        case Taxonomy::Saddle: return "Saddle";
        case Taxonomy::StableNode: return "StableNode";
        case Taxonomy::UnstableNode: return "UnstableNode";
        case Taxonomy::StableFocus: return "StableFocus";
        case Taxonomy::UnstableFocus: return "UnstableFocus";
        case Taxonomy::StableDegenerateNode: return "StableDegenerateNode";
        case Taxonomy::UnstableDegenerateNode: return "UnstableDegenerateNode";
        case Taxonomy::LinearCenter: return "LinearCenter";
        case Taxonomy::SaddleNode: return "SaddleNode";
        case Taxonomy::Cusp: return "Cusp";
        case Taxonomy::TopologicalSaddle: return "TopologicalSaddle";
        case Taxonomy::TopologicalNode: return "TopologicalNode";
        case Taxonomy::Undetermined: return "Undetermined";
    }
    return "Unclassified";
}

int poincare_index(Taxonomy t) {
    switch (t) {
        case Taxonomy::Saddle:
        case Taxonomy::TopologicalSaddle: return -1;
        case Taxonomy::StableNode:
        case Taxonomy::UnstableNode:
        case Taxonomy::StableFocus:
        case Taxonomy::UnstableFocus:
        case Taxonomy::StableDegenerateNode:
        case Taxonomy::UnstableDegenerateNode:
        case Taxonomy::LinearCenter:
        case Taxonomy::TopologicalNode: return 1;
        default: return 0;
    }
}

bool is_hyperbolic(Taxonomy t) {
    switch (t) {
        case Taxonomy::Saddle:
        case Taxonomy::StableNode:
        case Taxonomy::UnstableNode:
        case Taxonomy::StableFocus:
        case Taxonomy::UnstableFocus:
        case Taxonomy::StableDegenerateNode:
        case Taxonomy::UnstableDegenerateNode: return true;
        default: return false;
    }
}

std::string_view to_string(CountBranch b) {
    switch (b) {
        case CountBranch::MPosCaseA: return "m_pos_case_a";
        case CountBranch::MPosCaseB: return "m_pos_case_b";
        case CountBranch::MPosCaseC: return "m_pos_case_c";
        case CountBranch::MZeroCaseA: return "m_zero_case_a";
        case CountBranch::MZeroCaseB: return "m_zero_case_b";
        case CountBranch::MZeroCaseC: return "m_zero_case_c";
    }
    return "m_pos_case_c";
}

std::vector<double> CubicCoeffs::critical_points() const {
    // roots of 3X^2 + 2 alpha2 X + alpha1, written as X^2 + (2/3)alpha2 X + alpha1/3
    const double delta = tong_delta();
    if (delta < 0.0) return {};
    if (delta == 0.0) return {-alpha2 / 3.0};
    const double sq = std::sqrt(delta);
    const double q = -(alpha2 + std::copysign(sq, alpha2));
    std::vector<double> roots;
    if (q == 0.0) {
        roots = {-sq / 3.0, sq / 3.0};
    } else {
        roots = {q / 3.0, alpha1 / q};
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Linearization taxonomy for hyperbolic (s, p); Unclassified otherwise.
Taxonomy hyperbolic_taxonomy(double s, double p, double delta) {
    if (p < -kHyperbolicityTol) return Taxonomy::Saddle;
    if (p <= kHyperbolicityTol || std::abs(s) <= kHyperbolicityTol) return Taxonomy::Unclassified;
    const bool stable = s > 0.0;
    if (delta > kHyperbolicityTol) return stable ? Taxonomy::StableNode : Taxonomy::UnstableNode;
    if (delta < -kHyperbolicityTol) return stable ? Taxonomy::StableFocus : Taxonomy::UnstableFocus;
    return stable ? Taxonomy::StableDegenerateNode : Taxonomy::UnstableDegenerateNode;
}

// A monic polynomial of degree 2 or 3 restricted to an interval.
struct Poly {
    int degree;
    double c2, c1, c0;  // degree 3: X^3 + c2 X^2 + c1 X + c0; degree 2: X^2 + c1 X + c0

    double operator()(double X) const {
        return degree == 3 ? ((X + c2) * X + c1) * X + c0 : (X + c1) * X + c0;
    }
    double derivative(double X) const {
        return degree == 3 ? (3.0 * X + 2.0 * c2) * X + c1 : 2.0 * X + c1;
    }
};

constexpr int kMaxPolishIterations = 200;

// Safeguarded Newton on a sign-changing bracket.
double polish_root(const Poly& f, double lo, double hi) {
    if (f(hi) < 0.0) std::swap(lo, hi);  // orient so that f(lo) < 0 < f(hi)
    double x = 0.5 * (lo + hi);
    double dx_old = std::abs(hi - lo);
    double dx = dx_old;
    for (int it = 0; it < kMaxPolishIterations; ++it) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        if (fx < 0.0) lo = x; else hi = x;
        const double df = f.derivative(x);
        const double newton = df != 0.0 ? x - fx / df : std::nan("");
        const bool newton_ok = std::isfinite(newton) && (newton - lo) * (newton - hi) < 0.0 &&
                               std::abs(2.0 * fx) < std::abs(dx_old * df);
        dx_old = dx;
        double next;
        if (newton_ok) {
            next = newton;
        } else {
            next = 0.5 * (lo + hi);
        }
        dx = next - x;
        const double width_tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
        if (next == x || std::abs(hi - lo) <= width_tol) {
            // bracket collapsed: return the endpoint with the smaller residual
            const double cand[3] = {x, lo, hi};
            double best = x;
            for (double c : cand)
                if (std::abs(f(c)) < std::abs(f(best))) best = c;
            return best;
        }
        x = next;
    }
    throw NumericalFailure("root polishing did not converge in 200 iterations");
}

// Distinct roots of f in the open interval (lo, hi), given the critical
// points of f. Returns (root, multiplicity) pairs in increasing order.
std::vector<std::pair<double, int>> roots_in_interval(const Poly& f, std::vector<double> crit, double lo,
                                                      double hi) {
    std::vector<double> pts{lo};
    std::vector<bool> is_crit{false};
    std::sort(crit.begin(), crit.end());
    for (double c : crit) {
        if (c > lo && c < hi) {
            pts.push_back(c);
            is_crit.push_back(true);
        }
    }
    pts.push_back(hi);
    is_crit.push_back(false);

    std::vector<int> signs(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double v = f(pts[i]);
        signs[i] = sign_of(v);
    }
    // an endpoint root is excluded; its sign is taken just inside the interval
    if (signs.front() == 0) signs.front() = sign_of(f.derivative(lo));
    if (signs.back() == 0) signs.back() = -sign_of(f.derivative(hi));

    std::vector<std::pair<double, int>> roots;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (is_crit[i] && signs[i] == 0) roots.emplace_back(pts[i], 2);
        if (i + 1 < pts.size() && signs[i] * signs[i + 1] < 0) {
            roots.emplace_back(polish_root(f, pts[i], pts[i + 1]), 1);
        }
    }
    std::sort(roots.begin(), roots.end());

    std::vector<std::pair<double, int>> merged;
    for (const auto& r : roots) {
        if (!merged.empty() && std::abs(r.first - merged.back().first) <= kRootDedupTol) {
            merged.back().second = 2;
        } else {
            merged.push_back(r);
        }
    }
    return merged;
}

}  // namespace

std::vector<Equilibrium> trivial_equilibria(const ModelParams& p) {
    p.validate();
    std::vector<Equilibrium> out;
    auto make = [&](double x, double y, std::string_view label) {
        Equilibrium e;
        e.x = x;
        e.y = y;
        e.label = label;
        const Jacobian2 j = jacobian(p, {x, y});
        e.s = -j.trace();
        e.p_det = j.det();
        e.delta_c = e.s * e.s - 4.0 * e.p_det;
        e.taxonomy = hyperbolic_taxonomy(e.s, e.p_det, e.delta_c);
        return e;
    };

    out.push_back(make(0.0, 0.0, "E0"));
    out.push_back(make(1.0, 0.0, "E1"));
    Equilibrium e2 = make(0.0, p.k2, "E2");
    if (e2.taxonomy == Taxonomy::Unclassified) {
        // m = 0 and a k2 = k1: one zero eigenvalue
        e2.taxonomy = (1.0 - p.k1 - p.a > 0.0) ? Taxonomy::TopologicalSaddle : Taxonomy::TopologicalNode;
    }
    out.push_back(e2);
    for (auto& e : out) e.index = poincare_index(e.taxonomy);
    return out;
}

CubicCoeffs cubic_coefficients(const ModelParams& p) {
    CubicCoeffs c;
    c.alpha2 = p.a + p.k1 - 1.0 + 2.0 * p.m;
    c.alpha1 = p.m * p.m + p.m * (2.0 * p.k1 - 1.0) + p.a * p.k2 - p.k1;
    c.alpha0 = -p.k1 * p.m * (1.0 - p.m);
    return c;
}

int routh_sign_changes(const CubicCoeffs& c) {
    std::vector<double> seq{1.0, c.alpha2};
    if (c.alpha2 != 0.0) seq.push_back(c.alpha1 - c.alpha0 / c.alpha2);
    seq.push_back(c.alpha0);
    int changes = 0;
    int last = 0;
    for (double v : seq) {
        const int sg = sign_of(v);
        if (sg == 0) continue;
        if (last != 0 && sg != last) ++changes;
        last = sg;
    }
    return changes;
}

CountReport count_interior_equilibria(const ModelParams& p) {
    p.validate();
    const CubicCoeffs c = cubic_coefficients(p);
    CountReport r;
    r.routh_sign_changes = routh_sign_changes(c);
    r.tong_delta = c.tong_delta();
    if (r.tong_delta > 0.0) {
        const auto crit = c.critical_points();
        r.tong_product = c(crit[0]) * c(crit[1]);
    }

    if (p.m > 0.0) {
        const bool routh_three = c.alpha2 < 0.0 && c.alpha1 * c.alpha2 < c.alpha0;
        const bool two_extrema = r.tong_delta > 0.0;
        if (routh_three && two_extrema && *r.tong_product < 0.0) {
            r.n_predicted = 3;
            r.branch = CountBranch::MPosCaseA;
        } else if (routh_three && two_extrema && *r.tong_product == 0.0) {
            r.n_predicted = 2;
            r.branch = CountBranch::MPosCaseB;
        } else {
            r.n_predicted = 1;
            r.branch = CountBranch::MPosCaseC;
        }
        return r;
    }

    // m = 0: R(X) = X (X^2 + alpha2 X + alpha1)
    const double dq = c.alpha2 * c.alpha2 - 4.0 * c.alpha1;
    if (dq > 0.0 && c.alpha1 > 0.0 && c.alpha2 < 0.0) {
        r.n_predicted = 2;
        r.branch = CountBranch::MZeroCaseA;
    } else if ((dq > 0.0 && (c.alpha1 < 0.0 || (c.alpha1 == 0.0 && c.alpha2 < 0.0))) ||
               (dq == 0.0 && c.alpha2 < 0.0)) {
        r.n_predicted = 1;
        r.branch = CountBranch::MZeroCaseB;
    } else {
        r.n_predicted = 0;
        r.branch = CountBranch::MZeroCaseC;
    }
    return r;
}

std::vector<Equilibrium> find_interior_equilibria(const ModelParams& p) {
    p.validate();
    const CubicCoeffs c = cubic_coefficients(p);
    std::vector<std::pair<double, int>> roots;
    if (p.m > 0.0) {
        const Poly f{3, c.alpha2, c.alpha1, c.alpha0};
        roots = roots_in_interval(f, c.critical_points(), 0.0, 1.0 - p.m);
    } else {
        const Poly f{2, 0.0, c.alpha2, c.alpha1};
        roots = roots_in_interval(f, {-0.5 * c.alpha2}, 0.0, 1.0);
    }

    const double scale = std::max({1.0, std::abs(c.alpha2), std::abs(c.alpha1), std::abs(c.alpha0)});
    std::vector<Equilibrium> out;
    for (const auto& [X, mult] : roots) {
        if (mult == 1 && std::abs(c(X)) >= 1e-12 * scale) {
            std::ostringstream msg;
            msg << "root residual " << c(X) << " too large at X = " << X;
            throw NumericalFailure(msg.str());
        }
        Equilibrium e;
        e.x = p.m + X;
        e.y = p.k2 + e.x - p.m;
        e.multiplicity = mult;
        out.push_back(e);
    }
    return out;
}

Equilibrium classify(const ModelParams& p, Equilibrium e) {
    const double residual = vector_field(p, {e.x, e.y}).norm();
    if (!(residual <= 1e-9) || !(e.x > p.m) || !(e.y > 0.0)) {
        std::ostringstream msg;
        msg << "(" << e.x << ", " << e.y << ") is not an interior equilibrium (field residual " << residual << ")";
        throw NotAnEquilibrium(msg.str());
    }
    const double z = p.k1 + e.x - p.m;
    const double hx = -1.0 + 2.0 * e.x + p.a * e.y * p.k1 / (z * z);
    e.s = hx + p.b;
    e.p_det = p.b * (hx + p.a * (e.x - p.m) / z);
    e.delta_c = e.s * e.s - 4.0 * e.p_det;

    const bool s_zero = std::abs(e.s) <= kHyperbolicityTol;
    const bool p_zero = std::abs(e.p_det) <= kHyperbolicityTol || e.multiplicity == 2;
    if (!p_zero) {
        e.taxonomy = hyperbolic_taxonomy(e.s, e.p_det, e.delta_c);
        if (e.taxonomy == Taxonomy::Unclassified) e.taxonomy = Taxonomy::LinearCenter;
    } else if (!s_zero) {
        // semi-hyperbolic
        const double q = z * z * z - p.k1 * e.y * p.a + p.a * p.k1 * z;
        if (std::abs(q) > kHyperbolicityTol) {
            e.taxonomy = Taxonomy::SaddleNode;
        } else if (p.k1 > p.k2) {
            e.taxonomy = Taxonomy::UnstableNode;
        } else if (p.k1 < p.k2) {
            e.taxonomy = Taxonomy::Saddle;
        } else {
            e.taxonomy = Taxonomy::Undetermined;
        }
    } else {
        // nilpotent
        const double r = 1.0 - p.a * e.y * p.k1 / (z * z * z) + p.a * p.k1 / (z * z);
        e.taxonomy = std::abs(r) > kHyperbolicityTol ? Taxonomy::Cusp : Taxonomy::Saddle;
    }
    e.index = poincare_index(e.taxonomy);
    return e;
}

std::vector<Equilibrium> interior_equilibria(const ModelParams& p) {
    auto eqs = find_interior_equilibria(p);
    for (auto& e : eqs) e = classify(p, e);
    return eqs;
}

int expected_index_sum(const ModelParams& p) {
    if (p.m > 0.0) return 1;
    const double ak2 = p.a * p.k2;
    if (ak2 < p.k1) return 1;
    if (ak2 > p.k1) return 0;
    // a k2 = k1: E2 is a topological saddle or node
    return (1.0 - p.k1 - p.a > 0.0) ? 1 : 0;
}

IndexReport index_sum_check(const ModelParams& p, std::span<const Equilibrium> eqs) {
    IndexReport r;
    for (const auto& e : eqs) {
        if (!is_hyperbolic(e.taxonomy)) {
            std::ostringstream msg;
            msg << "non-hyperbolic equilibrium (" << to_string(e.taxonomy) << ") at x = " << e.x
                << "; index check skipped";
            throw NonHyperbolicPresent(msg.str());
        }
        r.sum += e.index;
    }
    r.expected = expected_index_sum(p);
    r.pass = r.sum == r.expected;
    return r;
}

double hopf_b0(const ModelParams& p, const Equilibrium& e) {
    const double z = p.k1 + e.x - p.m;
    return 1.0 - 2.0 * e.x - p.a * e.y * p.k1 / (z * z);
}

HopfData hopf_point(const ModelParams& p, const Equilibrium& e) {
    const double z = p.k1 + e.x - p.m;
    const double kappa = p.a * (e.x - p.m) / z;
    HopfData h;
    h.b0 = hopf_b0(p, e);
    if (!(h.b0 < kappa) || !(h.b0 > 0.0)) {
        std::ostringstream msg;
        msg << "no Hopf point: b0 = " << h.b0 << " must lie in (0, a*c) = (0, " << kappa << ")";
        throw NoHopf(msg.str());
    }

    ModelParams at = p;
    at.b = h.b0;
    const Jacobian2 j = jacobian(at, {e.x, e.y});
    h.omega = std::sqrt(j.det());

    // Real basis P with P^-1 J P = [[0, -w], [w, 0]]: columns Im v, Re v of
    // the eigenvector v = (j12, i w - j11).
    const double p00 = 0.0, p01 = j.j12, p10 = h.omega, p11 = -j.j11;
    const double det_p = p00 * p11 - p01 * p10;
    const double q00 = p11 / det_p, q01 = -p01 / det_p, q10 = -p10 / det_p, q11 = p00 / det_p;

    const Taylor3 x = Taylor3::linear(e.x, p00, p01);
    const Taylor3 y = Taylor3::linear(e.y, p10, p11);
    Taylor3 dx, dy;
    field_above_refuge(at, x, y, dx, dy);
    const Taylor3 f = Taylor3(q00) * dx + Taylor3(q01) * dy;
    const Taylor3 g = Taylor3(q10) * dx + Taylor3(q11) * dy;

    const double fuuu = f.derivative(3, 0), fuvv = f.derivative(1, 2);
    const double guuv = g.derivative(2, 1), gvvv = g.derivative(0, 3);
    const double fuv = f.derivative(1, 1), fuu = f.derivative(2, 0), fvv = f.derivative(0, 2);
    const double guv = g.derivative(1, 1), guu = g.derivative(2, 0), gvv = g.derivative(0, 2);
    h.lambda = (fuuu + fuvv + guuv + gvvv) / 16.0 +
               (fuv * (fuu + fvv) - guv * (guu + gvv) - fuu * guu + fvv * gvv) / (16.0 * h.omega);
    h.subcritical = h.lambda > 0.0;
    return h;
}

}  // namespace lglab

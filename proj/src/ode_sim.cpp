#include "lglab/ode_sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "lglab/errors.hpp"

namespace lglab {

std::string_view to_string(OdeScheme s) { return s == OdeScheme::Euler ? "euler" : "rk4"; }

OdeScheme parse_ode_scheme(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "euler") return OdeScheme::Euler;
    if (lower == "rk4") return OdeScheme::RK4;
    throw std::invalid_argument("unknown ODE scheme '" + std::string(name) + "' (expected euler or rk4)");
}

std::size_t step_count(double h, double t_max) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step h must be positive");
    if (!(t_max >= h) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be >= h");
    return static_cast<std::size_t>(std::llround(t_max / h));
}

namespace {

double guard(double v, std::size_t step, const char* name) {
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "non-finite " << name << " at step " << step;
        throw NonFinite(msg.str());
    }
    if (v < 0.0) {
        if (v >= -kUndershootTol) return 0.0;
        std::ostringstream msg;
        msg << name << " = " << v << " left the quadrant at step " << step << "; reduce h";
        throw StepTooLarge(msg.str(), step);
    }
    return v;
}

State rk4_step(const ModelParams& p, State s, double h) {
    const Velocity k1 = vector_field(p, s);
    const Velocity k2 = vector_field(p, {s.x + 0.5 * h * k1.dx, s.y + 0.5 * h * k1.dy});
    const Velocity k3 = vector_field(p, {s.x + 0.5 * h * k2.dx, s.y + 0.5 * h * k2.dy});
    const Velocity k4 = vector_field(p, {s.x + h * k3.dx, s.y + h * k3.dy});
    return {s.x + h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
            s.y + h / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy)};
}

}  // namespace

State ode_step(const ModelParams& p, State s, OdeScheme scheme, double h, std::size_t step_index) {
    State next;
    if (scheme == OdeScheme::Euler) {
        const Velocity v = vector_field(p, s);
        next = {s.x + v.dx * h, s.y + v.dy * h};
    } else {
        next = rk4_step(p, s, h);
    }
    next.x = guard(next.x, step_index, "x");
    next.y = guard(next.y, step_index, "y");
    return next;
}

Trajectory integrate(const ModelParams& p, State init, OdeScheme scheme, double h, double t_max) {
    p.validate();
    if (!init.in_quadrant()) throw std::invalid_argument("initial state must lie in the quadrant");
    const std::size_t n = step_count(h, t_max);
    Trajectory traj;
    traj.scheme = scheme;
    traj.h = h;
    traj.times.reserve(n + 1);
    traj.states.reserve(n + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(init);
    State s = init;
    for (std::size_t k = 1; k <= n; ++k) {
        s = ode_step(p, s, scheme, h, k);
        traj.times.push_back(static_cast<double>(k) * h);
        traj.states.push_back(s);
    }
    return traj;
}

namespace {

struct Extent {
    double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;

    void add(State s) {
        x_lo = std::min(x_lo, s.x);
        x_hi = std::max(x_hi, s.x);
        y_lo = std::min(y_lo, s.y);
        y_hi = std::max(y_hi, s.y);
    }
    double dx() const { return x_hi - x_lo; }
    double dy() const { return y_hi - y_lo; }
};

constexpr int kReturnsRequired = 5;
constexpr double kPeriodAgreement = 0.01;
constexpr double kMinAmplitude = 1e-4;
// Return differences below this floor count as converged.
constexpr double kReturnFloor = 1e-8;

// Section crossing inside one step: cubic Hermite interpolant through both
// endpoints and their field values, root of the section function by
// bisection. Linear interpolation leaves O(h^2) jitter in the return points,
// enough to swamp the contraction of slowly converging orbits.
std::pair<double, State> locate_crossing(const ModelParams& p, State a, State b, double h) {
    const Velocity fa = vector_field(p, a), fb = vector_field(p, b);
    auto at = [&](double th) {
        const double t2 = th * th, t3 = t2 * th;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + th, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return State{h00 * a.x + h10 * h * fa.dx + h01 * b.x + h11 * h * fb.dx,
                     h00 * a.y + h10 * h * fa.dy + h01 * b.y + h11 * h * fb.dy};
    };
    auto g = [&](State s) { return s.y - (p.k2 + s.x - p.m); };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(at(mid)) > 0.0 ? lo : hi) = mid;
    }
    const double th = 0.5 * (lo + hi);
    return {th, at(th)};
}

bool agree_within(const std::vector<double>& v, double rel) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    return std::all_of(v.begin(), v.end(), [&](double e) { return std::abs(e - mean) <= rel * std::abs(mean); });
}

// Least-squares slope of ys against 0, 1, 2, ...
double fit_slope(const std::vector<double>& ys) {
    const double n = static_cast<double>(ys.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += ys[i];
        sxx += x * x;
        sxy += x * ys[i];
    }
    const double den = n * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace

CycleReport detect_limit_cycle(const ModelParams& p, State init, double h, double t_burn, double t_max) {
    p.validate();
    if (!(t_burn >= 0.0) || !(t_burn < t_max)) throw std::invalid_argument("need 0 <= t_burn < t_max");
    const std::size_t n = step_count(h, t_max);
    auto section = [&](State s) { return s.y - (p.k2 + s.x - p.m); };

    CycleReport report;
    std::vector<Extent> segments;  // extents between successive crossings
    Extent current;
    Extent whole;
    State s = init;
    double g = section(s);
    for (std::size_t k = 1; k <= n; ++k) {
        const State next = ode_step(p, s, OdeScheme::RK4, h, k);
        const double g_next = section(next);
        const double t = static_cast<double>(k - 1) * h;
        if (t >= t_burn) {
            whole.add(next);
            current.add(next);
            if (g > 0.0 && g_next <= 0.0 && next.x > s.x) {
                const auto [theta, c] = locate_crossing(p, s, next, h);
                report.crossings.push_back({t + theta * h, c.x, c.y});
                if (report.crossings.size() >= 2) segments.push_back(current);
                current = Extent{};
                current.add(next);
            }
        }
        s = next;
        g = g_next;
    }

    const Extent& last = segments.empty() ? whole : segments.back();
    report.amplitude_x = last.dx();
    report.amplitude_y = last.dy();
    if (std::max(report.amplitude_x, report.amplitude_y) <= kMinAmplitude) {
        report.found = false;
        report.stable = true;  // settled on an attractor of zero amplitude
        return report;
    }
    const std::size_t returns = report.crossings.size() > 0 ? report.crossings.size() - 1 : 0;
    if (returns < static_cast<std::size_t>(kReturnsRequired)) {
        std::ostringstream msg;
        msg << "only " << returns << " section returns after t_burn = " << t_burn << "; extend t_max";
        throw Inconclusive(msg.str());
    }

    const auto& cr = report.crossings;
    std::vector<double> periods, amplitudes;
    for (std::size_t i = cr.size() - kReturnsRequired; i < cr.size(); ++i) periods.push_back(cr[i].t - cr[i - 1].t);
    for (std::size_t i = segments.size() - kReturnsRequired; i < segments.size(); ++i)
        amplitudes.push_back(segments[i].dx());
    report.period = std::accumulate(periods.begin(), periods.end(), 0.0) / static_cast<double>(periods.size());

    // contraction of successive return points over the tail
    const std::size_t tail = std::min<std::size_t>(cr.size(), 12);
    std::vector<double> log_diffs;
    for (std::size_t i = cr.size() - tail + 1; i < cr.size(); ++i) {
        const double d = std::abs(cr[i].x - cr[i - 1].x);
        if (d > kReturnFloor) log_diffs.push_back(std::log(d));
    }
    if (log_diffs.size() < 3) {
        report.contraction_slope = -INFINITY;  // returns already converged
        report.stable = true;
    } else {
        report.contraction_slope = fit_slope(log_diffs);
        report.stable = report.contraction_slope < 0.0;
    }

    report.found = agree_within(periods, kPeriodAgreement) && agree_within(amplitudes, kPeriodAgreement);
    return report;
}

LongRunBounds long_run_bounds(const Trajectory& traj, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw std::invalid_argument("tail_fraction must be in (0, 1]");
    const std::size_t n = traj.states.size();
    const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
    if (tail < 1000 || tail > n) {
        std::ostringstream msg;
        msg << "trajectory tail has " << tail << " points; need at least 1000";
        throw TooShort(msg.str());
    }
    LongRunBounds b{INFINITY, -INFINITY, INFINITY, -INFINITY};
    for (std::size_t i = n - tail; i < n; ++i) {
        const State s = traj.states[i];
        b.liminf_x = std::min(b.liminf_x, s.x);
        b.limsup_x = std::max(b.limsup_x, s.x);
        b.liminf_y = std::min(b.liminf_y, s.y);
        b.limsup_y = std::max(b.limsup_y, s.y);
    }
    return b;
}

}  // namespace lglab

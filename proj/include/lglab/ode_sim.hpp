#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "lglab/model.hpp"

namespace lglab {

enum class OdeScheme { Euler, RK4 };

std::string_view to_string(OdeScheme s);
/// Accepts "euler" / "rk4" (case-insensitive). Throws std::invalid_argument.
OdeScheme parse_ode_scheme(std::string_view name);

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    OdeScheme scheme = OdeScheme::RK4;
    double h = 0.0;
};

struct Crossing {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
};

struct CycleReport {
    bool found = false;
    double period = 0.0;
    double amplitude_x = 0.0;  ///< peak-to-peak over the last complete return
    double amplitude_y = 0.0;
    std::vector<Crossing> crossings;
    bool stable = false;
    double contraction_slope = 0.0;  ///< slope of log|successive return differences|
};

struct LongRunBounds {
    double liminf_x = 0.0;
    double limsup_x = 0.0;
    double liminf_y = 0.0;
    double limsup_y = 0.0;
};

/// Undershoot below zero that is treated as rounding and clamped.
inline constexpr double kUndershootTol = 1e-12;

/// Number of steps of size h covering t_max.
std::size_t step_count(double h, double t_max);

/// One step of the chosen scheme from s. Throws StepTooLarge / NonFinite,
/// tagged with step_index.
State ode_step(const ModelParams& p, State s, OdeScheme scheme, double h, std::size_t step_index = 0);

Trajectory integrate(const ModelParams& p, State init, OdeScheme scheme, double h, double t_max);

/// RK4 integration with a return map on the predator isocline y = k2 + x - m,
/// crossed with x increasing. Throws Inconclusive when the orbit is still
/// oscillating but returned fewer than 5 times after t_burn.
CycleReport detect_limit_cycle(const ModelParams& p, State init, double h, double t_burn, double t_max);

/// Min/max of each coordinate over the final tail_fraction of traj.
/// Throws TooShort when the tail holds fewer than 1000 points.
LongRunBounds long_run_bounds(const Trajectory& traj, double tail_fraction);

}  // namespace lglab

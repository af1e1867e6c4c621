#pragma once

// Modified Leslie-Gower / Holling type II prey-predator field with a
// constant-density prey refuge.
//
//   x' = x(1-x) - a y (x-m)+ / (k1 + (x-m)+)
//   y' = b y (1 - y / (k2 + (x-m)+))
//
// plus the multiplicative-noise SDE built on it.

#include <algorithm>
#include <cmath>

namespace lglab {

/// Dimensional parameters of the raw model.
struct RawParams {
    double rho1 = 1.0;
    double rho2 = 1.0;
    double beta = 1.0;
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double kappa1 = 1.0;
    double kappa2 = 1.0;
    double mu = 0.0;  ///< refuge density, 0 <= mu < rho1/beta

    void validate() const;

    bool operator==(const RawParams&) const = default;
};

/// Dimensionless parameters. sigma1 = sigma2 = 0 is the deterministic system.
struct ModelParams {
    double a = 0.4;
    double b = 0.1;
    double k1 = 0.08;
    double k2 = 0.2;
    double m = 0.0025;
    double sigma1 = 0.0;
    double sigma2 = 0.0;

    /// Throws InvalidParams unless a, b, k1, k2 > 0, 0 <= m < 1, sigmas >= 0.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

struct State {
    double x = 0.0;
    double y = 0.0;

    bool in_quadrant() const { return x >= 0.0 && y >= 0.0; }
    bool operator==(const State&) const = default;
};

struct Velocity {
    double dx = 0.0;
    double dy = 0.0;

    double norm() const { return std::hypot(dx, dy); }
};

struct Jacobian2 {
    double j11 = 0.0;
    double j12 = 0.0;
    double j21 = 0.0;
    double j22 = 0.0;

    double trace() const { return j11 + j22; }
    double det() const { return j11 * j22 - j12 * j21; }
};

struct SdeCoefficients {
    Velocity drift;
    Velocity diffusion;
};

/// Rescales the raw model to the dimensionless one. Throws InvalidParams.
ModelParams nondimensionalize(const RawParams& raw, double sigma1 = 0.0, double sigma2 = 0.0);

inline double refuge_excess(const ModelParams& p, double x) { return std::max(0.0, x - p.m); }

inline Velocity vector_field(const ModelParams& p, State s) {
    const double xp = refuge_excess(p, s.x);
    return {s.x * (1.0 - s.x) - p.a * s.y * xp / (p.k1 + xp),
            p.b * s.y * (1.0 - s.y / (p.k2 + xp))};
}

/// Throws KinkPoint when m > 0 and x == m.
Jacobian2 jacobian(const ModelParams& p, State s);

SdeCoefficients sde_coefficients(const ModelParams& p, State s);

/// Right-hand side of the raw (dimensional) model, in (xi, upsilon).
Velocity raw_vector_field(const RawParams& raw, State s);

/// The field for x > m written over a generic scalar, so that truncated
/// Taylor arithmetic can differentiate it exactly.
template <class T>
void field_above_refuge(const ModelParams& p, const T& x, const T& y, T& dx, T& dy) {
    const T xp = x - p.m;
    dx = x * (1.0 - x) - p.a * y * xp / (p.k1 + xp);
    dy = p.b * y * (1.0 - y / (p.k2 + xp));
}

}  // namespace lglab

#pragma once

// Closed-form certificates for the qualitative results on the deterministic
// and stochastic systems. Every certificate is a pure function of the
// parameters; the simulation suites check them against trajectories.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lglab/model.hpp"

namespace lglab {

/// The invariant attracting rectangle [m, 1] x [k2, L), L = 1 + k2 - m.
struct Region {
    double x_lo = 0.0;
    double x_hi = 1.0;
    double y_lo = 0.0;
    double y_hi = 1.0;

    /// Membership with slack tol on every side (the upper y bound is open).
    bool contains(State s, double tol = 0.0) const {
        return s.x >= x_lo - tol && s.x <= x_hi + tol && s.y >= y_lo - tol && s.y < y_hi + tol;
    }
};

enum class PersistenceRegime { UniformlyPersistent, WeaklyPersistent, PreyExtinction, Undetermined };

std::string_view to_string(PersistenceRegime r);

struct PersistenceReport {
    PersistenceRegime regime = PersistenceRegime::Undetermined;
    std::optional<double> liminf_x_bound;
    std::optional<double> limsup_x_bound;
    std::string branch;
};

struct RegimeCertificate {
    bool holds = false;
    std::string clause;
    std::vector<std::pair<std::string, double>> witness;
};

enum class StochasticRegime {
    Deterministic,
    FullExtinction,
    PreyExtinctionPredatorStationary,
    Stationary,
    Undetermined,
};

std::string_view to_string(StochasticRegime r);

Region invariant_region(const ModelParams& p);

PersistenceReport persistence_report(const ModelParams& p);

RegimeCertificate global_stability_condition(const ModelParams& p);

/// Clauses "m0_zero_or_two_equilibria", "m0_b_plus_k1", "dulac",
/// "global_stability" (each certifies absence of cycles when it holds) and
/// "m0_cycle_exists" (certifies at least one limit cycle when it holds).
std::vector<RegimeCertificate> no_cycle_conditions(const ModelParams& p);

StochasticRegime stochastic_regime_label(const ModelParams& p);

/// clause carries the regime label; holds is false only for Undetermined.
RegimeCertificate stochastic_regime(const ModelParams& p);

}  // namespace lglab

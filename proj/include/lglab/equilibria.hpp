#pragma once

// Counting, locating and classifying equilibria.
//
// Interior equilibria sit on the predator isocline y = k2 + x - m, at the
// positive roots X = x - m of the cubic
//
//   R(X) = X^3 + alpha2 X^2 + alpha1 X + alpha0.
//
// The count follows the Routh sign sequence plus the Tong criterion (m > 0)
// or the quadratic discriminant (m = 0). Location is done independently by
// bracketing between the critical points of R and polishing each root.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lglab/model.hpp"

namespace lglab {

/// Absolute tolerance on s and p below which an equilibrium is treated as
/// non-hyperbolic.
inline constexpr double kHyperbolicityTol = 1e-9;

/// Roots closer than this are merged into a double root.
inline constexpr double kRootDedupTol = 1e-10;

enum class Taxonomy {
    Unclassified,
    Saddle,
    StableNode,
    UnstableNode,
    StableFocus,
    UnstableFocus,
    StableDegenerateNode,
    UnstableDegenerateNode,
    LinearCenter,
    SaddleNode,
    Cusp,
    TopologicalSaddle,
    TopologicalNode,
    Undetermined,
};

std::string_view to_string(Taxonomy t);
/// Poincare index of an isolated equilibrium of this type.
int poincare_index(Taxonomy t);
bool is_hyperbolic(Taxonomy t);

struct CubicCoeffs {
    double alpha2 = 0.0;
    double alpha1 = 0.0;
    double alpha0 = 0.0;

    double operator()(double X) const { return ((X + alpha2) * X + alpha1) * X + alpha0; }
    double derivative(double X) const { return (3.0 * X + 2.0 * alpha2) * X + alpha1; }
    /// alpha2^2 - 3 alpha1, a quarter of the discriminant of R'.
    double tong_delta() const { return alpha2 * alpha2 - 3.0 * alpha1; }
    /// Real roots of R' in increasing order (both present iff tong_delta() > 0,
    /// one double critical point iff tong_delta() == 0).
    std::vector<double> critical_points() const;
};

enum class CountBranch {
    MPosCaseA,  ///< m > 0, three distinct roots
    MPosCaseB,  ///< m > 0, Tong product exactly 0: two distinct roots
    MPosCaseC,  ///< m > 0, one root
    MZeroCaseA,
    MZeroCaseB,
    MZeroCaseC,
};

std::string_view to_string(CountBranch b);

struct CountReport {
    int n_predicted = 0;
    int routh_sign_changes = 0;
    double tong_delta = 0.0;
    std::optional<double> tong_product;
    CountBranch branch = CountBranch::MPosCaseC;
};

struct Equilibrium {
    double x = 0.0;
    double y = 0.0;
    double s = 0.0;       ///< minus the trace of the Jacobian
    double p_det = 0.0;   ///< determinant of the Jacobian
    double delta_c = 0.0; ///< s^2 - 4p
    Taxonomy taxonomy = Taxonomy::Unclassified;
    int index = 0;
    int multiplicity = 1;
    std::string_view label;  ///< "E0", "E1", "E2" for trivial points, empty otherwise
};

struct IndexReport {
    int sum = 0;
    int expected = 0;
    bool pass = false;
};

struct HopfData {
    double b0 = 0.0;
    double omega = 0.0;   ///< sqrt(p) at b = b0
    double lambda = 0.0;  ///< first Lyapunov coefficient
    bool subcritical = false;
};

/// E0, E1, E2 with their classification.
std::vector<Equilibrium> trivial_equilibria(const ModelParams& p);

CubicCoeffs cubic_coefficients(const ModelParams& p);

/// Sign changes of (1, alpha2, alpha1 - alpha0/alpha2, alpha0), zero terms skipped.
int routh_sign_changes(const CubicCoeffs& c);

CountReport count_interior_equilibria(const ModelParams& p);

/// Interior equilibria sorted by x, not yet classified.
/// Throws NumericalFailure if a root fails to converge.
std::vector<Equilibrium> find_interior_equilibria(const ModelParams& p);

/// Fills s, p_det, delta_c, taxonomy and index. Throws NotAnEquilibrium.
Equilibrium classify(const ModelParams& p, Equilibrium e);

/// find_interior_equilibria followed by classify.
std::vector<Equilibrium> interior_equilibria(const ModelParams& p);

/// Expected Poincare index sum of the interior equilibria.
int expected_index_sum(const ModelParams& p);

/// Throws NonHyperbolicPresent if any equilibrium is not hyperbolic.
IndexReport index_sum_check(const ModelParams& p, std::span<const Equilibrium> eqs);

/// Value of b at which s vanishes for this equilibrium.
double hopf_b0(const ModelParams& p, const Equilibrium& e);

/// Throws NoHopf if the linearization at b = b0 is not a center.
HopfData hopf_point(const ModelParams& p, const Equilibrium& e);

}  // namespace lglab

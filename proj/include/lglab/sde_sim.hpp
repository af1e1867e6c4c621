#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "lglab/model.hpp"
#include "lglab/qualitative.hpp"

namespace lglab {

enum class SdeScheme { Milstein, LogEuler };

std::string_view to_string(SdeScheme s);
/// Accepts "milstein" / "log-euler" (also "logeuler"). Throws std::invalid_argument.
SdeScheme parse_sde_scheme(std::string_view name);

/// Standard normal draws for one noise component. Component streams of the
/// same seed are independent (the component index is mixed into the seed).
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, unsigned component);
    double next() { return normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

struct NoisePath {
    std::uint64_t seed = 0;
    double h = 0.0;
    std::vector<double> xi1;  ///< drives w1 (prey)
    std::vector<double> xi2;  ///< drives w2 (predator)

    std::size_t steps() const { return xi1.size(); }

    static NoisePath generate(std::uint64_t seed, double h, std::size_t steps);
    /// Same Brownian path on a grid `factor` times coarser.
    NoisePath coarsen(std::size_t factor) const;
};

struct SdeOptions {
    SdeScheme scheme = SdeScheme::Milstein;
    /// Drive both components with xi2, as in the verbatim discretized display.
    bool shared_noise = false;
};

struct SamplePath {
    std::vector<double> times;
    std::vector<State> states;
    SdeScheme scheme = SdeScheme::Milstein;
    std::uint64_t seed = 0;
    double h = 0.0;
};

/// One scheme step. Throws PositivityViolation (Milstein) or NonFinite.
State sde_step(const ModelParams& p, State s, const SdeOptions& opt, double h, double xi1, double xi2,
               std::size_t step_index = 0);

/// Integrates over the first round(t_max / noise.h) increments of noise.
SamplePath simulate_path(const ModelParams& p, State init, const SdeOptions& opt, const NoisePath& noise,
                         double t_max);

/// Closed-form stochastic logistic solution with trapezoidal quadrature of
/// the denominator integral.
std::vector<double> explicit_upper_prey(double sigma1, double x0, const NoisePath& noise, double t_max);

struct ComparisonBundle {
    SamplePath path;
    std::vector<double> x_upper;
    std::vector<double> y_upper;
    std::vector<double> x_lower;  ///< absorbed at 0
    std::vector<double> y_lower;
    double max_violation = 0.0;  ///< largest breach of the four orderings
};

inline constexpr double kComparisonSlack = 1e-9;

/// Throws NumericalFailure when an ordering is breached by more than slack.
ComparisonBundle comparison_bundle(const ModelParams& p, State init, const NoisePath& noise, double t_max,
                                   const SdeOptions& opt = {}, double slack = kComparisonSlack);

/// Bins over [0, hi]^2 plus one overflow counter.
struct Histogram2D {
    std::size_t bins = 50;
    double hi = 1.5;
    std::vector<double> counts;  ///< row-major, x index first
    double overflow = 0.0;

    explicit Histogram2D(std::size_t bins = 50, double hi = 1.5);
    void add(State s, double weight = 1.0);
    double total() const;
    double at(std::size_t ix, std::size_t iy) const { return counts[ix * bins + iy]; }
    /// Sum over cells (and overflow) of |p - q| between normalized histograms.
    static double l1_distance(const Histogram2D& a, const Histogram2D& b);
};

struct Checkpoint {
    double t = 0.0;
    double mean[2] = {0.0, 0.0};
    double var[2] = {0.0, 0.0};  ///< population variance over paths
};

inline constexpr double kExtinctionThreshold = 1e-3;

struct EnsembleStats {
    std::size_t n_paths = 0;
    std::vector<Checkpoint> checkpoints;
    double extinction_fraction_x = 0.0;
    double extinction_fraction_y = 0.0;
    Histogram2D histogram;  ///< final states of every path
};

struct EnsembleConfig {
    std::size_t n_paths = 100;
    std::uint64_t seed0 = 0;
    double h = 1e-3;
    double t_max = 100.0;
    std::vector<double> checkpoints;  ///< t_max is always appended
    std::size_t bins = 50;
    SdeOptions options{};
};

/// Worker count: hardware concurrency capped by LG_LAB_THREADS and n_paths.
std::size_t ensemble_threads(std::size_t n_paths);

/// Path i uses seed0 + i. Results are reduced in path order, so they do not
/// depend on the thread count.
EnsembleStats ensemble(const ModelParams& p, State init, const EnsembleConfig& cfg);

struct StationaryResult {
    Histogram2D histogram;
    double l1_half = 0.0;   ///< first vs second half of the post-burn-in samples
    double l1_cross = 0.0;  ///< seed vs seed + 1
    StochasticRegime regime = StochasticRegime::Undetermined;
    bool regime_warning = false;
    std::size_t samples = 0;
};

struct StationaryConfig {
    std::uint64_t seed = 0;
    double h = 0.01;
    double burn_in = 100.0;
    double t_max = 2100.0;
    std::size_t bins = 50;
    State init{0.55, 0.6};
    SdeOptions options{SdeScheme::LogEuler, false};
};

StationaryResult stationary_histogram(const ModelParams& p, const StationaryConfig& cfg);

struct HittingStats {
    std::vector<double> times;  ///< per path, t_cap when censored
    double mean = 0.0;
    double median = 0.0;
    double q10 = 0.0;
    double q90 = 0.0;
    double censored_fraction = 0.0;
};

struct HittingConfig {
    std::size_t n_paths = 100;
    std::uint64_t seed0 = 0;
    double h = 1e-2;
    double t_cap = 500.0;
    SdeOptions options{SdeScheme::LogEuler, false};
};

HittingStats hitting_time(const ModelParams& p, State init, const Region& target, const HittingConfig& cfg);

}  // namespace lglab

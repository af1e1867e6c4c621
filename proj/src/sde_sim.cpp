#include "lglab/sde_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "lglab/errors.hpp"
#include "lglab/ode_sim.hpp"

namespace lglab {

std::string_view to_string(SdeScheme s) { return s == SdeScheme::Milstein ? "milstein" : "log-euler"; }

SdeScheme parse_sde_scheme(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "milstein") return SdeScheme::Milstein;
    if (lower == "log-euler" || lower == "logeuler" || lower == "log_euler") return SdeScheme::LogEuler;
    throw std::invalid_argument("unknown SDE scheme '" + std::string(name) + "' (expected milstein or log-euler)");
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Compensated (Neumaier) summation.
struct Sum {
    double s = 0.0, c = 0.0;

    void add(double v) {
        const double t = s + v;
        if (std::abs(s) >= std::abs(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

}  // namespace

NoiseStream::NoiseStream(std::uint64_t seed, unsigned component)
    : engine_(splitmix64(splitmix64(seed) ^ (0xd1b54a32d192ed03ULL * (component + 1ULL)))) {}

NoisePath NoisePath::generate(std::uint64_t seed, double h, std::size_t steps) {
    if (!(h > 0.0)) throw std::invalid_argument("noise step h must be positive");
    NoisePath np;
    np.seed = seed;
    np.h = h;
    np.xi1.resize(steps);
    np.xi2.resize(steps);
    NoiseStream s1(seed, 0), s2(seed, 1);
    for (auto& v : np.xi1) v = s1.next();
    for (auto& v : np.xi2) v = s2.next();
    return np;
}

NoisePath NoisePath::coarsen(std::size_t factor) const {
    if (factor == 0 || steps() % factor != 0)
        throw std::invalid_argument("coarsening factor must divide the number of steps");
    NoisePath out;
    out.seed = seed;
    out.h = h * static_cast<double>(factor);
    const double scale = 1.0 / std::sqrt(static_cast<double>(factor));
    for (std::size_t i = 0; i < steps(); i += factor) {
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t j = i; j < i + factor; ++j) {
            s1 += xi1[j];
            s2 += xi2[j];
        }
        out.xi1.push_back(s1 * scale);
        out.xi2.push_back(s2 * scale);
    }
    return out;
}

namespace {

std::string step_message(const char* what, const char* name, double v, std::size_t step) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": " << name << " = " << v << " at step " << step;
    return msg.str();
}

double milstein(double v, double drift, double sigma, double sqh, double xi, double h) {
    return v + drift * h + sigma * v * sqh * xi + 0.5 * sigma * sigma * v * (h * xi * xi - h);
}

double log_euler(double v, double rate, double sigma, double sqh, double xi, double h) {
    return v * std::exp((rate - 0.5 * sigma * sigma) * h + sigma * sqh * xi);
}

void check_positive(double before, double after, const char* name, std::size_t step) {
    if (!std::isfinite(after)) throw NonFinite(step_message("non-finite state", name, after, step));
    if (before > 0.0 && after <= 0.0)
        throw PositivityViolation(
            step_message("Milstein step left the open quadrant (use --scheme log-euler or a smaller h)", name, after,
                         step),
            step);
}

}  // namespace

State sde_step(const ModelParams& p, State s, const SdeOptions& opt, double h, double xi1, double xi2,
               std::size_t step_index) {
    const double sqh = std::sqrt(h);
    const double zx = opt.shared_noise ? xi2 : xi1;
    State next;
    if (opt.scheme == SdeScheme::Milstein) {
        const Velocity v = vector_field(p, s);
        next = {milstein(s.x, v.dx, p.sigma1, sqh, zx, h), milstein(s.y, v.dy, p.sigma2, sqh, xi2, h)};
        check_positive(s.x, next.x, "x", step_index);
        check_positive(s.y, next.y, "y", step_index);
    } else {
        const double xp = refuge_excess(p, s.x);
        const double rate_x = (1.0 - s.x) - (s.x > 0.0 ? p.a * s.y * xp / ((p.k1 + xp) * s.x) : 0.0);
        const double rate_y = p.b * (1.0 - s.y / (p.k2 + xp));
        next.x = s.x > 0.0 ? log_euler(s.x, rate_x, p.sigma1, sqh, zx, h) : 0.0;
        next.y = s.y > 0.0 ? log_euler(s.y, rate_y, p.sigma2, sqh, xi2, h) : 0.0;
        if (!std::isfinite(next.x)) throw NonFinite(step_message("non-finite state", "x", next.x, step_index));
        if (!std::isfinite(next.y)) throw NonFinite(step_message("non-finite state", "y", next.y, step_index));
    }
    return next;
}

namespace {

std::size_t steps_within(const NoisePath& noise, double t_max) {
    const std::size_t n = step_count(noise.h, t_max);
    if (n > noise.steps()) throw std::invalid_argument("noise path is shorter than t_max");
    return n;
}

// Runs a path straight from the seeded streams, calling visit(k, state) at
// every grid index; visit returns false to stop early. Bit-identical to
// simulate_path on NoisePath::generate(seed, h, n).
template <class Visit>
void stream_path(const ModelParams& p, State init, const SdeOptions& opt, std::uint64_t seed, double h,
                 std::size_t n, Visit&& visit) {
    NoiseStream s1(seed, 0), s2(seed, 1);
    State s = init;
    if (!visit(0, s)) return;
    for (std::size_t k = 1; k <= n; ++k) {
        const double xi1 = s1.next();
        const double xi2 = s2.next();
        s = sde_step(p, s, opt, h, xi1, xi2, k);
        if (!visit(k, s)) return;
    }
}

// Runs body(i) for i in [0, n) on the ensemble worker pool. The error of the
// lowest failing index is rethrown, prefixed with that index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = ensemble_threads(n);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        const std::string prefix = "path " + std::to_string(i) + ": ";
        try {
            std::rethrow_exception(errors[i]);
        } catch (const PositivityViolation& e) {
            throw PositivityViolation(prefix + e.what(), e.step());
        } catch (const NonFinite& e) {
            throw NonFinite(prefix + e.what());
        }
    }
}

void validate_init(State init) {
    if (!init.in_quadrant() || !std::isfinite(init.x) || !std::isfinite(init.y))
        throw std::invalid_argument("initial state must lie in the closed quadrant");
}

}  // namespace

SamplePath simulate_path(const ModelParams& p, State init, const SdeOptions& opt, const NoisePath& noise,
                         double t_max) {
    p.validate();
    validate_init(init);
    const std::size_t n = steps_within(noise, t_max);
    SamplePath path;
    path.scheme = opt.scheme;
    path.seed = noise.seed;
    path.h = noise.h;
    path.times.reserve(n + 1);
    path.states.reserve(n + 1);
    path.times.push_back(0.0);
    path.states.push_back(init);
    State s = init;
    for (std::size_t k = 1; k <= n; ++k) {
        s = sde_step(p, s, opt, noise.h, noise.xi1[k - 1], noise.xi2[k - 1], k);
        path.times.push_back(static_cast<double>(k) * noise.h);
        path.states.push_back(s);
    }
    return path;
}

namespace {

// 1/z(t) = e^{-G(t)} (1/z0 + int_0^t w(s) e^{G(s)} ds), G(t) = (r - sigma^2/2) t + sigma W(t),
// with the integral by the trapezoidal rule on the noise grid. weight(k) = w(t_k).
std::vector<double> explicit_logistic(double r, double sigma, double z0, const std::vector<double>& xi, double h,
                                      std::size_t n, const std::function<double(std::size_t)>& weight) {
    const double sqh = std::sqrt(h);
    std::vector<double> z(n + 1);
    double inv = 1.0 / z0;
    z[0] = z0;
    for (std::size_t k = 0; k < n; ++k) {
        const double decay = std::exp(-((r - 0.5 * sigma * sigma) * h + sigma * sqh * xi[k]));
        inv = decay * (inv + 0.5 * h * weight(k)) + 0.5 * h * weight(k + 1);
        z[k + 1] = 1.0 / inv;
    }
    return z;
}

}  // namespace

std::vector<double> explicit_upper_prey(double sigma1, double x0, const NoisePath& noise, double t_max) {
    if (!(x0 > 0.0)) throw std::invalid_argument("x0 must be positive");
    const std::size_t n = steps_within(noise, t_max);
    return explicit_logistic(1.0, sigma1, x0, noise.xi1, noise.h, n, [](std::size_t) { return 1.0; });
}

ComparisonBundle comparison_bundle(const ModelParams& p, State init, const NoisePath& noise, double t_max,
                                   const SdeOptions& opt, double slack) {
    p.validate();
    if (!(init.x > 0.0 && init.y > 0.0)) throw std::invalid_argument("comparison processes need x0, y0 > 0");
    const std::size_t n = steps_within(noise, t_max);
    const double h = noise.h;
    const double sqh = std::sqrt(h);
    const std::vector<double>& w1 = opt.shared_noise ? noise.xi2 : noise.xi1;

    ComparisonBundle b;
    b.path = simulate_path(p, init, opt, noise, t_max);
    b.x_upper = explicit_logistic(1.0, p.sigma1, init.x, w1, h, n, [](std::size_t) { return 1.0; });
    const auto& xu = b.x_upper;
    b.y_upper = explicit_logistic(p.b, p.sigma2, init.y, noise.xi2, h, n,
                                  [&](std::size_t k) { return p.b / (p.k2 + xu[k]); });

    b.x_lower.resize(n + 1);
    b.y_lower.resize(n + 1);
    double xl = init.x, yl = init.y;
    b.x_lower[0] = xl;
    b.y_lower[0] = yl;
    for (std::size_t k = 0; k < n; ++k) {
        const double z1 = w1[k], z2 = noise.xi2[k];
        const double drift_x = xl * (1.0 - xl) - p.a * b.y_upper[k];
        const double drift_y = p.b * yl * (1.0 - yl / p.k2);
        if (opt.scheme == SdeScheme::Milstein) {
            xl = xl > 0.0 ? std::max(0.0, milstein(xl, drift_x, p.sigma1, sqh, z1, h)) : 0.0;
            const double next_y = milstein(yl, drift_y, p.sigma2, sqh, z2, h);
            check_positive(yl, next_y, "y_lower", k + 1);
            yl = next_y;
        } else {
            xl = xl > 0.0 ? log_euler(xl, drift_x / xl, p.sigma1, sqh, z1, h) : 0.0;
            yl = log_euler(yl, drift_y / yl, p.sigma2, sqh, z2, h);
        }
        b.x_lower[k + 1] = xl;
        b.y_lower[k + 1] = yl;
    }

    double worst = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const State s = b.path.states[k];
        worst = std::max({worst, b.x_lower[k] - s.x, s.x - b.x_upper[k], b.y_lower[k] - s.y, s.y - b.y_upper[k]});
    }
    b.max_violation = worst;
    if (worst > slack) {
        std::ostringstream msg;
        msg << "comparison ordering breached by " << worst << " (slack " << slack << ")";
        throw NumericalFailure(msg.str());
    }
    return b;
}

Histogram2D::Histogram2D(std::size_t bins_, double hi_) : bins(bins_), hi(hi_), counts(bins_ * bins_, 0.0) {
    if (bins_ == 0) throw std::invalid_argument("histogram needs at least one bin");
}

void Histogram2D::add(State s, double weight) {
    if (!(s.x >= 0.0 && s.x < hi && s.y >= 0.0 && s.y < hi)) {
        overflow += weight;
        return;
    }
    const double scale = static_cast<double>(bins) / hi;
    const auto ix = std::min(bins - 1, static_cast<std::size_t>(s.x * scale));
    const auto iy = std::min(bins - 1, static_cast<std::size_t>(s.y * scale));
    counts[ix * bins + iy] += weight;
}

double Histogram2D::total() const {
    Sum s;
    for (double c : counts) s.add(c);
    s.add(overflow);
    return s.value();
}

double Histogram2D::l1_distance(const Histogram2D& a, const Histogram2D& b) {
    if (a.bins != b.bins || a.hi != b.hi) throw std::invalid_argument("histogram grids differ");
    const double ta = a.total(), tb = b.total();
    if (ta <= 0.0 || tb <= 0.0) throw std::invalid_argument("empty histogram");
    Sum s;
    for (std::size_t i = 0; i < a.counts.size(); ++i) s.add(std::abs(a.counts[i] / ta - b.counts[i] / tb));
    s.add(std::abs(a.overflow / ta - b.overflow / tb));
    return s.value();
}

std::size_t ensemble_threads(std::size_t n_paths) {
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LG_LAB_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) threads = std::min(threads, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(1, std::min(threads, n_paths));
}

EnsembleStats ensemble(const ModelParams& p, State init, const EnsembleConfig& cfg) {
    p.validate();
    validate_init(init);
    if (cfg.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    const std::size_t n = step_count(cfg.h, cfg.t_max);

    std::vector<double> times = cfg.checkpoints;
    for (double t : times)
        if (!(t >= 0.0 && t <= cfg.t_max)) throw std::invalid_argument("checkpoints must lie in [0, t_max]");
    times.push_back(cfg.t_max);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    std::vector<std::size_t> index(times.size());
    for (std::size_t c = 0; c < times.size(); ++c)
        index[c] = std::min(n, static_cast<std::size_t>(std::llround(times[c] / cfg.h)));

    // per path, per checkpoint state; the last checkpoint is the final state
    std::vector<std::vector<State>> at(cfg.n_paths, std::vector<State>(times.size()));
    parallel_for(cfg.n_paths, [&](std::size_t i) {
        std::size_t c = 0;
        stream_path(p, init, cfg.options, cfg.seed0 + i, cfg.h, n, [&](std::size_t k, State s) {
            while (c < index.size() && index[c] == k) at[i][c++] = s;
            return true;
        });
    });

    EnsembleStats st;
    st.n_paths = cfg.n_paths;
    const double np = static_cast<double>(cfg.n_paths);
    for (std::size_t c = 0; c < times.size(); ++c) {
        Checkpoint cp;
        cp.t = times[c];
        Sum sx, sy;
        for (const auto& row : at) {
            sx.add(row[c].x);
            sy.add(row[c].y);
        }
        cp.mean[0] = sx.value() / np;
        cp.mean[1] = sy.value() / np;
        Sum vx, vy;
        for (const auto& row : at) {
            vx.add((row[c].x - cp.mean[0]) * (row[c].x - cp.mean[0]));
            vy.add((row[c].y - cp.mean[1]) * (row[c].y - cp.mean[1]));
        }
        cp.var[0] = vx.value() / np;
        cp.var[1] = vy.value() / np;
        st.checkpoints.push_back(cp);
    }

    st.histogram = Histogram2D(cfg.bins);
    std::size_t dead_x = 0, dead_y = 0;
    for (const auto& row : at) {
        const State s = row.back();
        dead_x += s.x < kExtinctionThreshold;
        dead_y += s.y < kExtinctionThreshold;
        st.histogram.add(s);
    }
    st.extinction_fraction_x = static_cast<double>(dead_x) / np;
    st.extinction_fraction_y = static_cast<double>(dead_y) / np;
    return st;
}

StationaryResult stationary_histogram(const ModelParams& p, const StationaryConfig& cfg) {
    p.validate();
    validate_init(cfg.init);
    if (!(cfg.burn_in >= 0.0 && cfg.burn_in < cfg.t_max)) throw std::invalid_argument("need 0 <= burn_in < t_max");
    const std::size_t n = step_count(cfg.h, cfg.t_max);
    const auto burn = static_cast<std::size_t>(std::llround(cfg.burn_in / cfg.h));
    const std::size_t samples = n - burn;
    if (samples < 2) throw TooShort("fewer than two samples after burn-in");
    const std::size_t split = burn + samples / 2;

    auto run = [&](std::uint64_t seed, Histogram2D& first, Histogram2D& second) {
        stream_path(p, cfg.init, cfg.options, seed, cfg.h, n, [&](std::size_t k, State s) {
            if (k > split)
                second.add(s);
            else if (k > burn)
                first.add(s);
            return true;
        });
    };

    std::vector<Histogram2D> h(4, Histogram2D(cfg.bins));
    parallel_for(2, [&](std::size_t i) { run(cfg.seed + i, h[2 * i], h[2 * i + 1]); });

    auto merged = [&](std::size_t i) {
        Histogram2D m = h[2 * i];
        for (std::size_t c = 0; c < m.counts.size(); ++c) m.counts[c] += h[2 * i + 1].counts[c];
        m.overflow += h[2 * i + 1].overflow;
        return m;
    };
    StationaryResult r;
    r.histogram = merged(0);
    r.l1_half = Histogram2D::l1_distance(h[0], h[1]);
    r.l1_cross = Histogram2D::l1_distance(r.histogram, merged(1));
    r.regime = stochastic_regime_label(p);
    r.regime_warning = r.regime != StochasticRegime::Stationary;
    r.samples = samples;
    return r;
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

HittingStats hitting_time(const ModelParams& p, State init, const Region& target, const HittingConfig& cfg) {
    p.validate();
    validate_init(init);
    if (cfg.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (!std::isfinite(cfg.t_cap)) throw std::invalid_argument("t_cap must be finite");
    const std::size_t n = step_count(cfg.h, cfg.t_cap);

    HittingStats st;
    st.times.assign(cfg.n_paths, cfg.t_cap);
    std::vector<char> hit(cfg.n_paths, 0);
    parallel_for(cfg.n_paths, [&](std::size_t i) {
        stream_path(p, init, cfg.options, cfg.seed0 + i, cfg.h, n, [&](std::size_t k, State s) {
            if (!target.contains(s)) return true;
            st.times[i] = static_cast<double>(k) * cfg.h;
            hit[i] = 1;
            return false;
        });
    });

    Sum total;
    for (double t : st.times) total.add(t);
    const double np = static_cast<double>(cfg.n_paths);
    st.mean = total.value() / np;
    st.censored_fraction = static_cast<double>(std::count(hit.begin(), hit.end(), 0)) / np;
    std::vector<double> sorted = st.times;
    std::sort(sorted.begin(), sorted.end());
    st.median = quantile(sorted, 0.5);
    st.q10 = quantile(sorted, 0.1);
    st.q90 = quantile(sorted, 0.9);
    return st;
}

}  // namespace lglab

#include "lglab/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "lglab/equilibria.hpp"
#include "lglab/errors.hpp"
#include "lglab/ode_sim.hpp"
#include "lglab/qualitative.hpp"
#include "lglab/sde_sim.hpp"

namespace lglab {

namespace {

class OutputError : public Error {
public:
    using Error::Error;
};

Json opt_num(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

ModelParams RunConfig::effective_params() const {
    if (!raw) return params;
    return nondimensionalize(*raw, params.sigma1, params.sigma2);
}

Json to_json(const RunConfig& c) {
    Json j;
    j["command"] = c.command;
    j["mode"] = c.mode;
    j["params"] = to_json(c.params);
    j["raw"] = c.raw ? to_json(*c.raw) : Json(nullptr);
    j["scheme"] = c.scheme;
    j["h"] = c.h;
    j["t_max"] = c.t_max;
    j["x0"] = c.x0;
    j["y0"] = c.y0;
    j["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
    j["paths"] = c.paths;
    j["bins"] = c.bins;
    j["burn_in"] = c.burn_in;
    j["checkpoints"] = c.checkpoints;
    j["detect_cycle"] = c.detect_cycle;
    j["comparison"] = c.comparison;
    j["shared_noise"] = c.shared_noise;
    j["target"] = {{"x_lo", opt_num(c.target_x_lo)},
                   {"x_hi", opt_num(c.target_x_hi)},
                   {"y_lo", opt_num(c.target_y_lo)},
                   {"y_hi", opt_num(c.target_y_hi)}};
    j["scan"] = {{"name", c.scan_name}, {"from", c.scan_from}, {"to", c.scan_to}, {"steps", c.scan_steps}};
    j["out"] = c.out;
    j["cycle_out"] = c.cycle_out;
    return j;
}

namespace {

void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw InvalidParams(where + " must be a JSON object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key())) throw InvalidParams("unknown key '" + item.key() + "' in " + where);
}

template <class T>
void read(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void read_opt(const Json& j, const char* key, std::optional<double>& out) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null())
        out.reset();
    else
        out = j.at(key).get<double>();
}

}  // namespace

RunConfig run_config_from_json(const Json& j) {
    require_keys(j,
                 {"command", "mode", "params", "raw", "scheme", "h", "t_max", "x0", "y0", "seed", "paths", "bins",
                  "burn_in", "checkpoints", "detect_cycle", "comparison", "shared_noise", "target", "scan", "out",
                  "cycle_out"},
                 "config");
    RunConfig c;
    try {
        read(j, "command", c.command);
        read(j, "mode", c.mode);
        if (j.contains("params")) c.params = model_params_from_json(j.at("params"));
        if (j.contains("raw") && !j.at("raw").is_null()) c.raw = raw_params_from_json(j.at("raw"));
        read(j, "scheme", c.scheme);
        read(j, "h", c.h);
        read(j, "t_max", c.t_max);
        read(j, "x0", c.x0);
        read(j, "y0", c.y0);
        if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
        read(j, "paths", c.paths);
        read(j, "bins", c.bins);
        read(j, "burn_in", c.burn_in);
        read(j, "checkpoints", c.checkpoints);
        read(j, "detect_cycle", c.detect_cycle);
        read(j, "comparison", c.comparison);
        read(j, "shared_noise", c.shared_noise);
        if (j.contains("target")) {
            const Json& t = j.at("target");
            require_keys(t, {"x_lo", "x_hi", "y_lo", "y_hi"}, "target");
            read_opt(t, "x_lo", c.target_x_lo);
            read_opt(t, "x_hi", c.target_x_hi);
            read_opt(t, "y_lo", c.target_y_lo);
            read_opt(t, "y_hi", c.target_y_hi);
        }
        if (j.contains("scan")) {
            const Json& s = j.at("scan");
            require_keys(s, {"name", "from", "to", "steps"}, "scan");
            read(s, "name", c.scan_name);
            read(s, "from", c.scan_from);
            read(s, "to", c.scan_to);
            read(s, "steps", c.scan_steps);
        }
        read(j, "out", c.out);
        read(j, "cycle_out", c.cycle_out);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParams(std::string("config: ") + e.what());
    }
    return c;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw OutputError("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw OutputError("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw OutputError("cannot move output into place at " + path);
    }
}

namespace {

Json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidParams("cannot read " + path);
    try {
        return Json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParams(path + ": " + e.what());
    }
}

// Value of "--name value" or "--name=value" among args, if present.
std::optional<std::string> find_flag(const std::vector<std::string>& args, const std::string& name) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == name && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind(name + "=", 0) == 0) return args[i].substr(name.size() + 1);
    }
    return std::nullopt;
}

struct Emitter {
    std::ostream& out;

    void emit(const std::string& path, const std::string& content) const {
        if (path == "-")
            out << content;
        else
            write_atomic(path, content);
    }
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

State initial_state(const RunConfig& c) { return {c.x0, c.y0}; }

SdeOptions sde_options(const RunConfig& c, SdeScheme fallback) {
    return {c.scheme.empty() ? fallback : parse_sde_scheme(c.scheme), c.shared_noise};
}

std::uint64_t require_seed(const RunConfig& c) {
    if (!c.seed) throw InvalidParams("--seed is required for stochastic subcommands");
    return *c.seed;
}

Json run_header(const std::string& kind, const RunConfig& c, const ModelParams& p) {
    Json j = report_header(kind);
    j["params"] = to_json(p);
    if (c.seed) j["seed"] = *c.seed;
    return j;
}

int cmd_analyze(const RunConfig& c, const Emitter& em) {
    const ModelParams p = c.effective_params();
    AnalysisOptions opt;
    opt.detect_cycle = c.detect_cycle;
    opt.cycle_init = initial_state(c);
    opt.h = c.h;
    opt.t_burn = c.burn_in;
    opt.t_max = c.t_max;
    const AnalysisResult r = build_analysis(p, opt);
    em.emit(c.out, dump(r.report));
    return r.consistent ? kExitOk : kExitInconsistent;
}

int cmd_ode(const RunConfig& c, const Emitter& em) {
    const ModelParams p = c.effective_params();
    const OdeScheme scheme = c.scheme.empty() ? OdeScheme::RK4 : parse_ode_scheme(c.scheme);
    const Trajectory traj = integrate(p, initial_state(c), scheme, c.h, c.t_max);
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    em.emit(c.out, csv.str());
    if (c.detect_cycle) {
        Json j = run_header("cycle", c, p);
        try {
            j["cycle"] = to_json(detect_limit_cycle(p, initial_state(c), c.h, c.burn_in, c.t_max));
        } catch (const Inconclusive& e) {
            j["cycle"] = nullptr;
            j["cycle_note"] = e.what();
        }
        em.emit(c.cycle_out, dump(j));
    }
    return kExitOk;
}

int cmd_sde(const RunConfig& c, const Emitter& em) {
    const ModelParams p = c.effective_params();
    const std::uint64_t seed = require_seed(c);
    const State init = initial_state(c);

    if (c.mode == "path") {
        const SdeOptions opt = sde_options(c, SdeScheme::Milstein);
        const NoisePath noise = NoisePath::generate(seed, c.h, step_count(c.h, c.t_max));
        std::ostringstream csv;
        if (c.comparison) {
            const ComparisonBundle b = comparison_bundle(p, init, noise, c.t_max, opt);
            write_path_csv(csv, b.path, &b);
        } else {
            write_path_csv(csv, simulate_path(p, init, opt, noise, c.t_max));
        }
        em.emit(c.out, csv.str());
        return kExitOk;
    }
    if (c.mode == "ensemble") {
        EnsembleConfig cfg;
        cfg.n_paths = c.paths;
        cfg.seed0 = seed;
        cfg.h = c.h;
        cfg.t_max = c.t_max;
        cfg.checkpoints = c.checkpoints;
        cfg.bins = c.bins;
        cfg.options = sde_options(c, SdeScheme::LogEuler);
        Json j = run_header("ensemble", c, p);
        j["scheme"] = std::string(to_string(cfg.options.scheme));
        j.update(to_json(ensemble(p, init, cfg)));
        em.emit(c.out, dump(j));
        return kExitOk;
    }
    if (c.mode == "stationary") {
        StationaryConfig cfg;
        cfg.seed = seed;
        cfg.h = c.h;
        cfg.burn_in = c.burn_in;
        cfg.t_max = c.t_max;
        cfg.bins = c.bins;
        cfg.init = init;
        cfg.options = sde_options(c, SdeScheme::LogEuler);
        Json j = run_header("stationary", c, p);
        j["scheme"] = std::string(to_string(cfg.options.scheme));
        j.update(to_json(stationary_histogram(p, cfg)));
        em.emit(c.out, dump(j));
        return kExitOk;
    }
    if (c.mode == "hitting") {
        constexpr double inf = std::numeric_limits<double>::infinity();
        const Region target{c.target_x_lo.value_or(-inf), c.target_x_hi.value_or(inf), c.target_y_lo.value_or(-inf),
                            c.target_y_hi.value_or(inf)};
        HittingConfig cfg;
        cfg.n_paths = c.paths;
        cfg.seed0 = seed;
        cfg.h = c.h;
        cfg.t_cap = c.t_max;
        cfg.options = sde_options(c, SdeScheme::LogEuler);
        Json j = run_header("hitting", c, p);
        j["scheme"] = std::string(to_string(cfg.options.scheme));
        j["target"] = to_json(target);
        j["t_cap"] = c.t_max;
        j.update(to_json(hitting_time(p, init, target, cfg)));
        em.emit(c.out, dump(j));
        return kExitOk;
    }
    throw InvalidParams("unknown sde mode '" + c.mode + "'");
}

double& scan_field(ModelParams& p, const std::string& name) {
    if (name == "a") return p.a;
    if (name == "b") return p.b;
    if (name == "k1") return p.k1;
    if (name == "k2") return p.k2;
    if (name == "m") return p.m;
    if (name == "sigma1") return p.sigma1;
    if (name == "sigma2") return p.sigma2;
    throw InvalidParams("--scan must be one of a, b, k1, k2, m, sigma1, sigma2");
}

int cmd_scan(const RunConfig& c, const Emitter& em) {
    if (c.scan_steps < 2) throw InvalidParams("--steps must be >= 2");
    if (!std::isfinite(c.scan_from) || !std::isfinite(c.scan_to)) throw InvalidParams("scan range must be finite");
    const ModelParams base = c.effective_params();
    ModelParams probe = base;
    scan_field(probe, c.scan_name);  // validates the name

    const double lo = std::min(c.scan_from, c.scan_to);
    const double hi = std::max(c.scan_from, c.scan_to);
    std::ostringstream csv;
    csv << "value,n_equilibria,eq,x,y,s,p,taxonomy,b0,lambda,regime\n";
    for (std::size_t i = 0; i < c.scan_steps; ++i) {
        ModelParams p = base;
        const double v = i + 1 == c.scan_steps ? hi : lo + (hi - lo) * static_cast<double>(i) /
                                                              static_cast<double>(c.scan_steps - 1);
        scan_field(p, c.scan_name) = v;
        try {
            p.validate();
        } catch (const InvalidParams& e) {
            throw InvalidParams("scan grid point " + std::to_string(i) + " (" + c.scan_name + " = " +
                                format_double(v) + "): " + e.what());
        }
        const auto eqs = interior_equilibria(p);
        const std::string regime(to_string(stochastic_regime_label(p)));
        if (eqs.empty()) {
            csv << format_double(v) << ",0,,,,,,,,," << regime << '\n';
            continue;
        }
        for (std::size_t k = 0; k < eqs.size(); ++k) {
            const Equilibrium& e = eqs[k];
            std::string lambda;
            try {
                lambda = format_double(hopf_point(p, e).lambda);
            } catch (const NoHopf&) {
            }
            csv << format_double(v) << ',' << eqs.size() << ',' << k << ',' << format_double(e.x) << ','
                << format_double(e.y) << ',' << format_double(e.s) << ',' << format_double(e.p_det) << ','
                << to_string(e.taxonomy) << ',' << format_double(hopf_b0(p, e)) << ',' << lambda << ',' << regime
                << '\n';
        }
    }
    em.emit(c.out, csv.str());
    return kExitOk;
}

// Options shared by every leaf subcommand.
struct Binder {
    explicit Binder(RunConfig& c) : cfg(c) {}

    RunConfig& cfg;
    std::uint64_t seed_value = 0;
    std::vector<CLI::Option*> param_flags;
    std::vector<CLI::Option*> seed_flags;
    std::vector<CLI::Option*> dump_flags;
    std::vector<CLI::Option*> target_flags[4];
    double targets[4] = {0, 0, 0, 0};

    void params(CLI::App* app) {
        param_flags.push_back(app->add_option("--a", cfg.params.a, "predation rate a"));
        param_flags.push_back(app->add_option("--b", cfg.params.b, "predator growth rate b"));
        param_flags.push_back(app->add_option("--k1", cfg.params.k1, "half-saturation k1"));
        param_flags.push_back(app->add_option("--k2", cfg.params.k2, "alternative-food capacity k2"));
        param_flags.push_back(app->add_option("--m", cfg.params.m, "prey refuge m"));
        app->add_option("--sigma1", cfg.params.sigma1, "prey noise intensity");
        app->add_option("--sigma2", cfg.params.sigma2, "predator noise intensity");
        app->add_option("--params", "dimensionless parameter file (JSON)");
        app->add_option("--raw", "dimensional parameter file (JSON), rescaled on load");
        app->add_option("--config", "RunConfig file (JSON); flags override it");
        app->add_option("--out", cfg.out, "output path, - for stdout");
        dump_flags.push_back(app->add_flag("--dump-config", "print the effective RunConfig as JSON and exit"));
    }
    void integration(CLI::App* app) {
        app->add_option("--scheme", cfg.scheme, "euler | rk4 | milstein | log-euler");
        app->add_option("--h", cfg.h, "step size");
        app->add_option("--t-max", cfg.t_max, "time horizon");
        app->add_option("--x0", cfg.x0, "initial prey density");
        app->add_option("--y0", cfg.y0, "initial predator density");
        app->add_option("--burn-in", cfg.burn_in, "discarded initial time");
    }
    void cycle(CLI::App* app) {
        app->add_flag("--detect-cycle", cfg.detect_cycle, "run the limit-cycle detector");
    }
    void stochastic(CLI::App* app) {
        seed_flags.push_back(app->add_option("--seed", seed_value, "base seed (required)"));
        app->add_flag("--shared-noise", cfg.shared_noise, "drive both components with one Gaussian sequence");
    }
    void targets_on(CLI::App* app) {
        const char* names[4] = {"--target-x-lo", "--target-x-hi", "--target-y-lo", "--target-y-hi"};
        for (int i = 0; i < 4; ++i) target_flags[i].push_back(app->add_option(names[i], targets[i], "target bound"));
    }

    bool any(const std::vector<CLI::Option*>& opts) const {
        return std::any_of(opts.begin(), opts.end(), [](CLI::Option* o) { return o->count() > 0; });
    }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        if (auto path = find_flag(args, "--config")) cfg = run_config_from_json(read_json_file(*path));
        const auto params_path = find_flag(args, "--params");
        const auto raw_path = find_flag(args, "--raw");
        if (params_path && raw_path) throw InvalidParams("--params and --raw are mutually exclusive");
        if (params_path) {
            cfg.params = model_params_from_json(read_json_file(*params_path));
            cfg.raw.reset();
        }
        if (raw_path) cfg.raw = raw_params_from_json(read_json_file(*raw_path));
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }

    CLI::App app{"Leslie-Gower prey-predator model with prey refuge: analysis and simulation"};
    app.set_help_flag("--help", "print help");  // -h would clash with --h
    app.require_subcommand(1);
    Binder bind(cfg);

    auto* analyze = app.add_subcommand("analyze", "equilibria, index check, certificates, Hopf data");
    bind.params(analyze);
    bind.integration(analyze);
    bind.cycle(analyze);

    auto* ode = app.add_subcommand("ode", "deterministic trajectory as CSV");
    bind.params(ode);
    bind.integration(ode);
    bind.cycle(ode);
    ode->add_option("--cycle-out", cfg.cycle_out, "cycle report path, - for stdout");

    auto* sde = app.add_subcommand("sde", "stochastic simulation");
    sde->require_subcommand(1);
    auto* path = sde->add_subcommand("path", "single sample path as CSV");
    auto* ens = sde->add_subcommand("ensemble", "ensemble moments, extinction, final-state histogram");
    auto* stat = sde->add_subcommand("stationary", "long-run histogram with ergodicity diagnostics");
    auto* hit = sde->add_subcommand("hitting", "first-entry times into a target rectangle");
    for (auto* s : {path, ens, stat, hit}) {
        bind.params(s);
        bind.integration(s);
        bind.stochastic(s);
    }
    path->add_flag("--comparison", cfg.comparison, "append the comparison processes");
    for (auto* s : {ens, stat, hit}) s->add_option("--paths", cfg.paths, "number of paths");
    for (auto* s : {ens, stat}) s->add_option("--bins", cfg.bins, "histogram bins per axis");
    ens->add_option("--checkpoints", cfg.checkpoints, "moment times (t-max is always included)")->delimiter(',');
    bind.targets_on(hit);

    auto* scan = app.add_subcommand("scan", "one-parameter sweep as CSV");
    bind.params(scan);
    scan->add_option("--scan", cfg.scan_name, "parameter: a b k1 k2 m sigma1 sigma2")->required();
    scan->add_option("--from", cfg.scan_from, "first value")->required();
    scan->add_option("--to", cfg.scan_to, "last value")->required();
    scan->add_option("--steps", cfg.scan_steps, "grid points (>= 2)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (analyze->parsed()) cfg.command = "analyze";
    if (ode->parsed()) cfg.command = "ode";
    if (scan->parsed()) cfg.command = "scan";
    if (sde->parsed()) {
        cfg.command = "sde";
        for (auto* s : {path, ens, stat, hit})
            if (s->parsed()) cfg.mode = s->get_name();
    }
    if (bind.any(bind.seed_flags)) cfg.seed = bind.seed_value;
    std::optional<double>* target_fields[4] = {&cfg.target_x_lo, &cfg.target_x_hi, &cfg.target_y_lo,
                                               &cfg.target_y_hi};
    for (int i = 0; i < 4; ++i)
        if (bind.any(bind.target_flags[i])) *target_fields[i] = bind.targets[i];

    if (cfg.raw && bind.any(bind.param_flags)) {
        err << "error: --raw cannot be combined with --a/--b/--k1/--k2/--m\n";
        return kExitInput;
    }

    const Emitter em{out};
    try {
        if (bind.any(bind.dump_flags)) {
            out << dump(to_json(cfg));
            return kExitOk;
        }
        if (cfg.command == "analyze") return cmd_analyze(cfg, em);
        if (cfg.command == "ode") return cmd_ode(cfg, em);
        if (cfg.command == "sde") return cmd_sde(cfg, em);
        return cmd_scan(cfg, em);
    } catch (const StepError& e) {
        err << "error: " << e.what() << " (step " << e.step() << ")\n";
        return kExitInput;
    } catch (const InvalidParams& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const OutputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const TooShort& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const NonFinite& e) {
        err << "error: " << e.what() << " (reduce h)\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInconsistent;
    }
}

}  // namespace lglab

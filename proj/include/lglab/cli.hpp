#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lglab/model.hpp"
#include "lglab/report.hpp"

namespace lglab {

/// Everything a subcommand needs. Defaults:
///   scheme ""      -> rk4 for ode, milstein for sde path, log-euler for the other sde modes
///   h 1e-3, t_max 200, (x0, y0) = (0.55, 0.6)
///   paths 100, bins 50, burn_in 100 (also the cycle-detection burn-in)
///   target bounds absent = unbounded side
///   scan_steps 11, out "-" (stdout), cycle_out "-"
struct RunConfig {
    std::string command;  ///< analyze | ode | sde | scan
    std::string mode;     ///< sde only: path | ensemble | stationary | hitting
    ModelParams params;
    std::optional<RawParams> raw;  ///< when set, params a..m are derived from it
    std::string scheme;
    double h = 1e-3;
    double t_max = 200.0;
    double x0 = 0.55;
    double y0 = 0.6;
    std::optional<std::uint64_t> seed;
    std::size_t paths = 100;
    std::size_t bins = 50;
    double burn_in = 100.0;
    std::vector<double> checkpoints;
    bool detect_cycle = false;
    bool comparison = false;
    bool shared_noise = false;
    std::optional<double> target_x_lo, target_x_hi, target_y_lo, target_y_hi;
    std::string scan_name;
    double scan_from = 0.0;
    double scan_to = 0.0;
    std::size_t scan_steps = 11;
    std::string out = "-";
    std::string cycle_out = "-";

    /// params, or the rescaled raw parameters with params' sigmas.
    ModelParams effective_params() const;

    bool operator==(const RunConfig&) const = default;
};

Json to_json(const RunConfig& c);
/// Strict about unknown keys. Throws InvalidParams.
RunConfig run_config_from_json(const Json& j);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInconsistent = 2;

/// args excludes the program name. "-" outputs go to out; diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes content to path via a temporary file and rename.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace lglab

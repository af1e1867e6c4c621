#pragma once

// JSON and CSV serialization of analysis and simulation results.

#include <ostream>
#include <string>

#include <json.hpp>

#include "lglab/equilibria.hpp"
#include "lglab/model.hpp"
#include "lglab/ode_sim.hpp"
#include "lglab/qualitative.hpp"
#include "lglab/sde_sim.hpp"

namespace lglab {

/// Bumped whenever a report field changes meaning or disappears.
inline constexpr const char* kSchemaVersion = "1.0.0";

using Json = nlohmann::ordered_json;

Json to_json(const ModelParams& p);
Json to_json(const RawParams& r);
/// Strict: unknown keys and non-numeric values throw InvalidParams.
/// Missing keys keep their defaults.
ModelParams model_params_from_json(const Json& j);
RawParams raw_params_from_json(const Json& j);

Json to_json(const Equilibrium& e);
Json to_json(const CountReport& c);
Json to_json(const IndexReport& r);
Json to_json(const HopfData& h);
Json to_json(const RegimeCertificate& c);
Json to_json(const PersistenceReport& r);
Json to_json(const Region& r);
Json to_json(const CycleReport& c);
Json to_json(const EnsembleStats& s);
Json to_json(const Histogram2D& h);
Json to_json(const StationaryResult& s);
Json to_json(const HittingStats& s);

/// {"schema_version": ..., "kind": kind}
Json report_header(const std::string& kind);

struct AnalysisOptions {
    bool detect_cycle = false;
    State cycle_init{0.55, 0.6};
    double h = 1e-3;
    double t_burn = 100.0;
    double t_max = 200.0;
};

struct AnalysisResult {
    Json report;
    bool consistent = true;  ///< false on an index-sum mismatch
};

/// Equilibria, count, index check, certificates, Hopf data and optionally a
/// cycle report. Deterministic in (p, opt).
AnalysisResult build_analysis(const ModelParams& p, const AnalysisOptions& opt = {});

/// %.17g, or "nan"/"inf" spelled out.
std::string format_double(double v);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// Comparison columns are written when bundle is non-null.
void write_path_csv(std::ostream& os, const SamplePath& path, const ComparisonBundle* bundle = nullptr);

}  // namespace lglab

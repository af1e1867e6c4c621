#include "lglab/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "lglab/errors.hpp"

namespace lglab {

namespace {

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class Target>
void read_fields(const Json& j, const std::map<std::string, double Target::*>& fields, Target& out,
                 const char* what) {
    if (!j.is_object()) throw InvalidParams(std::string(what) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        const auto it = fields.find(key);
        if (it == fields.end()) throw InvalidParams(std::string("unknown ") + what + " key '" + key + "'");
        if (!value.is_number()) throw InvalidParams(std::string(what) + " key '" + key + "' must be a number");
        out.*(it->second) = value.template get<double>();
    }
}

}  // namespace

Json to_json(const ModelParams& p) {
    return {{"a", p.a}, {"b", p.b}, {"k1", p.k1}, {"k2", p.k2}, {"m", p.m}, {"sigma1", p.sigma1}, {"sigma2", p.sigma2}};
}

Json to_json(const RawParams& r) {
    return {{"rho1", r.rho1},     {"rho2", r.rho2},     {"beta", r.beta},     {"alpha1", r.alpha1},
            {"alpha2", r.alpha2}, {"kappa1", r.kappa1}, {"kappa2", r.kappa2}, {"mu", r.mu}};
}

ModelParams model_params_from_json(const Json& j) {
    ModelParams p;
    read_fields<ModelParams>(j,
                             {{"a", &ModelParams::a},
                              {"b", &ModelParams::b},
                              {"k1", &ModelParams::k1},
                              {"k2", &ModelParams::k2},
                              {"m", &ModelParams::m},
                              {"sigma1", &ModelParams::sigma1},
                              {"sigma2", &ModelParams::sigma2}},
                             p, "params");
    return p;
}

RawParams raw_params_from_json(const Json& j) {
    RawParams r;
    read_fields<RawParams>(j,
                           {{"rho1", &RawParams::rho1},
                            {"rho2", &RawParams::rho2},
                            {"beta", &RawParams::beta},
                            {"alpha1", &RawParams::alpha1},
                            {"alpha2", &RawParams::alpha2},
                            {"kappa1", &RawParams::kappa1},
                            {"kappa2", &RawParams::kappa2},
                            {"mu", &RawParams::mu}},
                           r, "raw params");
    return r;
}

Json to_json(const Equilibrium& e) {
    Json j;
    if (!e.label.empty()) j["label"] = std::string(e.label);
    j["x"] = e.x;
    j["y"] = e.y;
    j["s"] = e.s;
    j["p"] = e.p_det;
    j["delta_c"] = e.delta_c;
    j["taxonomy"] = std::string(to_string(e.taxonomy));
    j["index"] = e.index;
    j["multiplicity"] = e.multiplicity;
    return j;
}

Json to_json(const CountReport& c) {
    return {{"n_predicted", c.n_predicted},
            {"routh_sign_changes", c.routh_sign_changes},
            {"tong_delta", c.tong_delta},
            {"tong_product", c.tong_product ? num(*c.tong_product) : Json(nullptr)},
            {"branch", std::string(to_string(c.branch))}};
}

Json to_json(const IndexReport& r) { return {{"sum", r.sum}, {"expected", r.expected}, {"pass", r.pass}}; }

Json to_json(const HopfData& h) {
    return {{"b0", h.b0}, {"omega", h.omega}, {"lambda", h.lambda}, {"subcritical", h.subcritical}};
}

Json to_json(const RegimeCertificate& c) {
    Json w = Json::object();
    for (const auto& [k, v] : c.witness) w[k] = num(v);
    return {{"clause", c.clause}, {"holds", c.holds}, {"witness", w}};
}

Json to_json(const PersistenceReport& r) {
    return {{"regime", std::string(to_string(r.regime))},
            {"branch", r.branch},
            {"liminf_x_bound", r.liminf_x_bound ? num(*r.liminf_x_bound) : Json(nullptr)},
            {"limsup_x_bound", r.limsup_x_bound ? num(*r.limsup_x_bound) : Json(nullptr)}};
}

Json to_json(const Region& r) {
    return {{"x_lo", num(r.x_lo)}, {"x_hi", num(r.x_hi)}, {"y_lo", num(r.y_lo)}, {"y_hi", num(r.y_hi)}};
}

Json to_json(const CycleReport& c) {
    Json crossings = Json::array();
    for (const auto& k : c.crossings) crossings.push_back({{"t", k.t}, {"x", k.x}, {"y", k.y}});
    return {{"found", c.found},
            {"period", c.period},
            {"amplitude_x", c.amplitude_x},
            {"amplitude_y", c.amplitude_y},
            {"stable", c.stable},
            {"contraction_slope", num(c.contraction_slope)},
            {"crossings", crossings}};
}

Json to_json(const Histogram2D& h) {
    return {{"bins", h.bins}, {"range", {0.0, h.hi}}, {"counts", h.counts}, {"overflow", h.overflow}};
}

Json to_json(const EnsembleStats& s) {
    Json cps = Json::array();
    for (const auto& c : s.checkpoints)
        cps.push_back({{"t", c.t}, {"mean", {c.mean[0], c.mean[1]}}, {"var", {c.var[0], c.var[1]}}});
    return {{"n_paths", s.n_paths},
            {"checkpoints", cps},
            {"extinction", {{"x", s.extinction_fraction_x}, {"y", s.extinction_fraction_y}, {"threshold", kExtinctionThreshold}}},
            {"histogram", to_json(s.histogram)}};
}

Json to_json(const StationaryResult& s) {
    return {{"regime", std::string(to_string(s.regime))},
            {"regime_warning", s.regime_warning},
            {"samples", s.samples},
            {"diagnostics",
             {{"l1_half", s.l1_half},
              {"l1_cross", s.l1_cross},
              {"tv_half", 0.5 * s.l1_half},
              {"tv_cross", 0.5 * s.l1_cross}}},
            {"histogram", to_json(s.histogram)}};
}

Json to_json(const HittingStats& s) {
    return {{"n_paths", s.times.size()},
            {"mean", s.mean},
            {"median", s.median},
            {"q10", s.q10},
            {"q90", s.q90},
            {"censored_fraction", s.censored_fraction},
            {"times", s.times}};
}

Json report_header(const std::string& kind) { return {{"schema_version", kSchemaVersion}, {"kind", kind}}; }

AnalysisResult build_analysis(const ModelParams& p, const AnalysisOptions& opt) {
    p.validate();
    AnalysisResult out;
    Json& j = out.report;
    j = report_header("analysis");
    j["params"] = to_json(p);

    Json trivial = Json::array();
    for (const auto& e : trivial_equilibria(p)) trivial.push_back(to_json(e));
    j["trivial_equilibria"] = trivial;

    const CountReport count = count_interior_equilibria(p);
    j["count"] = to_json(count);

    const auto eqs = interior_equilibria(p);
    const int located = static_cast<int>(eqs.size());
    Json interior = Json::array();
    for (const auto& e : eqs) {
        Json je = to_json(e);
        je["hopf_b0"] = num(hopf_b0(p, e));
        try {
            je["hopf"] = to_json(hopf_point(p, e));
        } catch (const NoHopf&) {
            je["hopf"] = nullptr;
        }
        interior.push_back(je);
    }
    j["interior_equilibria"] = interior;
    if (located != count.n_predicted) {
        out.consistent = false;
        j["inconsistency"] = "located " + std::to_string(located) + " interior equilibria, count predicts " +
                             std::to_string(count.n_predicted);
    }

    try {
        const IndexReport idx = index_sum_check(p, eqs);
        j["index_check"] = to_json(idx);
        if (!idx.pass) {
            out.consistent = false;
            j["inconsistency"] = "Poincare index sum " + std::to_string(idx.sum) + " != expected " +
                                 std::to_string(idx.expected);
        }
    } catch (const NonHyperbolicPresent& e) {
        j["index_check"] = nullptr;
        j["index_note"] = e.what();
    }

    j["invariant_region"] = to_json(invariant_region(p));
    j["persistence"] = to_json(persistence_report(p));
    Json certs = Json::array();
    for (const auto& c : no_cycle_conditions(p)) certs.push_back(to_json(c));
    j["certificates"] = certs;
    j["stochastic_regime"] = to_json(stochastic_regime(p));

    if (opt.detect_cycle) {
        try {
            j["cycle"] = to_json(detect_limit_cycle(p, opt.cycle_init, opt.h, opt.t_burn, opt.t_max));
        } catch (const Inconclusive& e) {
            j["cycle"] = nullptr;
            j["cycle_note"] = e.what();
        }
    }
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,x,y\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        os << format_double(traj.times[i]) << ',' << format_double(traj.states[i].x) << ','
           << format_double(traj.states[i].y) << '\n';
}

void write_path_csv(std::ostream& os, const SamplePath& path, const ComparisonBundle* bundle) {
    os << "t,x,y,x_upper,y_upper,x_lower,y_lower\n";
    for (std::size_t i = 0; i < path.states.size(); ++i) {
        os << format_double(path.times[i]) << ',' << format_double(path.states[i].x) << ','
           << format_double(path.states[i].y);
        if (bundle)
            os << ',' << format_double(bundle->x_upper[i]) << ',' << format_double(bundle->y_upper[i]) << ','
               << format_double(bundle->x_lower[i]) << ',' << format_double(bundle->y_lower[i]);
        else
            os << ",,,,";
        os << '\n';
    }
}

}  // namespace lglab

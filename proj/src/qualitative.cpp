#include "lglab/qualitative.hpp"

#include <algorithm>
#include <cmath>

#include "lglab/equilibria.hpp"

namespace lglab {

std::string_view to_string(PersistenceRegime r) {
    switch (r) {
        case PersistenceRegime::UniformlyPersistent: return "UniformlyPersistent";
        case PersistenceRegime::WeaklyPersistent: return "WeaklyPersistent";
        case PersistenceRegime::PreyExtinction: return "PreyExtinction";
        case PersistenceRegime::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

std::string_view to_string(StochasticRegime r) {
    switch (r) {
        case StochasticRegime::Deterministic: return "Deterministic";
        case StochasticRegime::FullExtinction: return "FullExtinction";
        case StochasticRegime::PreyExtinctionPredatorStationary: return "PreyExtinctionPredatorStationary";
        case StochasticRegime::Stationary: return "Stationary";
        case StochasticRegime::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

Region invariant_region(const ModelParams& p) {
    p.validate();
    return {p.m, 1.0, p.k2, 1.0 + p.k2 - p.m};
}

PersistenceReport persistence_report(const ModelParams& p) {
    p.validate();
    PersistenceReport r;
    if (p.m > 0.0) {
        r.regime = PersistenceRegime::UniformlyPersistent;
        r.branch = "m_pos";
        return r;
    }
    const double L = 1.0 + p.k2;
    const double ak2 = p.a * p.k2;
    if (p.a * L < p.k1) {
        r.regime = PersistenceRegime::UniformlyPersistent;
        r.liminf_x_bound = (p.k1 - p.a * L) / p.k1;
        r.branch = "m0_i";
    } else if (ak2 < p.k1) {
        r.regime = PersistenceRegime::WeaklyPersistent;
        const double c = 1.0 - p.k1 - p.a;
        r.limsup_x_bound = std::min(p.k1 / p.a - p.k2, 0.5 * (c + std::sqrt(c * c + 4.0 * (p.k1 - ak2))));
        r.branch = "m0_ii";
    } else if (ak2 == p.k1) {
        const double c = 1.0 - p.k1 - p.a;
        if (c > 0.0) {
            r.regime = PersistenceRegime::WeaklyPersistent;
            r.limsup_x_bound = c;
            r.branch = "m0_iii_weak";
        } else {
            r.regime = PersistenceRegime::PreyExtinction;
            r.branch = "m0_iii_extinct";
        }
    } else {
        r.regime = PersistenceRegime::PreyExtinction;
        r.branch = "m0_iv";
    }
    return r;
}

RegimeCertificate global_stability_condition(const ModelParams& p) {
    p.validate();
    RegimeCertificate c;
    c.clause = "global_stability";
    const double refuge_margin = 2.0 * p.m + p.k1 - 1.0;
    const double q = 1.0 - p.k1 - p.a;
    const double discriminant_margin = q * q + 4.0 * p.k1 - 4.0 * p.a * p.k2;
    c.holds = refuge_margin >= 0.0 && (p.m > 0.0 || discriminant_margin >= 0.0);
    c.witness = {{"2m+k1-1", refuge_margin}, {"(1-k1-a)^2+4k1-4ak2", discriminant_margin}};
    return c;
}

std::vector<RegimeCertificate> no_cycle_conditions(const ModelParams& p) {
    p.validate();
    const CountReport count = count_interior_equilibria(p);
    std::vector<RegimeCertificate> out;

    RegimeCertificate zero_or_two;
    zero_or_two.clause = "m0_zero_or_two_equilibria";
    zero_or_two.holds = p.m == 0.0 && (count.n_predicted == 0 || count.n_predicted == 2);
    zero_or_two.witness = {{"m", p.m}, {"n", static_cast<double>(count.n_predicted)}};
    out.push_back(zero_or_two);

    RegimeCertificate bk;
    bk.clause = "m0_b_plus_k1";
    bk.holds = p.m == 0.0 && p.b + p.k1 >= 1.0;
    bk.witness = {{"m", p.m}, {"b+k1-1", p.b + p.k1 - 1.0}};
    out.push_back(bk);

    RegimeCertificate dulac;
    dulac.clause = "dulac";
    const double k2_margin = p.k2 - (1.0 - p.m);
    const double k1_margin = p.k1 - (1.0 + p.m);
    const double sum_margin = p.a * p.k2 + p.k1 - (2.0 + 1.0 / 12.0);
    dulac.holds = p.m > 0.0 && k2_margin > 0.0 && (k1_margin > 0.0 || sum_margin > 0.0);
    dulac.witness = {{"k2-(1-m)", k2_margin}, {"k1-(1+m)", k1_margin}, {"ak2+k1-(2+1/12)", sum_margin}};
    out.push_back(dulac);

    out.push_back(global_stability_condition(p));

    RegimeCertificate exists;
    exists.clause = "m0_cycle_exists";
    exists.witness = {{"m", p.m}, {"n", static_cast<double>(count.n_predicted)}};
    if (p.m == 0.0 && count.n_predicted == 1) {
        const auto eqs = interior_equilibria(p);
        if (eqs.size() == 1) {
            exists.holds = eqs[0].s < 0.0 && eqs[0].p_det > 0.0;
            exists.witness.emplace_back("s", eqs[0].s);
            exists.witness.emplace_back("p", eqs[0].p_det);
        }
    }
    out.push_back(exists);
    return out;
}

StochasticRegime stochastic_regime_label(const ModelParams& p) {
    p.validate();
    const double v1 = p.sigma1 * p.sigma1;
    const double v2 = p.sigma2 * p.sigma2;
    if (v1 == 0.0 && v2 == 0.0) return StochasticRegime::Deterministic;
    if (v1 >= 2.0 && v2 >= 2.0 * p.b) return StochasticRegime::FullExtinction;
    if (v1 >= 2.0 && v2 > 0.0 && v2 < 2.0 * p.b) return StochasticRegime::PreyExtinctionPredatorStationary;
    if (v1 > 0.0 && v1 < 2.0 && v2 > 0.0 && v2 < 2.0 * p.b && p.m > 0.0) return StochasticRegime::Stationary;
    return StochasticRegime::Undetermined;
}

RegimeCertificate stochastic_regime(const ModelParams& p) {
    const StochasticRegime label = stochastic_regime_label(p);
    RegimeCertificate c;
    c.clause = std::string(to_string(label));
    c.holds = label != StochasticRegime::Undetermined;
    c.witness = {{"sigma1^2-2", p.sigma1 * p.sigma1 - 2.0},
                 {"sigma2^2-2b", p.sigma2 * p.sigma2 - 2.0 * p.b},
                 {"m", p.m}};
    return c;
}

}  // namespace lglab

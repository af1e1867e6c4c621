#include "lglab/model.hpp"

#include <sstream>

#include "lglab/errors.hpp"

namespace lglab {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw InvalidParams(what);
}

}  // namespace

void RawParams::validate() const {
    require(std::isfinite(rho1) && rho1 > 0.0, "rho1 must be > 0");
    require(std::isfinite(rho2) && rho2 > 0.0, "rho2 must be > 0");
    require(std::isfinite(beta) && beta > 0.0, "beta must be > 0");
    require(std::isfinite(alpha1) && alpha1 > 0.0, "alpha1 must be > 0");
    require(std::isfinite(alpha2) && alpha2 > 0.0, "alpha2 must be > 0");
    require(std::isfinite(kappa1) && kappa1 > 0.0, "kappa1 must be > 0");
    require(std::isfinite(kappa2) && kappa2 > 0.0, "kappa2 must be > 0");
    require(std::isfinite(mu) && mu >= 0.0, "mu must be >= 0");
    require(mu < rho1 / beta, "mu must be < rho1/beta");
}

void ModelParams::validate() const {
    require(std::isfinite(a) && a > 0.0, "a must be > 0");
    require(std::isfinite(b) && b > 0.0, "b must be > 0");
    require(std::isfinite(k1) && k1 > 0.0, "k1 must be > 0");
    require(std::isfinite(k2) && k2 > 0.0, "k2 must be > 0");
    require(std::isfinite(m) && m >= 0.0 && m < 1.0, "m must lie in [0, 1)");
    require(std::isfinite(sigma1) && sigma1 >= 0.0, "sigma1 must be >= 0");
    require(std::isfinite(sigma2) && sigma2 >= 0.0, "sigma2 must be >= 0");
}

ModelParams nondimensionalize(const RawParams& raw, double sigma1, double sigma2) {
    raw.validate();
    ModelParams p;
    p.m = raw.mu * raw.beta / raw.rho1;
    p.a = raw.alpha1 * raw.rho2 / (raw.alpha2 * raw.rho1);
    p.k1 = raw.kappa1 * raw.beta / raw.rho1;
    p.k2 = raw.kappa2 * raw.beta / raw.rho1;
    p.b = raw.rho2 / raw.rho1;
    p.sigma1 = sigma1;
    p.sigma2 = sigma2;
    p.validate();
    return p;
}

Jacobian2 jacobian(const ModelParams& p, State s) {
    if (p.m > 0.0 && s.x == p.m) {
        std::ostringstream msg;
        msg << "jacobian undefined on the refuge line x = m = " << p.m;
        throw KinkPoint(msg.str());
    }
    const double xp = refuge_excess(p, s.x);
    const double above = s.x >= p.m ? 1.0 : 0.0;
    const double d1 = p.k1 + xp;
    const double d2 = p.k2 + xp;
    Jacobian2 j;
    j.j11 = 1.0 - 2.0 * s.x - above * p.a * s.y * p.k1 / (d1 * d1);
    j.j12 = -p.a * xp / d1;
    j.j21 = above * p.b * s.y * s.y / (d2 * d2);
    j.j22 = p.b - 2.0 * p.b * s.y / d2;
    return j;
}

SdeCoefficients sde_coefficients(const ModelParams& p, State s) {
    return {vector_field(p, s), {p.sigma1 * s.x, p.sigma2 * s.y}};
}

Velocity raw_vector_field(const RawParams& raw, State s) {
    const double xp = std::max(0.0, s.x - raw.mu);
    return {s.x * (raw.rho1 - raw.beta * s.x) - raw.alpha1 * s.y * xp / (raw.kappa1 + xp),
            s.y * (raw.rho2 - raw.alpha2 * s.y / (raw.kappa2 + xp))};
}

}  // namespace lglab

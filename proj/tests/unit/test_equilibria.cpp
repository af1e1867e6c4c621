#include <doctest.h>

#include <cmath>
#include <random>

#include "lglab/equilibria.hpp"
#include "lglab/errors.hpp"
#include "oracles/oracles.hpp"

using namespace lglab;

namespace {
const ModelParams kThree{0.5, 0.1, 0.08, 0.2, 0.0025};
const ModelParams kStoch{0.4, 0.1, 0.08, 0.2, 0.0025};

oracle::P as_oracle(const ModelParams& p) { return {p.a, p.b, p.k1, p.k2, p.m}; }
}  // namespace

TEST_CASE("trivial equilibria") {
    ModelParams p{0.7, 0.3, 0.2, 0.4, 0.5};
    auto t = trivial_equilibria(p);
    REQUIRE(t.size() == 3);
    CHECK(t[0].label == "E0");
    CHECK(t[2].y == p.k2);
    CHECK(t[2].taxonomy == Taxonomy::Saddle);

    p = {1.0, 0.3, 0.2, 0.5, 0.0};
    CHECK(trivial_equilibria(p)[2].taxonomy == Taxonomy::StableNode);

    p = {0.5, 0.3, 0.2, 0.4, 0.0};  // a k2 = k1, 1 - k1 - a = 0.3
    CHECK(trivial_equilibria(p)[2].taxonomy == Taxonomy::TopologicalSaddle);
}

TEST_CASE("cubic coefficients") {
    auto c = cubic_coefficients(kThree);
    CHECK(c.alpha2 == doctest::Approx(-0.415));
    CHECK(c.alpha1 == doctest::Approx(0.01790625));
    CHECK(c.alpha0 == doctest::Approx(-0.0001995));

    c = cubic_coefficients({1.0, 1.0, 1.0, 1.0, 0.25});
    CHECK(c.alpha2 == doctest::Approx(1.5));
    CHECK(c.alpha1 == doctest::Approx(0.3125));
    CHECK(c.alpha0 == doctest::Approx(-0.1875));

    CHECK(cubic_coefficients({1.0, 1.0, 0.3, 0.2, 0.0}).alpha0 == 0.0);

    // the monic cubic and the product-form residual agree
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.01, 1.0);
    for (int i = 0; i < 50; ++i) {
        ModelParams p{2 * U(rng), U(rng), U(rng), U(rng), 0.5 * U(rng)};
        const auto cc = cubic_coefficients(p);
        const double X = U(rng);
        CHECK(cc(X) == doctest::Approx(oracle::residual(as_oracle(p), X)).scale(1.0));
    }
}

TEST_CASE("count examples") {
    CHECK(count_interior_equilibria(kThree).n_predicted == 3);
    CHECK(count_interior_equilibria(kThree).branch == CountBranch::MPosCaseA);
    CHECK(count_interior_equilibria({1.0, 0.1, 0.2, 0.5, 0.0}).n_predicted == 0);
    CHECK(count_interior_equilibria({1.0, 0.1, 0.2, 1.0, 0.5}).n_predicted == 1);
}

TEST_CASE("count agrees with a grid scan of the residual") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int mismatches = 0;
    double worst_residual = 0.0;
    for (int i = 0; i < 300; ++i) {
        ModelParams p{0.05 + 1.5 * U(rng), 0.1, 0.01 + 0.3 * U(rng), 0.01 + 0.5 * U(rng),
                      i % 5 == 0 ? 0.0 : 0.05 * U(rng)};
        const auto br = oracle::grid_brackets(as_oracle(p), 1.0 - p.m, 100000);
        const int predicted = count_interior_equilibria(p).n_predicted;
        if (predicted != static_cast<int>(br.size())) ++mismatches;
        for (const auto& e : find_interior_equilibria(p))
            worst_residual = std::max(worst_residual, std::abs(cubic_coefficients(p)(e.x - p.m)));
    }
    CHECK(mismatches == 0);
    CHECK(worst_residual < 1e-10);
}

TEST_CASE("three-equilibria regression") {
    const auto eqs = interior_equilibria(kThree);
    REQUIRE(eqs.size() == 3);
    const double xs[] = {0.0222589, 0.0299525, 0.3702886};
    const Taxonomy tx[] = {Taxonomy::StableFocus, Taxonomy::Saddle, Taxonomy::UnstableFocus};
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(eqs[i].x - xs[i]) < 1e-5);
        CHECK(std::abs(eqs[i].y - (xs[i] + 0.1975)) < 1e-5);
        CHECK(eqs[i].taxonomy == tx[i]);
    }
    const auto r = index_sum_check(kThree, eqs);
    CHECK(r.sum == 1);
    CHECK(r.pass);
}

TEST_CASE("classification agrees with the finite-difference jacobian") {
    for (const auto& e : interior_equilibria(kThree)) {
        const auto J = oracle::fd_jacobian(as_oracle(kThree), e.x, e.y);
        CHECK(e.s == doctest::Approx(-(J[0] + J[3])).epsilon(1e-6));
        CHECK(e.p_det == doctest::Approx(J[0] * J[3] - J[1] * J[2]).epsilon(1e-6));
    }
}

TEST_CASE("small-noise-set equilibrium against bisection") {
    const auto eqs = interior_equilibria(kStoch);
    REQUIRE(eqs.size() == 1);
    const auto o = as_oracle(kStoch);
    const double X = oracle::bisect([&](double v) { return oracle::residual(o, v); }, 1e-9, 1.0 - kStoch.m);
    CHECK(std::abs(eqs[0].x - (kStoch.m + X)) < 1e-10);
    CHECK(std::abs(oracle::residual(o, eqs[0].x - kStoch.m)) < 1e-10);
    CHECK(std::abs(eqs[0].x - 0.55) < 0.05);
    CHECK(std::abs(eqs[0].y - 0.75) < 0.05);
    CHECK(eqs[0].s > 0.0);
    CHECK(eqs[0].p_det > 0.0);
}

TEST_CASE("equal protection constants") {
    // k1 = k2 = k, a = 0.5, m = 0: x* = (1 - a + sqrt((1-a)^2 + 4am)) / 2
    const auto eqs = interior_equilibria({0.5, 0.2, 0.3, 0.3, 0.0});
    REQUIRE(eqs.size() == 1);
    CHECK(eqs[0].x == doctest::Approx(0.5));
}

TEST_CASE("index sums") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        ModelParams p{0.05 + 1.5 * U(rng), 0.01 + U(rng), 0.01 + 0.3 * U(rng), 0.01 + 0.5 * U(rng),
                      i % 2 == 0 ? 0.0 : 0.05 * U(rng)};
        const auto eqs = interior_equilibria(p);
        try {
            const auto r = index_sum_check(p, eqs);
            CHECK(r.pass);
            if (p.m > 0.0 && eqs.size() == 1) CHECK(eqs[0].taxonomy != Taxonomy::Saddle);
            if (p.m == 0.0 && eqs.size() == 2) CHECK(r.sum == 0);
            ++checked;
        } catch (const NonHyperbolicPresent&) {
        }
    }
    CHECK(checked > 350);
}

TEST_CASE("classify rejects non-equilibria") {
    Equilibrium e;
    e.x = 0.3;
    e.y = 0.3;
    CHECK_THROWS_AS(classify(kThree, e), NotAnEquilibrium);
}

TEST_CASE("hopf coefficient (a): supercritical") {
    const ModelParams p{1.1, 0.1, 0.08, 0.01, 0.0025};
    const auto eqs = find_interior_equilibria(p);
    REQUIRE(eqs.size() == 1);
    const HopfData h = hopf_point(p, eqs[0]);
    CHECK(h.b0 > 0.0);
    CHECK(h.lambda < 0.0);
    CHECK_FALSE(h.subcritical);

    // at b = b0 the trace vanishes
    ModelParams at = p;
    at.b = h.b0;
    const auto e = classify(at, eqs[0]);
    CHECK(std::abs(e.s) < 1e-12);

    double omega = 0.0;
    const double l1 = oracle::lyapunov_l1({p.a, h.b0, p.k1, p.k2, p.m}, eqs[0].x, eqs[0].y, &omega);
    CHECK(l1 < 0.0);
    CHECK(omega == doctest::Approx(h.omega).epsilon(1e-5));
}

TEST_CASE("hopf coefficient (b): no center for these parameters") {
    const ModelParams p{0.5, 0.1, 0.08, 0.1, 0.002};
    const auto eqs = find_interior_equilibria(p);
    REQUIRE(eqs.size() == 1);
    CHECK(hopf_b0(p, eqs[0]) < 0.0);
    CHECK_THROWS_AS(hopf_point(p, eqs[0]), NoHopf);
}

TEST_CASE("hopf sign agrees with the projection formula") {
    // upper focus of the three-equilibria set is subcritical
    const auto eqs = find_interior_equilibria(kThree);
    const HopfData h = hopf_point(kThree, eqs[2]);
    const double l1 = oracle::lyapunov_l1({kThree.a, h.b0, kThree.k1, kThree.k2, kThree.m}, eqs[2].x, eqs[2].y);
    CHECK(h.lambda > 0.0);
    CHECK(l1 > 0.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int compared = 0;
    for (int i = 0; i < 200 && compared < 40; ++i) {
        ModelParams p{0.3 + 1.5 * U(rng), 0.1, 0.02 + 0.2 * U(rng), 0.01 + 0.3 * U(rng), 0.01 * U(rng)};
        for (const auto& e : find_interior_equilibria(p)) {
            HopfData hd;
            try {
                hd = hopf_point(p, e);
            } catch (const NoHopf&) {
                continue;
            }
            const double o = oracle::lyapunov_l1({p.a, hd.b0, p.k1, p.k2, p.m}, e.x, e.y);
            if (std::abs(o) < 1e-6) continue;
            CHECK((o > 0.0) == (hd.lambda > 0.0));
            ++compared;
        }
    }
    CHECK(compared >= 10);
}

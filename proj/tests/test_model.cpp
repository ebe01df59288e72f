#include <doctest.h>

#include "strongcomp/model.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

using namespace strongcomp;

namespace {

ModelParams scenario_a() { return ModelParams::identical(1, 1.0, 1.0, 1.0, 1.0, 0.2, 1.0, 1.0, 0.0, 0.2); }

}  // namespace

TEST_CASE("validate_uniform accepts Scenario A") {
    const auto v = validate_uniform(scenario_a());
    CHECK(v.admissible);
    CHECK(v.violations.empty());
}

TEST_CASE("validate_uniform flags a zero surplus") {
    auto p = scenario_a();
    p.omega[0] = 1.0;
    const auto v = validate_uniform(p);
    REQUIRE_FALSE(v.admissible);
    REQUIRE(v.violations.size() == 1);
    CHECK(v.violations[0].coefficient == "lambda*k-mu*omega");
    CHECK(v.violations[0].index == 0);
    CHECK(v.violations[0].value == doctest::Approx(0.0));
    CHECK(v.violations[0].message.find("<= delta") != std::string::npos);
}

TEST_CASE("validate_uniform flags lambda above 1/delta") {
    auto p = scenario_a();
    p.lambda = 10.0;
    const auto v = validate_uniform(p);
    REQUIRE_FALSE(v.admissible);
    bool found = false;
    for (const auto& x : v.violations)
        if (x.coefficient == "lambda") {
            found = true;
            CHECK(x.bound == doctest::Approx(5.0));
            CHECK(x.message.find("> 1/delta = 5") != std::string::npos);
        }
    CHECK(found);
}

TEST_CASE("structural errors are distinct from admissibility") {
    auto p = ModelParams::identical(2, 1, 1, 1, 1, 0.2, 1, 1, 0, 0.2);
    p.a[0 * 2 + 1] = 1.0;
    p.a[1 * 2 + 0] = 2.0;
    CHECK_THROWS_AS(validate_uniform(p), StructuralError);
    auto q = scenario_a();
    q.d.push_back(1.0);
    CHECK_THROWS_AS(validate_uniform(q), StructuralError);
    auto r = scenario_a();
    r.a[0] = 1e6;  // diagonal is never inspected
    CHECK(validate_uniform(r).admissible);
}

TEST_CASE("reaction_w examples") {
    const auto p1 = scenario_a();
    const double w0[] = {0.0};
    CHECK(reaction_w(0, 3.7, w0, p1) == 0.0);
    const double w1[] = {0.8};
    CHECK(reaction_w(0, 0.2, w1, p1) == doctest::Approx(0.0).epsilon(1e-15));

    const auto p2 = ModelParams::identical(2, 1, 1, 1, 1, 0.2, 1, 1, 10.0, 0.2);
    const double w2[] = {0.5, 0.3};
    const double oracle = (-0.2 + 1.0 * 0.2 - 10.0 * 1.0 * 0.3) * 0.5;
    CHECK(oracle == doctest::Approx(-1.5));
    CHECK(reaction_w(0, 0.2, w2, p2) == doctest::Approx(oracle));
    CHECK_THROWS_AS(reaction_w(2, 0.2, w2, p2), std::out_of_range);
}

TEST_CASE("reaction_u examples") {
    const auto p = scenario_a();
    const double w0[] = {0.0};
    CHECK(reaction_u(0.0, w0, p) == 0.0);
    CHECK(reaction_u(1.0, w0, p) == 0.0);
    const double w1[] = {0.8};
    CHECK(reaction_u(0.2, w1, p) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("constant_single_species_state") {
    auto p = scenario_a();
    auto s = constant_single_species_state(p, 0);
    REQUIRE(s);
    CHECK(s->u == doctest::Approx(0.2));
    CHECK(s->w == doctest::Approx(0.8));
    // The pair is a root of both reactions.
    const double w[] = {s->w};
    CHECK(std::abs(reaction_w(0, s->u, w, p)) < 1e-15);
    CHECK(std::abs(reaction_u(s->u, w, p)) < 1e-15);

    p.omega[0] = 0.5;
    s = constant_single_species_state(p, 0);
    REQUIRE(s);
    CHECK(s->u == doctest::Approx(0.5));
    CHECK(s->w == doctest::Approx(0.5));

    p.omega[0] = 1.0;
    CHECK_FALSE(constant_single_species_state(p, 0).has_value());
    CHECK_THROWS_AS(constant_single_species_state(p, 1), std::out_of_range);
}

TEST_CASE("nhat_bound examples") {
    const double pi = std::numbers::pi;
    CHECK(nhat_bound_from_ratio(1.0, 1.0, 2, 0.0, NhatMode::weyl) == doctest::Approx(4.0 / pi));
    // Γ(3/2) = √π/2, (π/4)^{1/2} = √π/2, so 2 / (π/4).
    CHECK(nhat_bound_from_ratio(4.0, 1.0, 1, 0.0, NhatMode::weyl) == doctest::Approx(8.0 / pi));
    CHECK(nhat_bound_from_ratio(4.0, 1.0, 1, 0.0, NhatMode::weyl) == doctest::Approx(2.546).epsilon(1e-3));
    CHECK(nhat_bound_from_ratio(0.0, 1.0, 1, 1.0, NhatMode::faber_krahn) == 0.0);
    CHECK(nhat_bound_from_ratio(9.0, 1.0, 2, 2.0, NhatMode::faber_krahn) == doctest::Approx(18.0));
    CHECK_THROWS(nhat_bound_from_ratio(1.0, 1.0, 3, 0.0, NhatMode::weyl));
    // ratio_max of Scenario A is 0.8.
    CHECK(nhat_bound(scenario_a(), 1.0, 1, 0.0, NhatMode::weyl) ==
          doctest::Approx(std::sqrt(0.8) / (std::sqrt(pi / 4.0) * std::tgamma(1.5))));
}

TEST_CASE("derived constants") {
    const auto c = derived_constants(scenario_a());
    CHECK(c.u_cap == 1.0);
    CHECK(c.s_cap == doctest::Approx(3125.0));
    CHECK(c.wsum_cap == doctest::Approx(15625.0));
    CHECK(c.eta == 0.2 * 0.2);
    CHECK(c.ratio_max == doctest::Approx(0.8));
}

TEST_CASE("property: reactions are linear in beta and lambda") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 2.0);
    for (int t = 0; t < 200; ++t) {
        auto p = ModelParams::identical(3, 1, U(rng) + 0.2, U(rng) + 0.2, 1, U(rng) + 0.2, U(rng) + 0.2,
                                        U(rng) + 0.2, 0.0, 0.2);
        const double w[] = {U(rng), U(rng), U(rng)};
        const double u = U(rng);
        const double r0 = reaction_w(1, u, w, p);
        p.beta = 1.0;
        const double r1 = reaction_w(1, u, w, p);
        p.beta = 7.5;
        const double r75 = reaction_w(1, u, w, p);
        CHECK(r75 == doctest::Approx(r0 + 7.5 * (r1 - r0)).epsilon(1e-12));

        p.lambda = 0.0;
        const double q0 = reaction_u(u, w, p);
        p.lambda = 1.0;
        const double q1 = reaction_u(u, w, p);
        p.lambda = 3.25;
        CHECK(reaction_u(u, w, p) == doctest::Approx(q0 + 3.25 * (q1 - q0)).epsilon(1e-12));
    }
}

TEST_CASE("property: admissible constant states are positive and below the cap") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.2, 5.0);
    int seen = 0;
    for (int t = 0; t < 2000 && seen < 200; ++t) {
        auto p = ModelParams::identical(1, 1, U(rng), U(rng), U(rng), U(rng), U(rng), 1, 0, 0.2);
        if (!validate_uniform(p).admissible) continue;
        ++seen;
        const auto s = constant_single_species_state(p, 0);
        REQUIRE(s);
        CHECK(s->u > 0.0);
        CHECK(s->u <= p.lambda / p.mu);
        CHECK(s->w > p.delta / (p.k[0] * p.k[0]));
    }
    CHECK(seen == 200);
}

TEST_CASE("property: weyl bound is monotone in ratio and measure") {
    for (int dim : {1, 2}) {
        double prev = -1.0;
        for (double r = 0.0; r <= 10.0; r += 0.25) {
            const double v = nhat_bound_from_ratio(r, 1.0, dim, 0.0, NhatMode::weyl);
            CHECK(v >= prev);
            prev = v;
        }
        prev = -1.0;
        for (double m = 0.1; m <= 10.0; m += 0.3) {
            const double v = nhat_bound_from_ratio(2.0, m, dim, 0.0, NhatMode::weyl);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("property: permuting components permutes reaction_w") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.2, 3.0);
    ModelParams p;
    p.n = 4;
    p.beta = 5.0;
    p.d.clear();
    p.omega.clear();
    p.k.clear();
    for (std::size_t i = 0; i < 4; ++i) {
        p.d.push_back(U(rng));
        p.omega.push_back(U(rng));
        p.k.push_back(U(rng));
    }
    p.a.assign(16, 0.0);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) p.a[i * 4 + j] = p.a[j * 4 + i] = U(rng);
    const std::size_t perm[] = {2, 0, 3, 1};
    const auto q = permuted(p, perm);
    const double w[] = {0.3, 0.7, 0.1, 0.9};
    double wp[4];
    for (std::size_t c = 0; c < 4; ++c) wp[c] = w[perm[c]];
    for (std::size_t c = 0; c < 4; ++c)
        CHECK(reaction_w(c, 0.4, wp, q) == doctest::Approx(reaction_w(perm[c], 0.4, w, p)).epsilon(1e-14));
    CHECK(reaction_u(0.4, wp, q) == doctest::Approx(reaction_u(0.4, w, p)).epsilon(1e-14));
    CHECK(params_hash(p) != params_hash(q));
    CHECK(params_hash(p) == params_hash(permuted(q, std::array<std::size_t, 4>{1, 3, 0, 2})));
}

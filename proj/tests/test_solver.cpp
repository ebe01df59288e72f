#include <doctest.h>

#include "strongcomp/analysis.hpp"
#include "strongcomp/scenarios.hpp"
#include "strongcomp/solver.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace strongcomp;

namespace {

FieldSet random_state(const Grid& g, std::size_t n, std::mt19937_64& rng, double amp = 1.0) {
    std::uniform_real_distribution<double> U(0.0, amp);
    FieldSet s(g, n);
    for (auto& v : s.u.values) v = U(rng);
    for (auto& f : s.w)
        for (auto& v : f.values) v = U(rng);
    return s;
}

double sup_diff(const FieldSet& a, const FieldSet& b) {
    double m = 0.0;
    for (std::size_t q = 0; q < a.u.size(); ++q) m = std::max(m, std::abs(a.u[q] - b.u[q]));
    for (std::size_t i = 0; i < a.n(); ++i)
        for (std::size_t q = 0; q < a.u.size(); ++q) m = std::max(m, std::abs(a.w[i][q] - b.w[i][q]));
    return m;
}

FieldSet equilibrium_a(const Grid& g) {
    const double w[] = {0.8};
    return FieldSet::constant(g, 0.2, w);
}

}  // namespace

TEST_CASE("imex_step keeps the zero state") {
    for (const Grid& g : {Grid::interval(1.0, 21), Grid::rectangle(1.0, 1.0, 9, 9)}) {
        for (double beta : {0.0, 1e3, 1e6}) {
            const auto p = ModelParams::identical(3, 1, 1, 1, 1, 0.2, 1, 1, beta, 0.2);
            for (double tau : {1e-3, 0.5, 10.0}) {
                const auto next = imex_step(FieldSet(g, 3), p, tau);
                CHECK(next.sup() == 0.0);
            }
        }
    }
}

TEST_CASE("imex_step fixes the Scenario A constant equilibrium") {
    const auto p = scenarios::a_params();
    for (const Grid& g : {Grid::interval(1.0, 201), Grid::rectangle(1.0, 1.0, 21, 21)}) {
        const auto s = equilibrium_a(g);
        CHECK(sup_diff(imex_step(s, p, 0.5), s) <= 1e-10);
    }
}

TEST_CASE("imex_step is exactly nonnegative at beta = 1e6") {
    std::mt19937_64 rng(42);
    const auto p = ModelParams::identical(4, 1, 1, 1, 1, 0.2, 1, 1, 1e6, 0.2);
    for (const Grid& g : {Grid::interval(2.0, 101), Grid::rectangle(1.0, 1.0, 25, 25)}) {
        for (int t = 0; t < 5; ++t) {
            auto s = random_state(g, 4, rng);
            for (int step = 0; step < 5; ++step) {
                s = imex_step(s, p, 0.1);
                CHECK(s.min() >= 0.0);
            }
        }
    }
}

TEST_CASE("imex_step reports an inner solve failure") {
    std::mt19937_64 rng(1);
    const Grid g = Grid::rectangle(1.0, 1.0, 31, 31);
    const auto s = random_state(g, 1, rng);
    CHECK_THROWS_AS(imex_step(s, scenarios::a_params(), 10.0, LinearSolveOptions{1e-14, 1}), LinearSolveError);
}

TEST_CASE("march_to_steady examples") {
    const auto p = scenarios::a_params();
    const Grid g = scenarios::a_grid();

    const auto fixed = march_to_steady(equilibrium_a(g), p, SolveSettings{});
    CHECK(fixed.converged);
    CHECK(fixed.steps_taken <= 2);
    CHECK(fixed.residual_sup <= 1e-8);

    const auto zero = march_to_steady(FieldSet(g, 1), p, SolveSettings{});
    CHECK(zero.converged);
    CHECK(zero.residual_sup == 0.0);
    CHECK(zero.state.sup() == 0.0);

    const auto r = march_to_steady(scenarios::a_initial(), p, SolveSettings{});
    CHECK(r.converged);
    CHECK(r.residual_sup <= 1e-8);
    double dist = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q)
        dist = std::max({dist, std::abs(r.state.u[q] - 0.2), std::abs(r.state.w[0][q] - 0.8)});
    CHECK(dist <= 1e-6);
    CHECK(r.state.params_hash == params_hash(p));
}

TEST_CASE("march_to_steady rejects bad input") {
    const auto p = scenarios::a_params();
    auto s = scenarios::a_initial();
    s.u[3] = -1e-3;
    CHECK_THROWS_AS(march_to_steady(s, p, SolveSettings{}), std::invalid_argument);
    SolveSettings bad;
    bad.tau = 0.0;
    CHECK_THROWS_AS(march_to_steady(scenarios::a_initial(), p, bad), std::invalid_argument);
}

TEST_CASE("march_to_steady detects blow-up") {
    // Far outside the bounds: explicit growth k·u·τ inflates w past the guard in one step.
    const auto p = ModelParams::identical(1, 1, 1, 1, 1, 0.2, 1, 1, 0, 0.99);
    const double w[] = {1.0};
    const auto s = FieldSet::constant(Grid::interval(1.0, 11), 1e6, w);
    const double guard = 10.0 * (std::pow(0.99, -6.0) + 1.0);
    try {
        march_to_steady(s, p, SolveSettings{});
        FAIL("expected blow-up");
    } catch (const BlowUpError& e) {
        CHECK(std::string(e.what()).find("blow-up suspected") != std::string::npos);
        CHECK(e.step == 1);
        CHECK(e.sup > guard);
    }
}

TEST_CASE("residual_norm examples") {
    const auto p = scenarios::a_params();
    const Grid g = scenarios::a_grid();
    CHECK(residual_norm(equilibrium_a(g), p) <= 1e-15);
    CHECK(residual_norm(FieldSet(g, 1), p) == 0.0);

    auto s = equilibrium_a(g);
    for (auto& v : s.u.values) v += 0.01;
    const auto f = residual_fields(s, p);
    // u line: (λ − μ(u+ε) − k w)(u+ε) = (−0.01)(0.21); w line: (−ω + k(u+ε)) w = 0.01·0.8.
    for (std::size_t q = 0; q < g.size(); ++q) {
        CHECK(f[1][q] == doctest::Approx(-0.0021).epsilon(1e-9));
        CHECK(f[0][q] == doctest::Approx(0.008).epsilon(1e-9));
    }
    CHECK(residual_norm(s, p) == doctest::Approx(0.008).epsilon(1e-9));
}

TEST_CASE("newton_refine examples") {
    const auto p = scenarios::a_params();
    const Grid g = scenarios::a_grid();
    SolveSettings st;
    st.tol_residual = 1e-12;

    const auto at = newton_refine(equilibrium_a(g), p, st);
    CHECK(at.newton_iterations == 0);
    CHECK(at.converged);

    auto s = equilibrium_a(g);
    for (auto& v : s.u.values) v += 1e-3;
    const auto r = newton_refine(s, p, st);
    CHECK(r.converged);
    CHECK(r.residual_sup <= 1e-12);
    CHECK(r.newton_iterations <= 5);
    CHECK(sup_diff(r.state, equilibrium_a(g)) <= 1e-10);

    const auto z = newton_refine(FieldSet(g, 1), p, st);
    CHECK(z.newton_iterations == 0);
    CHECK(z.state.sup() == 0.0);
}

TEST_CASE("newton_refine polishes a spatially varying 2-species state") {
    const auto p = scenarios::b_params(100.0);
    SolveSettings coarse = scenarios::b_settings();
    coarse.tol_residual = 1e-4;
    coarse.tol_update = 1e-4;
    const auto marched = march_to_steady(scenarios::b_initial(), p, coarse);
    SolveSettings fine = coarse;
    fine.tol_residual = 1e-11;
    const auto r = newton_refine(marched.state, p, fine);
    CHECK(r.converged);
    CHECK(r.residual_sup <= 1e-11);
    CHECK(r.state.min() >= 0.0);
}

TEST_CASE("continue_in_beta examples") {
    const auto p = scenarios::b_params();
    const auto st = scenarios::b_settings();
    const auto init = scenarios::b_initial();

    const double one[] = {100.0};
    const auto t1 = continue_in_beta(init, p, one, st, "single");
    const auto direct = march_to_steady(init, scenarios::b_params(100.0), st);
    REQUIRE(t1.reports.size() == 1);
    CHECK(t1.provenance == "single");
    CHECK(t1.reports[0].steps_taken == direct.steps_taken);
    CHECK(sup_diff(t1.reports[0].state, direct.state) == 0.0);

    const double betas[] = {10.0, 100.0, 1000.0, 10000.0};
    const auto tr = continue_in_beta(init, p, betas, st);
    double prev = INFINITY;
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(tr.reports[k].converged);
        const auto seg = segregation_report(tr.reports[k].state, scenarios::b_params(betas[k]));
        CHECK(seg.product_sup < prev);
        prev = seg.product_sup;
    }

    // β = 0 from an asymmetric start: only convergence is asserted.
    FieldSet asym = init;
    for (auto& v : asym.w[1].values) v *= 0.5;
    const double zero[] = {0.0};
    const auto t0 = continue_in_beta(asym, p, zero, st);
    CHECK(t0.reports[0].converged);

    const double bad[] = {10.0, 10.0};
    CHECK_THROWS_AS(continue_in_beta(init, p, bad, st), std::invalid_argument);
    CHECK_THROWS_AS(continue_in_beta(init, p, std::span<const double>{}, st), std::invalid_argument);
}

TEST_CASE("continue_in_beta keeps non-converged entries") {
    SolveSettings st = scenarios::b_settings();
    st.max_steps = 3;
    const double betas[] = {10.0, 100.0};
    const auto tr = continue_in_beta(scenarios::b_initial(), scenarios::b_params(), betas, st);
    REQUIRE(tr.reports.size() == 2);
    CHECK_FALSE(tr.reports[0].converged);
    CHECK_FALSE(tr.reports[1].converged);
    CHECK(tr.reports[1].steps_taken == 3);
}

TEST_CASE("property: positivity after every step") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 6; ++t) {
        const std::size_t n = 1 + t % 4;
        const auto p = scenarios::random_admissible(n, t % 2 ? 1e4 : 10.0, 500 + t);
        const Grid g = t < 3 ? Grid::interval(1.0, 81) : Grid::rectangle(1.0, 1.0, 15, 15);
        SolveSettings st;
        st.max_steps = 300;
        bool ok = true;
        march_to_steady(random_state(g, n, rng), p, st, [&](const FieldSet& s, std::size_t) {
            ok = ok && s.min() >= 0.0;
        });
        CHECK(ok);
    }
}

TEST_CASE("property: converged u stays below lambda/mu") {
    std::mt19937_64 rng(23);
    const Grid g = Grid::interval(1.0, 101);
    for (int t = 0; t < 12; ++t) {
        const std::size_t n = 1 + t % 3;
        const auto p = scenarios::random_admissible(n, 10.0, 900 + t);
        auto s = random_state(g, n, rng);
        for (auto& v : s.u.values) v *= p.lambda / p.mu;
        SolveSettings st;
        st.tol_residual = 1e-7;
        st.tol_update = 1e-9;
        const auto r = march_to_steady(s, p, st);
        REQUIRE(r.converged);
        CHECK(r.state.u.max() <= p.lambda / p.mu + 1e-6);
    }
}

TEST_CASE("property: step consistency as tau -> 0") {
    const auto p = scenarios::b_params(10.0);
    const Grid g = Grid::interval(4.0, 81);
    const double pi = std::numbers::pi;
    FieldSet s(g, 2);
    for (std::size_t q = 0; q < g.size(); ++q) {
        const double c = std::cos(pi * g.coord(q, 0) / 4.0);
        s.u[q] = 0.6 + 0.2 * c;
        s.w[0][q] = 0.3 * (1.0 + c);
        s.w[1][q] = 0.2 * (1.0 - c) + 0.05 * (1.0 + std::cos(2.0 * pi * g.coord(q, 0) / 4.0));
    }
    const auto F = residual_fields(s, p);
    std::vector<double> dev;
    for (double tau : {1e-2, 1e-3, 1e-4}) {
        const auto next = imex_step(s, p, tau);
        double m = 0.0;
        for (std::size_t q = 0; q < g.size(); ++q) {
            m = std::max(m, std::abs((next.u[q] - s.u[q]) / tau - F[2][q]));
            for (std::size_t i = 0; i < 2; ++i)
                m = std::max(m, std::abs((next.w[i][q] - s.w[i][q]) / tau - F[i][q]));
        }
        dev.push_back(m);
    }
    CHECK(dev[0] / dev[1] == doctest::Approx(10.0).epsilon(0.2));
    CHECK(dev[1] / dev[2] == doctest::Approx(10.0).epsilon(0.2));
}

TEST_CASE("property: permutation equivariance of a continuation trace") {
    std::mt19937_64 rng(31);
    ModelParams p = scenarios::random_admissible(3, 0.0, 77);
    const Grid g = Grid::interval(2.0, 81);
    const auto init = random_state(g, 3, rng, 0.5);
    const std::size_t perm[] = {2, 0, 1};
    const double betas[] = {1.0, 10.0, 100.0};
    SolveSettings st;
    st.tol_residual = 1e-7;
    st.tol_update = 1e-9;
    const auto a = continue_in_beta(init, p, betas, st);
    const auto b = continue_in_beta(permuted(init, perm), permuted(p, perm), betas, st);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto expect = permuted(a.reports[k].state, perm);
        CHECK(sup_diff(expect, b.reports[k].state) <= 1e-9);
        CHECK(a.reports[k].converged == b.reports[k].converged);
    }
}

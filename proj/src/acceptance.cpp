#include "strongcomp/acceptance.hpp"

#include "strongcomp/analysis.hpp"
#include "strongcomp/io.hpp"
#include "strongcomp/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>

namespace strongcomp {

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

double sup_distance_to_constant(const FieldSet& s, const ConstantState& c) {
    double m = 0.0;
    for (double v : s.u.values) m = std::max(m, std::abs(v - c.u));
    for (double v : s.w[0].values) m = std::max(m, std::abs(v - c.w));
    return m;
}

struct Outcome {
    bool pass;
    std::string detail;
};

Outcome constant_equilibrium() {
    const auto p = scenarios::a_params();
    const auto oracle = *constant_single_species_state(p, 0);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = march_to_steady(scenarios::a_initial(), p, SolveSettings{});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double dist = sup_distance_to_constant(r.state, oracle);
    const bool pass = r.converged && r.residual_sup <= 1e-8 && dist <= 1e-6 && secs < 5.0;
    return {pass, fmt("residual %.2e, distance to (%.1f, %.1f) %.2e, %zu steps, %.2f s",
                      r.residual_sup, oracle.u, oracle.w, dist, r.steps_taken, secs)};
}

Outcome linf_suite() {
    const double betas[] = {1.0, 10.0, 1e2, 1e3};
    const Grid g = Grid::interval(1.0, 201);
    SolveSettings st;
    st.tau = 0.5;
    st.tol_residual = 1e-6;
    st.tol_update = 1e-8;
    const double pi = std::numbers::pi;
    std::size_t failures = 0, unconverged = 0;
    double worst_u = -1e300, worst_s = 0.0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + t % 8;
        const auto p = scenarios::random_admissible(n, betas[(t / 8) % 4], 1000 + t);
        FieldSet s(g, n);
        std::mt19937_64 rng(77 + t);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t q = 0; q < g.size(); ++q)
            s.u[q] = 0.5 * p.lambda / p.mu * (1.0 + 0.5 * std::cos(pi * g.coord(q, 0)));
        for (std::size_t i = 0; i < n; ++i) {
            const double phase = 3.0 * unit(rng);
            const double freq = 1.0 + static_cast<double>(i % 3);
            for (std::size_t q = 0; q < g.size(); ++q)
                s.w[i][q] = 0.5 * (1.0 + std::cos(pi * (freq * g.coord(q, 0) + phase)));
        }
        const auto r = march_to_steady(s, p, st);
        if (!r.converged || r.residual_sup > 1e-6) {
            ++unconverged;
            continue;
        }
        const auto b = check_linf_bounds(r.state, p);
        worst_u = std::max(worst_u, b.u_max - b.u_cap);
        worst_s = std::max(worst_s, b.s_max / b.s_cap);
        if (b.u_max > b.u_cap + 1e-6 || b.s_max > b.s_cap || b.u_min < 0.0) ++failures;
    }
    return {failures == 0 && unconverged == 0,
            fmt("50 sets, %zu unconverged, %zu bound failures, max(u - lambda/mu) %.3g, "
                "max S/cap %.3g",
                unconverged, failures, worst_u, worst_s)};
}

// Shared Scenario B trace over β = 10 … 1e5.
struct ScenarioB {
    ModelParams params = scenarios::b_params();
    ContinuationTrace trace;

    ScenarioB() {
        const auto betas = scenarios::b_betas();
        trace = continue_in_beta(scenarios::b_initial(), params, betas, scenarios::b_settings(),
                                 "mirror Gaussian bumps");
    }
    std::size_t index(double beta) const {
        for (std::size_t k = 0; k < trace.betas.size(); ++k)
            if (trace.betas[k] == beta) return k;
        throw std::logic_error("beta not in trace");
    }
    const FieldSet& at(double beta) const { return trace.reports[index(beta)].state; }
    ModelParams params_at(double beta) const {
        ModelParams p = params;
        p.beta = beta;
        return p;
    }
    bool converged() const {
        for (const auto& r : trace.reports)
            if (!r.converged) return false;
        return true;
    }
};

Outcome segregation(const ScenarioB& b) {
    const double betas[] = {10.0, 1e2, 1e3, 1e4};
    std::vector<double> prod, scaled;
    for (double beta : betas) {
        const auto seg = segregation_report(b.at(beta), b.params_at(beta));
        prod.push_back(seg.product_sup);
        scaled.push_back(seg.scaled_at(0, 1));
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < prod.size(); ++k) decreasing = decreasing && prod[k] < prod[k - 1];
    const bool shrink = prod.back() <= 0.02 * prod.front();
    bool bounded = true;
    for (std::size_t k = 1; k < scaled.size(); ++k) bounded = bounded && scaled[k] <= 3.0 * scaled[1];
    return {b.converged() && decreasing && shrink && bounded,
            fmt("sup w1w2 %.3e -> %.3e (ratio %.4f), beta*int w1w2 %.4f..%.4f, converged %d",
                prod.front(), prod.back(), prod.back() / prod.front(),
                *std::min_element(scaled.begin() + 1, scaled.end()),
                *std::max_element(scaled.begin() + 1, scaled.end()), b.converged())};
}

Outcome holder_control(const ScenarioB& b) {
    bool pass = b.converged();
    std::string detail;
    for (std::size_t i = 0; i < 2; ++i) {
        const double h2 = holder_seminorm(b.at(1e2).w[i], 0.5);
        const double h4 = holder_seminorm(b.at(1e4).w[i], 0.5);
        pass = pass && h4 <= 3.0 * h2;
        detail += fmt("%sw%zu %.4f -> %.4f", i ? ", " : "", i + 1, h2, h4);
    }
    return {pass, detail + " (alpha 0.5, beta 1e2 -> 1e4)"};
}

Outcome faber_krahn(const ScenarioB& b) {
    const FieldSet& s = b.at(1e4);
    const double theta = default_threshold(s);
    const auto recs = faber_krahn_check(s, b.params_at(1e4), theta);
    bool pass = b.converged();
    std::size_t survivors = 0;
    std::string detail = fmt("theta %.3g", theta);
    for (const auto& r : recs) {
        if (r.skipped) continue;
        ++survivors;
        pass = pass && r.pass;
        detail += fmt(", lambda1(w%zu) %.4f vs 1.1*%.2f", r.component + 1, r.lambda1, r.cap);
    }
    return {pass && survivors > 0, detail};
}

Outcome decay(const ScenarioB& b) {
    ContinuationTrace sub;
    for (double beta : {1e2, 1e3, 1e4, 1e5}) {
        sub.betas.push_back(beta);
        sub.reports.push_back(b.trace.reports[b.index(beta)]);
    }
    const FieldSet& first = sub.reports.front().state;
    const Grid& g = first.grid();
    std::size_t peak = 0;
    for (std::size_t q = 0; q < g.size(); ++q)
        if (first.w[0][q] > first.w[0][peak]) peak = q;
    const double center[] = {g.coord(peak, 0)};
    const double rho = 0.2;
    const auto fit = decay_fit(sub, b.params, 0, center, rho);
    const bool drop = fit.sup_h.back() <= 0.1 * fit.sup_h.front();
    const bool pass = b.converged() && (fit.fully_segregated || (fit.slope < 0.0 && fit.r_squared >= 0.9)) && drop;
    return {pass, fmt("center x=%.3f rho %.2f, slope %.4f, R^2 %.4f, sup_h %.3e -> %.3e", center[0],
                      rho, fit.slope, fit.r_squared, fit.sup_h.front(), fit.sup_h.back())};
}

Outcome complementarity(const ScenarioB& b) {
    const FieldSet& s = b.at(1e4);
    const auto rep = complementarity_check(s, b.params_at(1e4), cosine_test_functions(s.grid(), 20));
    return {b.converged() && rep.pass,
            fmt("%zu inequalities, worst margin %.3e, worst margin/tol %.3g", rep.entries.size(),
                rep.worst_margin, rep.worst_relative)};
}

Outcome isolation() {
    SolveSettings st;
    try {
        const auto rep = zero_isolation_probe(scenarios::a_params(), scenarios::a_grid(), 20, 2024, st);
        std::size_t zero = 0, escaped = 0, other = 0;
        for (const auto& t : rep.trials) {
            if (t.outcome == IsolationOutcome::zero)
                ++zero;
            else if (t.outcome == IsolationOutcome::escaped)
                ++escaped;
            else
                ++other;
        }
        return {rep.violations == 0,
                fmt("20 trials: %zu zero, %zu escaped, %zu not converged, 0 violated", zero, escaped, other)};
    } catch (const IsolationViolated& e) {
        return {false, fmt("%zu of 20 trials violated isolation", e.report.violations)};
    }
}

Outcome survivors() {
    const std::size_t n = 10;
    const double betas[] = {10.0, 1e2, 1e3, 1e4};
    SolveSettings st;
    st.tau = 0.1;
    bool pass = true;
    std::string detail;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto p = scenarios::packed_params(n);
        const auto tr = continue_in_beta(scenarios::packed_initial(n, seed), p, betas, st);
        const FieldSet& s = tr.reports.back().state;
        const auto rep = survivor_count(s, scenarios::packed_params(n, 1e4), 0.01);
        const auto sa = support_and_nodal(s, 0.01);
        std::size_t shared = 0;
        for (std::size_t q = 0; q < s.u.size(); ++q) {
            int c = 0;
            for (const auto& m : sa.supports) c += m[q] ? 1 : 0;
            if (c > 1) ++shared;
        }
        double extinct_max = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!(s.w[i].sup() > 0.01)) extinct_max = std::max(extinct_max, s.w[i].sup());
        pass = pass && tr.reports.back().converged && shared == 0 && extinct_max <= 0.01;
        detail += fmt("%sseed %llu: %zu survivors (Weyl N^ %.2f), shared nodes %zu, max extinct sup %.1e",
                      detail.empty() ? "" : "; ", static_cast<unsigned long long>(seed), rep.count,
                      rep.nhat_weyl, shared, extinct_max);
    }
    return {pass, detail};
}

Outcome kernels() {
    const double pi = std::numbers::pi;
    auto lap_error = [&](std::size_t nodes) {
        const Grid g = Grid::interval(1.0, nodes);
        ScalarField f(g);
        for (std::size_t q = 0; q < g.size(); ++q) f[q] = std::cos(pi * g.coord(q, 0));
        const auto out = laplacian_neumann(f, 1.0);
        double e = 0.0;
        for (std::size_t q = 0; q < g.size(); ++q) e = std::max(e, std::abs(out[q] + pi * pi * f[q]));
        return e;
    };
    const double ratio = lap_error(101) / lap_error(201);

    const Grid g = Grid::interval(1.0, 201);
    SupportMask interior(g);
    for (std::size_t q = 1; q + 1 < g.size(); ++q) interior.set(q, true);
    const double l1 = lambda1_restricted(interior, g);
    const double l1_err = std::abs(l1 - pi * pi) / (pi * pi);

    double lin_err = 0.0;
    for (std::size_t nodes : {3u, 4u, 101u, 201u}) {
        const Grid gl = Grid::interval(1.0, nodes);
        ScalarField f(gl);
        for (std::size_t q = 0; q < gl.size(); ++q) f[q] = gl.coord(q, 0);
        lin_err = std::max(lin_err, std::abs(integrate(f) - 0.5));
    }

    const auto p = scenarios::a_params();
    const auto solved = march_to_steady(scenarios::a_initial(), p, SolveSettings{}).state;
    SnapshotMeta meta{p, 0.0, residual_norm(solved, p), "unset"};
    const Snapshot back = snapshot_from_string(snapshot_to_string(solved, meta));
    bool exact = back.state.u.values == solved.u.values && back.state.n() == solved.n() &&
                 back.meta.residual == meta.residual && back.state.grid() == solved.grid();
    for (std::size_t i = 0; exact && i < solved.n(); ++i) exact = back.state.w[i].values == solved.w[i].values;

    const bool pass = ratio >= 3.5 && ratio <= 4.5 && l1_err <= 0.01 && lin_err <= 1e-15 && exact;
    return {pass, fmt("laplacian error ratio %.4f, Dirichlet lambda1 %.5f (rel err %.2e), "
                      "trapezoid error on x %.1e, snapshot round trip %s",
                      ratio, l1, l1_err, lin_err, exact ? "exact" : "inexact")};
}

}  // namespace

std::string format_result(const CriterionResult& r) {
    return fmt("%s [%d] %s: %s (%.2f s)", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
               r.detail.c_str(), r.seconds);
}

std::vector<CriterionResult> run_acceptance(const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<CriterionResult> results;
    std::optional<ScenarioB> b;
    auto run = [&](int id, const char* name, const std::function<Outcome()>& check) {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        r.id = id;
        r.name = name;
        try {
            const Outcome o = check();
            r.pass = o.pass;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_result) on_result(r);
        results.push_back(std::move(r));
    };
    auto scenario_b = [&]() -> const ScenarioB& {
        if (!b) b.emplace();
        return *b;
    };

    run(1, "constant-equilibrium recovery", constant_equilibrium);
    run(2, "L-infinity bound suite", linf_suite);
    run(3, "segregation along continuation", [&] { return segregation(scenario_b()); });
    run(4, "uniform Holder control", [&] { return holder_control(scenario_b()); });
    run(5, "Faber-Krahn inequality", [&] { return faber_krahn(scenario_b()); });
    run(6, "exponential decay", [&] { return decay(scenario_b()); });
    run(7, "complementarity", [&] { return complementarity(scenario_b()); });
    run(8, "zero isolation", isolation);
    run(9, "survivor dichotomy", survivors);
    run(10, "numerical kernel validation", kernels);
    return results;
}

}  // namespace strongcomp

#include "strongcomp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace strongcomp {

BoundReport check_linf_bounds(const FieldSet& state, const ModelParams& p) {
    const auto c = derived_constants(p);
    BoundReport r;
    r.u_cap = c.u_cap;
    r.s_cap = c.s_cap;
    r.wsum_cap = c.wsum_cap;
    r.u_min = state.u.min();
    r.u_max = state.u.max();
    r.s_max = -std::numeric_limits<double>::infinity();
    r.wsum_min = std::numeric_limits<double>::infinity();
    r.wsum_max = -std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < state.u.size(); ++q) {
        double s = p.D * state.u[q];
        double wsum = 0.0;
        for (std::size_t i = 0; i < state.n(); ++i) {
            s += p.d[i] * state.w[i][q];
            wsum += state.w[i][q];
        }
        r.s_max = std::max(r.s_max, s);
        r.wsum_min = std::min(r.wsum_min, wsum);
        r.wsum_max = std::max(r.wsum_max, wsum);
    }
    r.u_lower_pass = r.u_min >= 0.0;
    r.u_upper_pass = r.u_max <= r.u_cap * (1.0 + 1e-6);
    r.s_pass = r.s_max <= r.s_cap * (1.0 + 1e-6);
    r.wsum_lower_pass = r.wsum_min >= 0.0;
    r.wsum_upper_pass = r.wsum_max <= r.wsum_cap * (1.0 + 1e-6);
    return r;
}

double holder_seminorm(const ScalarField& field, double alpha, std::size_t max_pairs) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("holder_seminorm: alpha must lie in (0,1)");
    const Grid& g = field.grid;
    const std::size_t n = field.size();
    std::vector<std::array<double, 2>> pts(n);
    for (std::size_t q = 0; q < n; ++q) pts[q] = g.point(q);

    auto ratio = [&](std::size_t i, std::size_t j) {
        const double dx = pts[i][0] - pts[j][0];
        const double dy = pts[i][1] - pts[j][1];
        const double dist = std::sqrt(dx * dx + dy * dy);
        return std::abs(field[i] - field[j]) / std::pow(dist, alpha);
    };

    double best = 0.0;
    if (n * n <= max_pairs) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, ratio(i, j));
        return best;
    }
    // Stratified over the first node, uniform over the second.
    std::mt19937_64 rng(0x5eedc0ffeeULL);
    std::uniform_int_distribution<std::size_t> pick(0, n - 2);
    for (std::size_t s = 0; s < max_pairs; ++s) {
        const std::size_t i = (s * n) / max_pairs;
        std::size_t j = pick(rng);
        if (j >= i) ++j;
        best = std::max(best, ratio(i, j));
    }
    return best;
}

double weighted_sum_holder(const FieldSet& state, std::span<const double> weights,
                           const ModelParams& p, double alpha, std::size_t max_pairs) {
    if (weights.size() != state.n())
        throw std::invalid_argument("weighted_sum_holder: one weight per component required");
    for (double v : weights)
        if (v < p.delta || v > 1.0 / p.delta)
            throw AdmissibilityError("weighted_sum_holder: weight outside [delta, 1/delta]");
    ScalarField sum(state.grid());
    for (std::size_t i = 0; i < state.n(); ++i)
        for (std::size_t q = 0; q < sum.size(); ++q) sum[q] += weights[i] * state.w[i][q];
    return holder_seminorm(sum, alpha, max_pairs);
}

SegregationReport segregation_report(const FieldSet& state, const ModelParams& p) {
    const std::size_t n = state.n();
    const auto wq = state.grid().quadrature_weights();
    SegregationReport r;
    r.n = n;
    r.beta = p.beta;
    r.overlap.assign(n * n, 0.0);
    r.scaled_overlap.assign(n * n, 0.0);
    r.interaction_mass.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t q = 0; q < wq.size(); ++q) {
                const double prod = state.w[i][q] * state.w[j][q];
                s += wq[q] * prod;
                r.product_sup = std::max(r.product_sup, prod);
            }
            r.overlap[i * n + j] = r.overlap[j * n + i] = s;
            r.scaled_overlap[i * n + j] = r.scaled_overlap[j * n + i] = p.beta * s;
        }
    for (std::size_t i = 0; i < n; ++i) {
        double m = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) m += p.interaction(i, j) * r.overlap[i * n + j];
        r.interaction_mass[i] = p.beta * m;
    }
    return r;
}

double default_threshold(const FieldSet& state) {
    double m = 0.0;
    for (const auto& f : state.w) m = std::max(m, f.sup());
    return 0.01 * m;
}

SupportAnalysis support_and_nodal(const FieldSet& state, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("support_and_nodal: threshold must be positive");
    const Grid& g = state.grid();
    const auto wq = g.quadrature_weights();
    SupportAnalysis r;
    r.threshold = threshold;
    r.nodal = SupportMask(g, true);
    for (const auto& f : state.w) {
        SupportMask m(g);
        double meas = 0.0;
        for (std::size_t q = 0; q < g.size(); ++q)
            if (f[q] > threshold) {
                m.set(q, true);
                r.nodal.set(q, false);
                meas += wq[q];
            }
        r.supports.push_back(std::move(m));
        r.measures.push_back(meas);
    }
    for (std::size_t q = 0; q < g.size(); ++q)
        if (r.nodal[q]) r.nodal_measure += wq[q];
    return r;
}

FaberKrahnRecord faber_krahn_on_mask(const SupportMask& mask, const ModelParams& p,
                                     std::size_t i) {
    FaberKrahnRecord rec;
    rec.component = i;
    rec.cap = p.surplus(i) / (p.d[i] * p.mu);
    if (mask.count() == 0) {
        rec.skipped = true;
        return rec;
    }
    rec.lambda1 = lambda1_restricted(mask, mask.grid);
    rec.pass = rec.lambda1 <= faber_krahn_allowance * rec.cap;
    return rec;
}

std::vector<FaberKrahnRecord> faber_krahn_check(const FieldSet& state, const ModelParams& p,
                                                double threshold) {
    const auto sup = support_and_nodal(state, threshold);
    std::vector<FaberKrahnRecord> out;
    for (std::size_t i = 0; i < state.n(); ++i)
        out.push_back(faber_krahn_on_mask(sup.supports[i], p, i));
    return out;
}

DecayFit fit_log_decay(std::span<const double> betas, std::span<const double> sup_h) {
    if (betas.size() != sup_h.size() || betas.size() < 3)
        throw std::invalid_argument("decay fit needs at least 3 (beta, sup_h) samples");
    DecayFit fit;
    fit.betas.assign(betas.begin(), betas.end());
    fit.sup_h.assign(sup_h.begin(), sup_h.end());
    if (std::any_of(sup_h.begin(), sup_h.end(), [](double v) { return !(v > 0.0); })) {
        fit.fully_segregated = true;
        fit.slope = -std::numeric_limits<double>::infinity();
        fit.intercept = 0.0;
        fit.r_squared = 0.0;
        return fit;
    }
    const std::size_t n = betas.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t k = 0; k < n; ++k) {
        xs[k] = std::sqrt(betas[k]);
        ys[k] = std::log(sup_h[k]);
        mx += xs[k];
        my += ys[k];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("decay fit needs distinct beta values");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double e = ys[k] - (fit.intercept + fit.slope * xs[k]);
        sse += e * e;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return fit;
}

DecayFit decay_fit(const ContinuationTrace& trace, const ModelParams& p, std::size_t component,
                   std::span<const double> center, double rho, double presence_threshold) {
    if (trace.reports.size() < 3)
        throw std::invalid_argument("decay_fit: trace needs at least 3 entries");
    if (component >= p.n) throw std::out_of_range("decay_fit: component index");
    const Grid& g = trace.reports.front().state.grid();
    const auto ball = ball_nodes(g, center, 0.5 * rho);
    const std::size_t c_node = nearest_node(g, center);
    std::vector<double> sup_h;
    for (std::size_t b = 0; b < trace.reports.size(); ++b) {
        const FieldSet& s = trace.reports[b].state;
        if (s.w[component][c_node] < 10.0 * presence_threshold) {
            std::ostringstream os;
            os << "decay_fit: component " << component + 1 << " below 10*threshold at center for beta "
               << trace.betas[b];
            throw PreconditionError(os.str());
        }
        double m = 0.0;
        for (std::size_t q = 0; q < g.size(); ++q) {
            if (!ball[q]) continue;
            double h = 0.0;
            for (std::size_t j = 0; j < s.n(); ++j)
                if (j != component) h += p.d[j] * s.w[j][q];
            m = std::max(m, h);
        }
        sup_h.push_back(m);
    }
    DecayFit fit = fit_log_decay(trace.betas, sup_h);
    fit.center.assign(center.begin(), center.end());
    fit.rho = rho;
    return fit;
}

std::vector<ScalarField> cosine_test_functions(const Grid& g, std::size_t count) {
    std::vector<std::pair<std::size_t, std::size_t>> modes;
    if (g.dim() == 1) {
        for (std::size_t m = 1; modes.size() < count; ++m) modes.emplace_back(m, 0);
    } else {
        for (std::size_t total = 1; modes.size() < count; ++total)
            for (std::size_t mx = 0; mx <= total && modes.size() < count; ++mx)
                modes.emplace_back(mx, total - mx);
    }
    std::vector<ScalarField> out;
    const double pi = std::numbers::pi;
    for (const auto& [mx, my] : modes) {
        ScalarField f(g);
        for (std::size_t q = 0; q < g.size(); ++q) {
            double v = 1.0 + std::cos(static_cast<double>(mx) * pi * g.coord(q, 0) / g.extent(0));
            if (g.dim() == 2)
                v *= 1.0 + std::cos(static_cast<double>(my) * pi * g.coord(q, 1) / g.extent(1));
            f[q] = v;
        }
        out.push_back(std::move(f));
    }
    return out;
}

ComplementarityReport complementarity_check(const FieldSet& state, const ModelParams& p,
                                            const std::vector<ScalarField>& tests) {
    for (const auto& eta : tests)
        if (eta.min() < 0.0)
            throw std::invalid_argument("complementarity_check: test function must be nonnegative");
    const Grid& g = state.grid();
    const std::size_t n = state.n();
    const std::size_t m = g.size();
    const auto wq = g.quadrature_weights();
    const double state_norm = state.sup();

    // growth_i = (−ω_i + k_i u) w_i
    std::vector<std::vector<double>> growth(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t q = 0; q < m; ++q)
            growth[i][q] = (-p.omega[i] + p.k[i] * state.u[q]) * state.w[i][q];

    ComplementarityReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    rep.worst_relative = std::numeric_limits<double>::infinity();
    std::vector<double> diff(m), diff_growth(m), dw(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t q = 0; q < m; ++q) {
            double v = p.d[i] * state.w[i][q];
            double gr = growth[i][q];
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                v -= p.d[j] * state.w[j][q];
                gr -= growth[j][q];
            }
            diff[q] = v;
            diff_growth[q] = gr;
            dw[q] = p.d[i] * state.w[i][q];
        }
        for (std::size_t t = 0; t < tests.size(); ++t) {
            const auto& eta = tests[t].values;
            const double tol = 1e-4 * state_norm * tests[t].sup();
            double rhs1 = 0.0, rhs2 = 0.0;
            for (std::size_t q = 0; q < m; ++q) {
                rhs1 += wq[q] * diff_growth[q] * eta[q];
                rhs2 += wq[q] * growth[i][q] * eta[q];
            }
            const double lhs1 = dirichlet_form(g, diff, eta);
            const double lhs2 = dirichlet_form(g, dw, eta);
            rep.entries.push_back({i, t, ComplementarityKind::difference, lhs1, rhs1, lhs1 - rhs1, tol});
            rep.entries.push_back({i, t, ComplementarityKind::subsolution, lhs2, rhs2, rhs2 - lhs2, tol});
        }
    }
    for (const auto& e : rep.entries) {
        rep.worst_margin = std::min(rep.worst_margin, e.margin);
        if (e.tol > 0.0) rep.worst_relative = std::min(rep.worst_relative, e.margin / e.tol);
        if (e.margin < -e.tol) rep.pass = false;
    }
    if (rep.entries.empty()) rep.worst_margin = 0.0;
    return rep;
}

SurvivorReport survivor_count(const FieldSet& state, const ModelParams& p, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("survivor_count: threshold must be positive");
    const Grid& g = state.grid();
    SurvivorReport r;
    r.threshold = threshold;
    for (std::size_t i = 0; i < state.n(); ++i)
        if (state.w[i].sup() > threshold) r.survivors.push_back(i);
    r.count = r.survivors.size();
    r.nhat_weyl = nhat_bound(p, g.measure(), g.dim(), 0.0, NhatMode::weyl);
    r.soft_cap = static_cast<std::size_t>(std::ceil(2.0 * r.nhat_weyl));
    r.within_soft_bound = r.count <= r.soft_cap;
    if (r.count == 0) {
        const double cap = p.lambda / p.mu;
        double dist = 0.0;
        for (double v : state.u.values) dist = std::max(dist, std::abs(v - cap));
        r.u_distance = dist;
    }
    return r;
}

IsolationReport zero_isolation_probe(const ModelParams& p, const Grid& grid, std::size_t trials,
                                     std::uint64_t seed, const SolveSettings& settings) {
    IsolationReport rep;
    rep.eta = p.delta * p.delta;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t t = 0; t < trials; ++t) {
        FieldSet init(grid, p.n);
        if (t > 0) {
            // Random amplitude per field, random profile, sup strictly below η.
            const double au = 0.99 * rep.eta * unit(rng);
            for (auto& v : init.u.values) v = au * unit(rng);
            for (auto& f : init.w) {
                const double aw = 0.99 * rep.eta * unit(rng);
                for (auto& v : f.values) v = aw * unit(rng);
            }
        }
        IsolationTrial trial;
        trial.index = t;
        trial.initial_u_sup = init.u.sup();
        const SolveReport r = march_to_steady(init, p, settings, [&](const FieldSet& s, std::size_t) {
            if (!trial.escaped && s.u.max() >= rep.eta) trial.escaped = true;
        });
        trial.final_sup = r.state.sup();
        trial.final_u_sup = r.state.u.sup();
        trial.residual = r.residual_sup;
        if (r.converged && trial.final_sup < 1e-6)
            trial.outcome = IsolationOutcome::zero;
        else if (r.converged && trial.final_u_sup < rep.eta)
            trial.outcome = IsolationOutcome::violated;
        else if (r.converged)
            trial.outcome = IsolationOutcome::escaped;
        else
            trial.outcome = IsolationOutcome::not_converged;
        if (trial.outcome == IsolationOutcome::violated) ++rep.violations;
        rep.trials.push_back(trial);
    }
    if (rep.violations > 0) throw IsolationViolated(std::move(rep));
    return rep;
}

std::string to_string(IsolationOutcome o) {
    switch (o) {
        case IsolationOutcome::zero: return "zero";
        case IsolationOutcome::escaped: return "escaped";
        case IsolationOutcome::not_converged: return "not_converged";
        case IsolationOutcome::violated: return "violated";
    }
    return "unknown";
}

std::string to_string(ComplementarityKind k) {
    return k == ComplementarityKind::difference ? "difference" : "subsolution";
}

}  // namespace strongcomp

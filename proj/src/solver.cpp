#include "strongcomp/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace strongcomp {

FieldSet::FieldSet(const Grid& grid, std::size_t n) : u(grid), w(n, ScalarField(grid)) {}

double FieldSet::sup() const {
    double m = u.sup();
    for (const auto& f : w) m = std::max(m, f.sup());
    return m;
}

double FieldSet::min() const {
    double m = u.min();
    for (const auto& f : w) m = std::min(m, f.min());
    return m;
}

FieldSet FieldSet::constant(const Grid& grid, double u, std::span<const double> w) {
    FieldSet s(grid, w.size());
    s.u = ScalarField(grid, u);
    for (std::size_t i = 0; i < w.size(); ++i) s.w[i] = ScalarField(grid, w[i]);
    return s;
}

FieldSet permuted(const FieldSet& state, std::span<const std::size_t> perm) {
    FieldSet out = state;
    for (std::size_t c = 0; c < perm.size(); ++c) out.w[c] = state.w[perm[c]];
    return out;
}

namespace {

// Solves (shift(x) − coeff·Δ_h) x = rhs on a 1D mirror-closed grid. The
// matrix is a diagonally dominant M-matrix, so the elimination never
// subtracts and nonnegative data stays nonnegative.
void solve_tridiagonal(const Grid& grid, std::span<const double> shift, double coeff,
                       std::span<const double> rhs, std::span<double> x) {
    const std::size_t n = grid.size();
    const double off = coeff / (grid.spacing(0) * grid.spacing(0));
    std::vector<double> cprime(n);
    std::vector<double> dprime(n);
    // Row i: -lo_i x_{i-1} + diag_i x_i - up_i x_{i+1}, lo/up ≥ 0.
    auto lower = [&](std::size_t i) { return i == n - 1 ? 2.0 * off : off; };
    auto upper = [&](std::size_t i) { return i == 0 ? 2.0 * off : off; };
    double denom = shift[0] + 2.0 * off;
    cprime[0] = upper(0) / denom;
    dprime[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = shift[i] + 2.0 * off - lower(i) * cprime[i - 1];
        cprime[i] = i + 1 < n ? upper(i) / denom : 0.0;
        dprime[i] = (rhs[i] + lower(i) * dprime[i - 1]) / denom;
    }
    x[n - 1] = dprime[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dprime[i] + cprime[i] * x[i + 1];
}

// Jacobi-preconditioned CG on the weighted (symmetric) form W(shift − coeff·Δ_h),
// followed by one Gauss–Seidel sweep from the clipped iterate so the
// returned vector is exactly nonnegative for nonnegative data.
void solve_pcg(const Grid& grid, std::span<const double> shift, double coeff,
               std::span<const double> rhs, std::span<double> x,
               const LinearSolveOptions& opts) {
    const std::size_t n = grid.size();
    const auto weights = grid.quadrature_weights();
    const double cx = coeff / (grid.spacing(0) * grid.spacing(0));
    const double cy = coeff / (grid.spacing(1) * grid.spacing(1));
    const double diag_lap = 2.0 * cx + 2.0 * cy;

    std::vector<double> lap(n);
    auto apply = [&](std::span<const double> v, std::span<double> out) {
        apply_laplacian(grid, v, lap, coeff);
        for (std::size_t p = 0; p < n; ++p) out[p] = weights[p] * (shift[p] * v[p] - lap[p]);
    };

    // Work on rhs / max|rhs| so inner products cannot underflow for tiny fields.
    double scale = 0.0;
    for (double v : rhs) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return;
    }
    std::vector<double> b(n), r(n), z(n), pdir(n), q(n);
    double bnorm = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        b[p] = weights[p] * (rhs[p] / scale);
        bnorm += b[p] * b[p];
    }
    bnorm = std::sqrt(bnorm);
    std::vector<double> precond(n);
    for (std::size_t p = 0; p < n; ++p) precond[p] = 1.0 / (weights[p] * (shift[p] + diag_lap));

    for (std::size_t p = 0; p < n; ++p) x[p] = rhs[p] / scale / (shift[p] + diag_lap);
    apply(x, q);
    double rz = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        r[p] = b[p] - q[p];
        z[p] = precond[p] * r[p];
        pdir[p] = z[p];
        rz += r[p] * z[p];
    }
    const std::size_t cap = opts.max_iterations ? opts.max_iterations : 10 * n;
    double rnorm = 0.0;
    bool ok = false;
    for (std::size_t it = 0; it < cap; ++it) {
        rnorm = 0.0;
        for (double v : r) rnorm += v * v;
        rnorm = std::sqrt(rnorm);
        if (rnorm <= opts.tol * bnorm) {
            ok = true;
            break;
        }
        apply(pdir, q);
        double pq = 0.0;
        for (std::size_t p = 0; p < n; ++p) pq += pdir[p] * q[p];
        const double alpha = rz / pq;
        double rz_new = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            x[p] += alpha * pdir[p];
            r[p] -= alpha * q[p];
            z[p] = precond[p] * r[p];
            rz_new += r[p] * z[p];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t p = 0; p < n; ++p) pdir[p] = z[p] + beta * pdir[p];
    }
    if (!ok) {
        std::ostringstream os;
        os << "linear solve did not reach tolerance " << opts.tol << " (relative residual "
           << rnorm / bnorm << ")";
        throw LinearSolveError(os.str(), rnorm / bnorm);
    }

    const std::size_t nx = grid.count(0);
    const std::size_t ny = grid.count(1);
    for (std::size_t p = 0; p < n; ++p) x[p] = std::max(scale * x[p], 0.0);
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t p = ix + nx * iy;
            const double left = ix > 0 ? x[p - 1] : x[p + 1];
            const double right = ix + 1 < nx ? x[p + 1] : x[p - 1];
            const double down = iy > 0 ? x[p - nx] : x[p + nx];
            const double up = iy + 1 < ny ? x[p + nx] : x[p - nx];
            x[p] = (rhs[p] + cx * (left + right) + cy * (down + up)) / (shift[p] + diag_lap);
        }
}

// Average of the left-to-right and right-to-left eliminations. The result
// commutes exactly (in floating point) with the reflection x → L − x, so
// reflection-symmetric data keeps the marched state in the symmetric subspace.
void solve_tridiagonal_reflective(const Grid& grid, std::span<const double> shift, double coeff,
                                  std::span<const double> rhs, std::span<double> x) {
    const std::size_t n = grid.size();
    std::vector<double> rs(shift.rbegin(), shift.rend());
    std::vector<double> rb(rhs.rbegin(), rhs.rend());
    std::vector<double> rx(n);
    solve_tridiagonal(grid, shift, coeff, rhs, x);
    solve_tridiagonal(grid, rs, coeff, rb, rx);
    for (std::size_t i = 0; i < n; ++i) x[i] = 0.5 * (x[i] + rx[n - 1 - i]);
}

void solve_shifted(const Grid& grid, std::span<const double> shift, double coeff,
                   std::span<const double> rhs, std::span<double> x,
                   const LinearSolveOptions& opts) {
    if (grid.dim() == 1)
        solve_tridiagonal_reflective(grid, shift, coeff, rhs, x);
    else
        solve_pcg(grid, shift, coeff, rhs, x, opts);
}

}  // namespace

FieldSet imex_step(const FieldSet& state, const ModelParams& p, double tau,
                   const LinearSolveOptions& linear) {
    const Grid& grid = state.grid();
    const std::size_t m = grid.size();
    const std::size_t n = state.n();
    if (n != p.n) throw std::invalid_argument("imex_step: state has wrong component count");
    const double inv_tau = 1.0 / tau;

    FieldSet next(grid, n);
    next.params_hash = params_hash(p);
    std::vector<double> shift(m), rhs(m);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& wi = state.w[i].values;
        for (std::size_t q = 0; q < m; ++q) {
            double competition = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) competition += p.interaction(i, j) * state.w[j].values[q];
            shift[q] = inv_tau + p.omega[i] + p.beta * competition;
            rhs[q] = (inv_tau + p.k[i] * state.u.values[q]) * wi[q];
        }
        solve_shifted(grid, shift, p.d[i], rhs, next.w[i].values, linear);
    }
    for (std::size_t q = 0; q < m; ++q) {
        double consumption = 0.0;
        for (std::size_t i = 0; i < n; ++i) consumption += p.k[i] * next.w[i].values[q];
        shift[q] = inv_tau + p.mu * state.u.values[q] + consumption;
        rhs[q] = (inv_tau + p.lambda) * state.u.values[q];
    }
    solve_shifted(grid, shift, p.D, rhs, next.u.values, linear);
    return next;
}

std::vector<ScalarField> residual_fields(const FieldSet& state, const ModelParams& p) {
    const Grid& grid = state.grid();
    const std::size_t m = grid.size();
    const std::size_t n = state.n();
    std::vector<ScalarField> out(n + 1, ScalarField(grid));
    std::vector<double> wv(n);
    for (std::size_t i = 0; i < n; ++i) apply_laplacian(grid, state.w[i].values, out[i].values, p.d[i]);
    apply_laplacian(grid, state.u.values, out[n].values, p.D);
    for (std::size_t q = 0; q < m; ++q) {
        for (std::size_t i = 0; i < n; ++i) wv[i] = state.w[i].values[q];
        const double uq = state.u.values[q];
        for (std::size_t i = 0; i < n; ++i) out[i].values[q] += reaction_w(i, uq, wv, p);
        out[n].values[q] += reaction_u(uq, wv, p);
    }
    return out;
}

double residual_norm(const FieldSet& state, const ModelParams& p) {
    double r = 0.0;
    for (const auto& f : residual_fields(state, p)) r = std::max(r, f.sup());
    return r;
}

namespace {

double sup_diff(const FieldSet& a, const FieldSet& b) {
    double m = 0.0;
    for (std::size_t q = 0; q < a.u.size(); ++q) m = std::max(m, std::abs(a.u[q] - b.u[q]));
    for (std::size_t i = 0; i < a.n(); ++i)
        for (std::size_t q = 0; q < a.u.size(); ++q)
            m = std::max(m, std::abs(a.w[i][q] - b.w[i][q]));
    return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SolveReport march_to_steady(const FieldSet& initial, const ModelParams& p,
                            const SolveSettings& s, const StepObserver& observer) {
    if (!(s.tau > 0.0) || !(s.tol_residual > 0.0) || !(s.tol_update > 0.0) || s.max_steps < 1)
        throw std::invalid_argument("solve settings: tolerances and tau must be positive");
    if (initial.min() < 0.0) throw std::invalid_argument("march_to_steady: negative initial state");
    const auto t0 = std::chrono::steady_clock::now();
    const double guard = 10.0 * (std::pow(p.delta, -6.0) + p.lambda / p.mu);
    const LinearSolveOptions linear{s.linear_tol, 0};

    SolveReport rep;
    rep.state = initial;
    rep.state.params_hash = params_hash(p);
    for (std::size_t step = 1; step <= s.max_steps; ++step) {
        FieldSet next = imex_step(rep.state, p, s.tau, linear);
        const double change = sup_diff(next, rep.state) / s.tau;
        rep.state = std::move(next);
        rep.steps_taken = step;
        if (observer) observer(rep.state, step);
        const double sup = rep.state.sup();
        if (!std::isfinite(sup) || sup > guard) {
            std::ostringstream os;
            os << "blow-up suspected at step " << step << " (sup " << sup << " > " << guard << ")";
            throw BlowUpError(os.str(), step, sup);
        }
        if (change <= s.tol_update) {
            rep.residual_sup = residual_norm(rep.state, p);
            if (rep.residual_sup <= s.tol_residual) {
                rep.converged = true;
                break;
            }
        }
    }
    if (!rep.converged) rep.residual_sup = residual_norm(rep.state, p);
    rep.wall_time = seconds_since(t0);
    return rep;
}

namespace {

// Unknown ordering: block c < N is w_c, block N is u; entry c*M + node.
Eigen::VectorXd pack(const FieldSet& s) {
    const std::size_t m = s.u.size();
    Eigen::VectorXd x((s.n() + 1) * m);
    for (std::size_t i = 0; i < s.n(); ++i)
        for (std::size_t q = 0; q < m; ++q) x[i * m + q] = s.w[i][q];
    for (std::size_t q = 0; q < m; ++q) x[s.n() * m + q] = s.u[q];
    return x;
}

void unpack(const Eigen::VectorXd& x, FieldSet& s) {
    const std::size_t m = s.u.size();
    for (std::size_t i = 0; i < s.n(); ++i)
        for (std::size_t q = 0; q < m; ++q) s.w[i][q] = x[i * m + q];
    for (std::size_t q = 0; q < m; ++q) s.u[q] = x[s.n() * m + q];
}

Eigen::VectorXd pack_residual(const FieldSet& s, const ModelParams& p) {
    const auto f = residual_fields(s, p);
    const std::size_t m = s.u.size();
    Eigen::VectorXd r(f.size() * m);
    for (std::size_t c = 0; c < f.size(); ++c)
        for (std::size_t q = 0; q < m; ++q) r[c * m + q] = f[c][q];
    return r;
}

// Jacobian of F = coeff·Δ_h v + reaction.
Eigen::SparseMatrix<double> assemble_jacobian(const FieldSet& s, const ModelParams& p) {
    const Grid& grid = s.grid();
    const std::size_t m = grid.size();
    const std::size_t n = s.n();
    const std::size_t nx = grid.count(0);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve((n + 1) * m * (5 + n + 1));

    auto add_laplacian = [&](std::size_t block, double coeff) {
        const std::size_t base = block * m;
        for (std::size_t q = 0; q < m; ++q) {
            for (int axis = 0; axis < grid.dim(); ++axis) {
                const double c = coeff / (grid.spacing(axis) * grid.spacing(axis));
                const std::size_t stride = axis == 0 ? 1 : nx;
                const std::size_t i = grid.axis_index(q, axis);
                const std::size_t cnt = grid.count(axis);
                trips.emplace_back(base + q, base + q, -2.0 * c);
                if (i == 0) {
                    trips.emplace_back(base + q, base + q + stride, 2.0 * c);
                } else if (i + 1 == cnt) {
                    trips.emplace_back(base + q, base + q - stride, 2.0 * c);
                } else {
                    trips.emplace_back(base + q, base + q - stride, c);
                    trips.emplace_back(base + q, base + q + stride, c);
                }
            }
        }
    };

    for (std::size_t i = 0; i < n; ++i) add_laplacian(i, p.d[i]);
    add_laplacian(n, p.D);
    for (std::size_t q = 0; q < m; ++q) {
        const double uq = s.u[q];
        double consumption = 0.0;
        for (std::size_t i = 0; i < n; ++i) consumption += p.k[i] * s.w[i][q];
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = s.w[i][q];
            double competition = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                competition += p.interaction(i, j) * s.w[j][q];
                trips.emplace_back(i * m + q, j * m + q, -p.beta * p.interaction(i, j) * wi);
            }
            trips.emplace_back(i * m + q, i * m + q, -p.omega[i] + p.k[i] * uq - p.beta * competition);
            trips.emplace_back(i * m + q, n * m + q, p.k[i] * wi);
            trips.emplace_back(n * m + q, i * m + q, -p.k[i] * uq);
        }
        trips.emplace_back(n * m + q, n * m + q, p.lambda - 2.0 * p.mu * uq - consumption);
    }
    const auto dim = static_cast<Eigen::Index>((n + 1) * m);
    Eigen::SparseMatrix<double> J(dim, dim);
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

}  // namespace

SolveReport newton_refine(const FieldSet& state, const ModelParams& p, const SolveSettings& s) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    rep.state = state;
    rep.state.params_hash = params_hash(p);
    Eigen::VectorXd x = pack(rep.state);
    Eigen::VectorXd F = pack_residual(rep.state, p);
    double res = F.lpNorm<Eigen::Infinity>();

    constexpr std::size_t max_iterations = 50;
    constexpr int max_halvings = 30;
    for (std::size_t it = 0; it < max_iterations && res > s.tol_residual; ++it) {
        Eigen::SparseMatrix<double> J = assemble_jacobian(rep.state, p);
        J.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success)
            throw NewtonError("singular Jacobian at Newton iterate " + std::to_string(it));
        const Eigen::VectorXd dx = lu.solve(-F);
        if (lu.info() != Eigen::Success || !dx.allFinite())
            throw NewtonError("singular Jacobian at Newton iterate " + std::to_string(it));

        double t = 1.0;
        bool accepted = false;
        FieldSet trial = rep.state;
        for (int h = 0; h <= max_halvings; ++h, t *= 0.5) {
            Eigen::VectorXd xt = x + t * dx;
            bool clipped = false;
            for (Eigen::Index e = 0; e < xt.size(); ++e)
                if (xt[e] < 0.0) {
                    xt[e] = 0.0;
                    clipped = true;
                }
            unpack(xt, trial);
            const Eigen::VectorXd Ft = pack_residual(trial, p);
            const double rt = Ft.lpNorm<Eigen::Infinity>();
            if (rt < res) {
                x = std::move(xt);
                F = Ft;
                res = rt;
                rep.state = trial;
                rep.projected_negative = rep.projected_negative || clipped;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw NewtonError("stagnation: residual did not decrease after " +
                              std::to_string(max_halvings) + " halvings (residual " +
                              std::to_string(res) + ")");
        rep.newton_iterations = it + 1;
    }
    rep.residual_sup = res;
    rep.converged = res <= s.tol_residual;
    rep.wall_time = seconds_since(t0);
    return rep;
}

ContinuationTrace continue_in_beta(const FieldSet& initial, const ModelParams& params,
                                   std::span<const double> schedule, const SolveSettings& s,
                                   const std::string& provenance) {
    if (schedule.empty()) throw std::invalid_argument("continuation: empty beta schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] >= 0.0)) throw std::invalid_argument("continuation: negative beta");
        if (i > 0 && !(schedule[i] > schedule[i - 1]))
            throw std::invalid_argument("continuation: beta schedule must be strictly increasing");
    }
    ContinuationTrace trace;
    trace.provenance = provenance;
    ModelParams p = params;
    FieldSet current = initial;
    for (double beta : schedule) {
        p.beta = beta;
        SolveReport rep = march_to_steady(current, p, s);
        if (s.newton && !rep.converged) {
            try {
                SolveReport polished = newton_refine(rep.state, p, s);
                polished.steps_taken = rep.steps_taken;
                polished.wall_time += rep.wall_time;
                if (polished.residual_sup < rep.residual_sup) rep = std::move(polished);
            } catch (const NewtonError&) {
                // keep the marched state; it is the source of truth
            }
        }
        current = rep.state;
        trace.betas.push_back(beta);
        trace.reports.push_back(std::move(rep));
    }
    return trace;
}

}  // namespace strongcomp

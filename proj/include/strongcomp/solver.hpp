#pragma once

#include "strongcomp/grid.hpp"
#include "strongcomp/model.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace strongcomp {

/// Discrete state (u, w_1 … w_N) on one grid. All values are kept ≥ 0.
struct FieldSet {
    ScalarField u;
    std::vector<ScalarField> w;
    std::uint64_t params_hash = 0;

    FieldSet() = default;
    FieldSet(const Grid& grid, std::size_t n);

    const Grid& grid() const { return u.grid; }
    std::size_t n() const { return w.size(); }
    double sup() const;
    double min() const;

    static FieldSet constant(const Grid& grid, double u, std::span<const double> w);
};

struct SolveSettings {
    double tau = 0.5;
    double tol_residual = 1e-8;
    double tol_update = 1e-10;
    std::size_t max_steps = 200000;
    bool newton = false;
    double linear_tol = 1e-10;
};

struct SolveReport {
    FieldSet state;
    double residual_sup = 0.0;
    std::size_t steps_taken = 0;
    std::size_t newton_iterations = 0;
    bool converged = false;
    bool projected_negative = false;  ///< Newton had to clip negative entries
    double wall_time = 0.0;           ///< seconds
};

struct ContinuationTrace {
    std::vector<double> betas;
    std::vector<SolveReport> reports;
    std::string provenance;
};

class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BlowUpError : public SolveError {
public:
    BlowUpError(const std::string& what, std::size_t step, double sup)
        : SolveError(what), step(step), sup(sup) {}
    std::size_t step;
    double sup;
};

class LinearSolveError : public SolveError {
public:
    LinearSolveError(const std::string& what, double worst_residual)
        : SolveError(what), worst_residual(worst_residual) {}
    double worst_residual;
};

class NewtonError : public SolveError {
public:
    using SolveError::SolveError;
};

/// Inner linear-solve controls for the 2D conjugate-gradient path. 1D
/// systems are tridiagonal and solved directly.
struct LinearSolveOptions {
    double tol = 1e-10;
    std::size_t max_iterations = 0;  ///< 0 → 10 × node count
};

/// One linearly implicit step. Diffusion and absorption are implicit, growth
/// (k_i u^old, λ) explicit. The w_i are updated first, then u sees the new w:
///   (1/τ − d_iΔ_h + ω_i + βΣ_{j≠i} a_ij w_j^old) w_i^new = (1/τ + k_i u^old) w_i^old
///   (1/τ − DΔ_h + μu^old + Σ k_i w_i^new) u^new = (1/τ + λ) u^old
/// Each operator is an M-matrix, so nonnegative input gives nonnegative output.
FieldSet imex_step(const FieldSet& state, const ModelParams& params, double tau,
                   const LinearSolveOptions& linear = {});

/// Stationary residual fields: F_i = d_iΔ_h w_i + reaction_w, F_u = DΔ_h u + reaction_u.
/// Index N holds u.
std::vector<ScalarField> residual_fields(const FieldSet& state, const ModelParams& params);

/// Sup over nodes and components of |F|.
double residual_norm(const FieldSet& state, const ModelParams& params);

using StepObserver = std::function<void(const FieldSet& state, std::size_t step)>;

/// Iterates imex_step until residual ≤ tol_residual and step change / τ ≤
/// tol_update, or max_steps. Throws BlowUpError when the sup norm exceeds
/// 10·(δ^-6 + λ/μ).
SolveReport march_to_steady(const FieldSet& initial, const ModelParams& params,
                            const SolveSettings& settings, const StepObserver& observer = {});

/// Damped Newton on the discrete stationary system with analytic Jacobian.
SolveReport newton_refine(const FieldSet& state, const ModelParams& params,
                          const SolveSettings& settings);

/// Warm-started sweep over an increasing β schedule. Non-converged entries
/// are kept and marked; blow-up propagates.
ContinuationTrace continue_in_beta(const FieldSet& initial, const ModelParams& params,
                                   std::span<const double> beta_schedule,
                                   const SolveSettings& settings,
                                   const std::string& provenance = "");

/// Same state with components reordered: new component c is old perm[c].
FieldSet permuted(const FieldSet& state, std::span<const std::size_t> perm);

}  // namespace strongcomp

#pragma once

#include "strongcomp/grid.hpp"
#include "strongcomp/model.hpp"
#include "strongcomp/solver.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace strongcomp {

/// Uniform L∞ bounds: 0 ≤ u ≤ λ/μ, S = Du + Σ d_i w_i ≤ δ^-5, 0 ≤ Σ w_i ≤ δ^-6.
/// Upper bounds pass with slack 1e-6·cap; lower bounds are exact.
struct BoundReport {
    double u_min = 0.0;
    double u_max = 0.0;
    double u_cap = 0.0;
    double s_max = 0.0;
    double s_cap = 0.0;
    double wsum_min = 0.0;
    double wsum_max = 0.0;
    double wsum_cap = 0.0;
    bool u_lower_pass = true;
    bool u_upper_pass = true;
    bool s_pass = true;
    bool wsum_lower_pass = true;
    bool wsum_upper_pass = true;

    bool pass() const {
        return u_lower_pass && u_upper_pass && s_pass && wsum_lower_pass && wsum_upper_pass;
    }
    double u_excess() const { return u_max - u_cap; }
};

BoundReport check_linf_bounds(const FieldSet& state, const ModelParams& params);

inline constexpr std::size_t default_max_pairs = 4'000'000;

/// max |f(x) − f(y)| / |x − y|^α over node pairs. Uses every pair when
/// node_count² ≤ max_pairs, otherwise a fixed-seed stratified sample.
double holder_seminorm(const ScalarField& field, double alpha,
                       std::size_t max_pairs = default_max_pairs);

class AdmissibilityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Seminorm of Σ_i weights_i w_i; each weight must lie in [δ, 1/δ].
double weighted_sum_holder(const FieldSet& state, std::span<const double> weights,
                           const ModelParams& params, double alpha,
                           std::size_t max_pairs = default_max_pairs);

struct SegregationReport {
    std::size_t n = 0;
    double beta = 0.0;
    std::vector<double> overlap;          ///< n×n, ∫ w_i w_j, zero diagonal
    std::vector<double> scaled_overlap;   ///< β · overlap
    std::vector<double> interaction_mass; ///< ∫ β w_i Σ_{j≠i} a_ij w_j
    double product_sup = 0.0;             ///< max_{i≠j} sup_x w_i w_j

    double overlap_at(std::size_t i, std::size_t j) const { return overlap[i * n + j]; }
    double scaled_at(std::size_t i, std::size_t j) const { return scaled_overlap[i * n + j]; }
};

SegregationReport segregation_report(const FieldSet& state, const ModelParams& params);

struct SupportAnalysis {
    double threshold = 0.0;
    std::vector<SupportMask> supports;  ///< {w_i > θ}
    SupportMask nodal;                  ///< {w_i ≤ θ for all i}
    std::vector<double> measures;       ///< quadrature measure of each support
    double nodal_measure = 0.0;
};

/// Relative default θ = 0.01 · max_i ‖w_i‖_sup (zero for the zero state).
double default_threshold(const FieldSet& state);

SupportAnalysis support_and_nodal(const FieldSet& state, double threshold);

inline constexpr double faber_krahn_allowance = 1.1;

struct FaberKrahnRecord {
    std::size_t component = 0;
    bool skipped = false;  ///< empty support
    double lambda1 = 0.0;
    double cap = 0.0;      ///< (λk_i − μω_i)/(d_i μ)
    bool pass = true;      ///< λ₁ ≤ 1.1 · cap
};

std::vector<FaberKrahnRecord> faber_krahn_check(const FieldSet& state, const ModelParams& params,
                                                double threshold);

/// Faber–Krahn comparison for an explicit support mask.
FaberKrahnRecord faber_krahn_on_mask(const SupportMask& mask, const ModelParams& params,
                                     std::size_t component);

struct DecayFit {
    std::vector<double> center;
    double rho = 0.0;
    std::vector<double> betas;
    std::vector<double> sup_h;
    double slope = 0.0;      ///< d log(sup_h) / d √β
    double intercept = 0.0;
    double r_squared = 0.0;
    bool fully_segregated = false;  ///< sup_h vanished; slope = −∞
};

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Least-squares fit of log(sup_h) against √β.
DecayFit fit_log_decay(std::span<const double> betas, std::span<const double> sup_h);

/// Records sup over B_{ρ/2}(center) of h = Σ_{j≠component} d_j w_j along the
/// trace and fits its exponential decay in √β. Throws PreconditionError when
/// w_component(center) < 10·presence_threshold at some β.
DecayFit decay_fit(const ContinuationTrace& trace, const ModelParams& params,
                   std::size_t component, std::span<const double> center, double rho,
                   double presence_threshold = 1e-3);

/// 1 + cos(mπx/L) in 1D, tensor products in 2D; nonnegative and
/// Neumann-compatible. Deterministic order of increasing frequency.
std::vector<ScalarField> cosine_test_functions(const Grid& grid, std::size_t count);

enum class ComplementarityKind {
    difference,   ///< ∫∇(d_i w_i − Σ_{j≠i} d_j w_j)·∇η ≥ ∫[f_i w_i − Σ_{j≠i} f_j w_j]η
    subsolution,  ///< ∫ d_i ∇w_i·∇η ≤ ∫ f_i w_i η, f_i = −ω_i + k_i u
};

struct ComplementarityEntry {
    std::size_t component = 0;
    std::size_t test_index = 0;
    ComplementarityKind kind = ComplementarityKind::difference;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  ///< amount by which the inequality holds
    double tol = 0.0;     ///< 1e-4 · ‖state‖ · ‖η‖
};

struct ComplementarityReport {
    std::vector<ComplementarityEntry> entries;
    double worst_margin = 0.0;
    double worst_relative = 0.0;  ///< min margin / tol over entries with tol > 0
    bool pass = true;
};

ComplementarityReport complementarity_check(const FieldSet& state, const ModelParams& params,
                                            const std::vector<ScalarField>& test_functions);

struct SurvivorReport {
    double threshold = 0.0;
    std::size_t count = 0;
    std::vector<std::size_t> survivors;
    double nhat_weyl = 0.0;
    std::size_t soft_cap = 0;  ///< ceil(2 · nhat_weyl)
    bool within_soft_bound = true;
    std::optional<double> u_distance;  ///< ‖u − λ/μ‖_sup, reported when count = 0
};

SurvivorReport survivor_count(const FieldSet& state, const ModelParams& params, double threshold);

enum class IsolationOutcome { zero, escaped, not_converged, violated };

struct IsolationTrial {
    std::size_t index = 0;
    IsolationOutcome outcome = IsolationOutcome::zero;
    bool escaped = false;       ///< sup u ≥ δ² at some step
    double initial_u_sup = 0.0;
    double final_sup = 0.0;
    double final_u_sup = 0.0;
    double residual = 0.0;
};

struct IsolationReport {
    double eta = 0.0;
    std::vector<IsolationTrial> trials;
    std::size_t violations = 0;
};

class IsolationViolated : public std::runtime_error {
public:
    explicit IsolationViolated(IsolationReport r)
        : std::runtime_error("zero isolation violated"), report(std::move(r)) {}
    IsolationReport report;
};

/// Marches from random nonnegative states with sup u, sup w_i < δ². A trial
/// that converges to a nonzero state with sup u < δ² is a violation; any
/// violation throws IsolationViolated after all trials ran. Trial 0 starts
/// from the zero state.
IsolationReport zero_isolation_probe(const ModelParams& params, const Grid& grid,
                                     std::size_t trials, std::uint64_t seed,
                                     const SolveSettings& settings);

std::string to_string(IsolationOutcome outcome);
std::string to_string(ComplementarityKind kind);

}  // namespace strongcomp

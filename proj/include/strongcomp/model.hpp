#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace strongcomp {

/// Thrown when a parameter set is malformed (wrong sizes, asymmetric
/// interaction matrix, non-positive structural quantity). Distinct from an
/// admissibility failure, which is reported as a verdict.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Coefficients of the N-predator / one-prey strong-competition system
///
///   -d_i Δw_i = (-ω_i + k_i u - β Σ_{j≠i} a_ij w_j) w_i
///   -D   Δu   = (λ - μ u - Σ_i k_i w_i) u
///
/// with homogeneous Neumann conditions. `a` is stored row-major N×N; its
/// diagonal is never read.
struct ModelParams {
    std::size_t n = 1;
    double D = 1.0;
    double lambda = 1.0;
    double mu = 1.0;
    std::vector<double> d{1.0};
    std::vector<double> omega{0.2};
    std::vector<double> k{1.0};
    std::vector<double> a{0.0};
    double beta = 0.0;
    double delta = 0.2;

    double interaction(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    /// Surplus λk_i − μω_i of component i.
    double surplus(std::size_t i) const { return lambda * k[i] - mu * omega[i]; }

    /// N components sharing identical coefficients and a_ij = a_off for i≠j.
    static ModelParams identical(std::size_t n, double D, double lambda, double mu, double d,
                                 double omega, double k, double a_off, double beta,
                                 double delta);
};

/// Throws StructuralError unless sizes are consistent, all required
/// quantities are positive and finite, and a is symmetric off the diagonal.
void check_structure(const ModelParams& params);

struct Violation {
    std::string coefficient;  ///< e.g. "lambda", "d", "lambda*k-mu*omega"
    std::optional<std::size_t> index;
    double value = 0.0;
    double bound = 0.0;
    std::string message;
};

struct Admissibility {
    bool admissible = true;
    std::vector<Violation> violations;
};

/// Evaluates the uniform assumption: every coefficient in [δ, 1/δ] and
/// λk_i − μω_i > δ. Structural problems throw instead.
Admissibility validate_uniform(const ModelParams& params);

struct DerivedConstants {
    double u_cap = 0.0;     ///< λ/μ
    double s_cap = 0.0;     ///< δ^-5, bound on S = Du + Σ d_i w_i
    double wsum_cap = 0.0;  ///< δ^-6
    double eta = 0.0;       ///< δ², zero-isolation threshold on u
    double ratio_max = 0.0; ///< max_i (λk_i − μω_i)/(d_i μ)
};

DerivedConstants derived_constants(const ModelParams& params);

/// Pointwise reaction rate of w_i: (−ω_i + k_i u − β Σ_{j≠i} a_ij w_j) w_i.
double reaction_w(std::size_t i, double u_val, std::span<const double> w_vals,
                  const ModelParams& params);

/// Pointwise reaction rate of u: (λ − μu − Σ_i k_i w_i) u.
double reaction_u(double u_val, std::span<const double> w_vals, const ModelParams& params);

struct ConstantState {
    double u = 0.0;
    double w = 0.0;
};

/// Spatially constant equilibrium with only component i active:
/// u* = ω_i/k_i, w_i* = (λk_i − μω_i)/k_i². Empty when the surplus is ≤ 0.
std::optional<ConstantState> constant_single_species_state(const ModelParams& params,
                                                           std::size_t i);

enum class NhatMode { faber_krahn, weyl };

/// Upper estimate on the number of components surviving the segregation
/// limit. faber_krahn: c_omega · ratio^{dim/2}. weyl: the explicit
/// asymptotic constant |Ω| ratio^{dim/2} / ((π/4)^{dim/2} Γ(dim/2+1)).
double nhat_bound_from_ratio(double ratio_max, double domain_measure, int dim, double c_omega,
                             NhatMode mode);

double nhat_bound(const ModelParams& params, double domain_measure, int dim, double c_omega,
                  NhatMode mode);

/// FNV-1a over every coefficient, used to tag states with their generator.
std::uint64_t params_hash(const ModelParams& params);

/// Same parameters with components reordered: new component c is old perm[c].
ModelParams permuted(const ModelParams& params, std::span<const std::size_t> perm);

}  // namespace strongcomp

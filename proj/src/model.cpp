#include "strongcomp/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace strongcomp {

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

ModelParams ModelParams::identical(std::size_t n, double D, double lambda, double mu, double d,
                                   double omega, double k, double a_off, double beta,
                                   double delta) {
    ModelParams p;
    p.n = n;
    p.D = D;
    p.lambda = lambda;
    p.mu = mu;
    p.d.assign(n, d);
    p.omega.assign(n, omega);
    p.k.assign(n, k);
    p.a.assign(n * n, a_off);
    for (std::size_t i = 0; i < n; ++i) p.a[i * n + i] = 0.0;
    p.beta = beta;
    p.delta = delta;
    return p;
}

void check_structure(const ModelParams& p) {
    if (p.n == 0) throw StructuralError("N must be a positive integer");
    if (p.d.size() != p.n || p.omega.size() != p.n || p.k.size() != p.n)
        throw StructuralError("coefficient sequences d, omega, k must have length N");
    if (p.a.size() != p.n * p.n) throw StructuralError("interaction matrix a must be N x N");
    if (!positive_finite(p.D)) throw StructuralError("D must be positive");
    if (!positive_finite(p.lambda)) throw StructuralError("lambda must be positive");
    if (!positive_finite(p.mu)) throw StructuralError("mu must be positive");
    if (!std::isfinite(p.beta) || p.beta < 0.0) throw StructuralError("beta must be nonnegative");
    if (!(p.delta > 0.0 && p.delta < 1.0)) throw StructuralError("delta must lie in (0,1)");
    for (std::size_t i = 0; i < p.n; ++i) {
        if (!positive_finite(p.d[i]) || !positive_finite(p.omega[i]) || !positive_finite(p.k[i]))
            throw StructuralError("d, omega, k must be positive (component " +
                                  std::to_string(i + 1) + ")");
        for (std::size_t j = 0; j < p.n; ++j) {
            if (i == j) continue;
            if (!positive_finite(p.interaction(i, j)))
                throw StructuralError("interaction a_" + std::to_string(i + 1) +
                                      std::to_string(j + 1) + " must be positive");
            if (p.interaction(i, j) != p.interaction(j, i))
                throw StructuralError("asymmetric interaction: a_" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + " != a_" + std::to_string(j + 1) +
                                      "," + std::to_string(i + 1));
        }
    }
}

Admissibility validate_uniform(const ModelParams& p) {
    check_structure(p);
    Admissibility out;
    const double lo = p.delta;
    const double hi = 1.0 / p.delta;

    auto range = [&](const std::string& name, std::optional<std::size_t> idx, double v) {
        std::string label = name;
        if (idx) label += "_" + std::to_string(*idx + 1);
        if (v < lo) {
            out.violations.push_back(
                {name, idx, v, lo, label + " = " + fmt_num(v) + " < delta = " + fmt_num(lo)});
        } else if (v > hi) {
            out.violations.push_back({name, idx, v, hi,
                                      label + " = " + fmt_num(v) + " > 1/delta = " + fmt_num(hi)});
        }
    };

    range("lambda", std::nullopt, p.lambda);
    range("mu", std::nullopt, p.mu);
    for (std::size_t i = 0; i < p.n; ++i) {
        range("d", i, p.d[i]);
        range("omega", i, p.omega[i]);
        range("k", i, p.k[i]);
    }
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = i + 1; j < p.n; ++j) {
            const double v = p.interaction(i, j);
            if (v < lo || v > hi) {
                const std::string label =
                    "a_" + std::to_string(i + 1) + "," + std::to_string(j + 1);
                out.violations.push_back({"a", i * p.n + j, v, v < lo ? lo : hi,
                                          label + " = " + fmt_num(v) +
                                              (v < lo ? " < delta = " + fmt_num(lo)
                                                      : " > 1/delta = " + fmt_num(hi))});
            }
        }
    for (std::size_t i = 0; i < p.n; ++i) {
        const double s = p.surplus(i);
        if (!(s > p.delta)) {
            const std::string idx = std::to_string(i + 1);
            out.violations.push_back({"lambda*k-mu*omega", i, s, p.delta,
                                      "lambda*k_" + idx + " - mu*omega_" + idx + " = " +
                                          fmt_num(s) + " <= delta = " + fmt_num(p.delta)});
        }
    }
    out.admissible = out.violations.empty();
    return out;
}

DerivedConstants derived_constants(const ModelParams& p) {
    DerivedConstants c;
    c.u_cap = p.lambda / p.mu;
    c.s_cap = std::pow(p.delta, -5.0);
    c.wsum_cap = std::pow(p.delta, -6.0);
    c.eta = p.delta * p.delta;
    c.ratio_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.n; ++i)
        c.ratio_max = std::max(c.ratio_max, p.surplus(i) / (p.d[i] * p.mu));
    return c;
}

double reaction_w(std::size_t i, double u_val, std::span<const double> w_vals,
                  const ModelParams& p) {
    if (i >= p.n || w_vals.size() != p.n) throw std::out_of_range("reaction_w: component index");
    double competition = 0.0;
    for (std::size_t j = 0; j < p.n; ++j)
        if (j != i) competition += p.interaction(i, j) * w_vals[j];
    return (-p.omega[i] + p.k[i] * u_val - p.beta * competition) * w_vals[i];
}

double reaction_u(double u_val, std::span<const double> w_vals, const ModelParams& p) {
    double consumption = 0.0;
    for (std::size_t i = 0; i < w_vals.size(); ++i) consumption += p.k[i] * w_vals[i];
    return (p.lambda - p.mu * u_val - consumption) * u_val;
}

std::optional<ConstantState> constant_single_species_state(const ModelParams& p,
                                                           std::size_t i) {
    if (i >= p.n) throw std::out_of_range("constant_single_species_state: component index");
    const double s = p.surplus(i);
    if (!(s > 0.0)) return std::nullopt;
    return ConstantState{p.omega[i] / p.k[i], s / (p.k[i] * p.k[i])};
}

double nhat_bound_from_ratio(double ratio_max, double domain_measure, int dim, double c_omega,
                             NhatMode mode) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("nhat_bound: dim must be 1 or 2");
    const double half = 0.5 * dim;
    const double scale = std::pow(std::max(ratio_max, 0.0), half);
    if (mode == NhatMode::faber_krahn) return c_omega * scale;
    const double denom = std::pow(std::numbers::pi / 4.0, half) * std::tgamma(half + 1.0);
    return domain_measure * scale / denom;
}

double nhat_bound(const ModelParams& p, double domain_measure, int dim, double c_omega,
                  NhatMode mode) {
    return nhat_bound_from_ratio(derived_constants(p).ratio_max, domain_measure, dim, c_omega,
                                 mode);
}

std::uint64_t params_hash(const ModelParams& p) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffU;
            h *= 1099511628211ULL;
        }
    };
    auto mixd = [&mix](double v) { mix(std::bit_cast<std::uint64_t>(v)); };
    mix(p.n);
    mixd(p.D);
    mixd(p.lambda);
    mixd(p.mu);
    for (double v : p.d) mixd(v);
    for (double v : p.omega) mixd(v);
    for (double v : p.k) mixd(v);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = 0; j < p.n; ++j)
            if (i != j) mixd(p.interaction(i, j));
    mixd(p.beta);
    mixd(p.delta);
    return h;
}

ModelParams permuted(const ModelParams& p, std::span<const std::size_t> perm) {
    if (perm.size() != p.n) throw std::invalid_argument("permuted: permutation length");
    ModelParams q = p;
    for (std::size_t c = 0; c < p.n; ++c) {
        q.d[c] = p.d[perm[c]];
        q.omega[c] = p.omega[perm[c]];
        q.k[c] = p.k[perm[c]];
        for (std::size_t e = 0; e < p.n; ++e) q.a[c * p.n + e] = p.a[perm[c] * p.n + perm[e]];
    }
    return q;
}

}  // namespace strongcomp

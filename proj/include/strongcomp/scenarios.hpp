#pragma once

#include "strongcomp/grid.hpp"
#include "strongcomp/model.hpp"
#include "strongcomp/solver.hpp"

#include <cstdint>
#include <vector>

namespace strongcomp::scenarios {

/// N=1, λ=μ=D=d=k=1, ω=0.2, δ=0.2 on [0,1] with 201 nodes.
ModelParams a_params();
Grid a_grid();
FieldSet a_initial();  ///< constant (u, w) = (1, 0.1)

/// Two identical competitors (d=1, ω=0.2, k=1, a12=1) with λ=μ=D=1 on
/// [0,4], 401 nodes. Initial w_1 is a Gaussian bump at x=1, w_2 its
/// exact mirror image, u=1.
ModelParams b_params(double beta = 0.0);
Grid b_grid();
FieldSet b_initial();
SolveSettings b_settings();
std::vector<double> b_betas();  ///< 10, 1e2, 1e3, 1e4, 1e5

/// N identical components (Scenario A coefficients) on [0, length] with
/// smooth seeded random initial data.
ModelParams packed_params(std::size_t n, double beta = 0.0);
Grid packed_grid();
FieldSet packed_initial(std::size_t n, std::uint64_t seed);

/// Random admissible parameters: δ = 0.2, every coefficient log-uniform in
/// [δ, 1/δ]; the whole set is redrawn until validate_uniform accepts it.
ModelParams random_admissible(std::size_t n, double beta, std::uint64_t seed);

}  // namespace strongcomp::scenarios

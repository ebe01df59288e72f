#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace strongcomp {

/// Uniform node grid on an interval [0, L] or a rectangle [0, Lx] × [0, Ly].
/// Nodes sit on the boundary (vertex-centered), so spacing = extent/(count-1).
/// Node index is x-fastest: node = ix + nx * iy.
class Grid {
public:
    Grid() = default;
    static Grid interval(double length, std::size_t count);
    static Grid rectangle(double lx, double ly, std::size_t nx, std::size_t ny);
    /// Throws std::invalid_argument on dim ∉ {1,2}, extent ≤ 0 or count < 3.
    Grid(int dim, std::span<const double> extents, std::span<const std::size_t> counts);

    int dim() const { return dim_; }
    double extent(int axis) const { return extents_[axis]; }
    std::size_t count(int axis) const { return counts_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    std::size_t size() const;
    double measure() const;

    double coord(std::size_t node, int axis) const;
    std::size_t axis_index(std::size_t node, int axis) const;
    std::array<double, 2> point(std::size_t node) const;

    /// Tensor-product trapezoid weights; they sum to measure().
    std::vector<double> quadrature_weights() const;

    bool operator==(const Grid& other) const = default;

private:
    int dim_ = 1;
    std::array<double, 2> extents_{1.0, 1.0};
    std::array<std::size_t, 2> counts_{3, 1};
    std::array<double, 2> spacing_{0.5, 1.0};
};

struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(Grid g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    ScalarField(Grid g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
    double sup() const;  ///< max |value|
    double max() const;
    double min() const;
};

struct SupportMask {
    Grid grid;
    std::vector<std::uint8_t> flags;

    SupportMask() = default;
    explicit SupportMask(Grid g, bool fill = false) : grid(g), flags(g.size(), fill ? 1 : 0) {}

    std::size_t count() const;
    bool operator[](std::size_t i) const { return flags[i] != 0; }
    void set(std::size_t i, bool v) { flags[i] = v ? 1 : 0; }
};

/// out = coeff · Δ_h in, with the 3/5-point stencil closed by mirror ghost
/// nodes (homogeneous Neumann). Constant fields map to exactly zero.
void apply_laplacian(const Grid& grid, std::span<const double> in, std::span<double> out,
                     double coeff);

ScalarField laplacian_neumann(const ScalarField& field, double coeff);

double integrate(const ScalarField& field);

/// Dirichlet form Σ_edges (edge weight) ∂f ∂g over the grid cells using
/// forward differences. Equals −Σ_nodes W f Δ_h g exactly for the mirror
/// closure, so it is the weak form of the discrete Laplacian.
double dirichlet_form(const Grid& grid, std::span<const double> f, std::span<const double> g);

/// Connected components (axis-neighbor adjacency) of the true set.
std::vector<SupportMask> connected_components(const SupportMask& mask);

/// Smallest eigenvalue of −Δ_h on the true nodes, zero imposed on false
/// nodes and mirror closure on the physical boundary. Disconnected masks
/// return the minimum over components. Throws on an empty mask.
double lambda1_restricted(const SupportMask& mask, const Grid& grid);

SupportMask ball_nodes(const Grid& grid, std::span<const double> center, double radius);

/// Index of the node nearest to a point.
std::size_t nearest_node(const Grid& grid, std::span<const double> point);

}  // namespace strongcomp

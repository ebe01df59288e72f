#include "strongcomp/grid.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace strongcomp {

Grid Grid::interval(double length, std::size_t count) {
    const double e[1] = {length};
    const std::size_t c[1] = {count};
    return Grid(1, e, c);
}

Grid Grid::rectangle(double lx, double ly, std::size_t nx, std::size_t ny) {
    const double e[2] = {lx, ly};
    const std::size_t c[2] = {nx, ny};
    return Grid(2, e, c);
}

Grid::Grid(int dim, std::span<const double> extents, std::span<const std::size_t> counts) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("grid: dim must be 1 or 2");
    if (extents.size() != static_cast<std::size_t>(dim) ||
        counts.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("grid: extents and counts must have dim entries");
    dim_ = dim;
    for (int a = 0; a < dim; ++a) {
        if (!(std::isfinite(extents[a]) && extents[a] > 0.0))
            throw std::invalid_argument("grid: extents must be positive");
        if (counts[a] < 3) throw std::invalid_argument("grid: at least 3 nodes per axis");
        extents_[a] = extents[a];
        counts_[a] = counts[a];
        spacing_[a] = extents[a] / static_cast<double>(counts[a] - 1);
    }
    if (dim == 1) {
        extents_[1] = 1.0;
        counts_[1] = 1;
        spacing_[1] = 1.0;
    }
}

std::size_t Grid::size() const { return counts_[0] * counts_[1]; }

double Grid::measure() const { return dim_ == 1 ? extents_[0] : extents_[0] * extents_[1]; }

std::size_t Grid::axis_index(std::size_t node, int axis) const {
    return axis == 0 ? node % counts_[0] : node / counts_[0];
}

double Grid::coord(std::size_t node, int axis) const {
    return static_cast<double>(axis_index(node, axis)) * extents_[axis] /
           static_cast<double>(counts_[axis] - 1);
}

std::array<double, 2> Grid::point(std::size_t node) const {
    return {coord(node, 0), dim_ == 2 ? coord(node, 1) : 0.0};
}

namespace {

std::vector<double> axis_weights(std::size_t n, double h) {
    std::vector<double> w(n, h);
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
}

}  // namespace

std::vector<double> Grid::quadrature_weights() const {
    const auto wx = axis_weights(counts_[0], spacing_[0]);
    if (dim_ == 1) return wx;
    const auto wy = axis_weights(counts_[1], spacing_[1]);
    std::vector<double> w(size());
    for (std::size_t iy = 0; iy < counts_[1]; ++iy)
        for (std::size_t ix = 0; ix < counts_[0]; ++ix) w[ix + counts_[0] * iy] = wx[ix] * wy[iy];
    return w;
}

ScalarField::ScalarField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
        throw std::invalid_argument("scalar field: value count does not match grid");
}

double ScalarField::sup() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }
double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }

std::size_t SupportMask::count() const {
    return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), std::uint8_t{1}));
}

void apply_laplacian(const Grid& grid, std::span<const double> in, std::span<double> out,
                     double coeff) {
    const std::size_t nx = grid.count(0);
    const std::size_t ny = grid.count(1);
    const double cx = coeff / (grid.spacing(0) * grid.spacing(0));
    const double cy = grid.dim() == 2 ? coeff / (grid.spacing(1) * grid.spacing(1)) : 0.0;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const std::size_t row = nx * iy;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t p = row + ix;
            const double c = in[p];
            const double left = ix > 0 ? in[p - 1] : in[p + 1];
            const double right = ix + 1 < nx ? in[p + 1] : in[p - 1];
            double acc = cx * ((left - c) + (right - c));
            if (grid.dim() == 2) {
                const double down = iy > 0 ? in[p - nx] : in[p + nx];
                const double up = iy + 1 < ny ? in[p + nx] : in[p - nx];
                acc += cy * ((down - c) + (up - c));
            }
            out[p] = acc;
        }
    }
}

ScalarField laplacian_neumann(const ScalarField& field, double coeff) {
    ScalarField out(field.grid);
    apply_laplacian(field.grid, field.values, out.values, coeff);
    return out;
}

double integrate(const ScalarField& field) {
    const auto w = field.grid.quadrature_weights();
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * field.values[i];
    return s;
}

double dirichlet_form(const Grid& grid, std::span<const double> f, std::span<const double> g) {
    const std::size_t nx = grid.count(0);
    const std::size_t ny = grid.count(1);
    const double hx = grid.spacing(0);
    const auto wy = grid.dim() == 2 ? axis_weights(ny, grid.spacing(1)) : std::vector<double>{1.0};
    double s = 0.0;
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
            const std::size_t p = ix + nx * iy;
            s += wy[iy] * (f[p + 1] - f[p]) * (g[p + 1] - g[p]) / hx;
        }
    if (grid.dim() == 2) {
        const double hy = grid.spacing(1);
        const auto wx = axis_weights(nx, hx);
        for (std::size_t iy = 0; iy + 1 < ny; ++iy)
            for (std::size_t ix = 0; ix < nx; ++ix) {
                const std::size_t p = ix + nx * iy;
                s += wx[ix] * (f[p + nx] - f[p]) * (g[p + nx] - g[p]) / hy;
            }
    }
    return s;
}

namespace {

template <typename Fn>
void for_each_neighbor(const Grid& grid, std::size_t p, Fn&& fn) {
    const std::size_t nx = grid.count(0);
    const std::size_t ix = p % nx;
    if (ix > 0) fn(p - 1);
    if (ix + 1 < nx) fn(p + 1);
    if (grid.dim() == 2) {
        const std::size_t iy = p / nx;
        if (iy > 0) fn(p - nx);
        if (iy + 1 < grid.count(1)) fn(p + nx);
    }
}

// Inverse iteration on the weighted pencil (B + σW) x = W x_old, where
// B = W·(−Δ_h) restricted to one component is symmetric.
double lambda1_component(const SupportMask& comp, const Grid& grid) {
    const std::size_t n_all = grid.size();
    std::vector<std::ptrdiff_t> local(n_all, -1);
    std::vector<std::size_t> nodes;
    for (std::size_t p = 0; p < n_all; ++p)
        if (comp[p]) {
            local[p] = static_cast<std::ptrdiff_t>(nodes.size());
            nodes.push_back(p);
        }
    const auto n = static_cast<Eigen::Index>(nodes.size());
    const auto weights = grid.quadrature_weights();
    const std::size_t nx = grid.count(0);

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(nodes.size() * 5);
    Eigen::VectorXd wdiag(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::size_t p = nodes[r];
        const double wp = weights[p];
        wdiag[r] = wp;
        double diag = 0.0;
        for (int axis = 0; axis < grid.dim(); ++axis) {
            const double h2 = grid.spacing(axis) * grid.spacing(axis);
            const std::size_t stride = axis == 0 ? 1 : nx;
            const std::size_t i = grid.axis_index(p, axis);
            const std::size_t cnt = grid.count(axis);
            diag += 2.0 / h2;
            // Mirror closure doubles the inward coupling at the boundary.
            auto couple = [&](std::size_t q, double factor) {
                if (local[q] >= 0) trips.emplace_back(r, local[q], -factor * wp / h2);
            };
            if (i == 0) {
                couple(p + stride, 2.0);
            } else if (i + 1 == cnt) {
                couple(p - stride, 2.0);
            } else {
                couple(p - stride, 1.0);
                couple(p + stride, 1.0);
            }
        }
        trips.emplace_back(r, r, diag * wp);
    }
    Eigen::SparseMatrix<double> B(n, n);
    B.setFromTriplets(trips.begin(), trips.end());

    const double sigma = 1.0;
    Eigen::SparseMatrix<double> shifted = B;
    for (Eigen::Index r = 0; r < n; ++r) shifted.coeffRef(r, r) += sigma * wdiag[r];
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("lambda1_restricted: factorization failed");

    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    auto rayleigh = [&](const Eigen::VectorXd& v) {
        return v.dot(B * v) / v.dot(wdiag.cwiseProduct(v));
    };
    double theta = rayleigh(x) + sigma;
    for (int it = 0; it < 10000; ++it) {
        const Eigen::VectorXd rhs = wdiag.cwiseProduct(x);
        x = ldlt.solve(rhs);
        x /= std::sqrt(x.dot(wdiag.cwiseProduct(x)));
        const double next = rayleigh(x) + sigma;
        const bool done = std::abs(next - theta) <= 1e-10 * next && it > 0;
        theta = next;
        if (done) break;
    }
    return std::max(theta - sigma, 0.0);
}

}  // namespace

std::vector<SupportMask> connected_components(const SupportMask& mask) {
    const Grid& grid = mask.grid;
    std::vector<std::uint8_t> seen(grid.size(), 0);
    std::vector<SupportMask> comps;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        if (!mask[s] || seen[s]) continue;
        SupportMask comp(grid);
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = 1;
        while (!q.empty()) {
            const std::size_t p = q.front();
            q.pop();
            comp.set(p, true);
            for_each_neighbor(grid, p, [&](std::size_t nb) {
                if (mask[nb] && !seen[nb]) {
                    seen[nb] = 1;
                    q.push(nb);
                }
            });
        }
        comps.push_back(std::move(comp));
    }
    return comps;
}

double lambda1_restricted(const SupportMask& mask, const Grid& grid) {
    if (mask.flags.size() != grid.size())
        throw std::invalid_argument("lambda1_restricted: mask does not match grid");
    if (mask.count() == 0) throw std::invalid_argument("empty support");
    SupportMask m = mask;
    m.grid = grid;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& comp : connected_components(m))
        best = std::min(best, lambda1_component(comp, grid));
    return best;
}

SupportMask ball_nodes(const Grid& grid, std::span<const double> center, double radius) {
    if (center.size() != static_cast<std::size_t>(grid.dim()))
        throw std::invalid_argument("ball_nodes: center must have dim coordinates");
    SupportMask m(grid);
    const double slack = radius * 1e-12;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double dx = grid.coord(p, a) - center[a];
            r2 += dx * dx;
        }
        if (std::sqrt(r2) <= radius + slack) m.set(p, true);
    }
    return m;
}

std::size_t nearest_node(const Grid& grid, std::span<const double> point) {
    std::size_t node = 0;
    std::size_t stride = 1;
    for (int a = 0; a < grid.dim(); ++a) {
        const double t = std::clamp(point[a] / grid.spacing(a), 0.0,
                                    static_cast<double>(grid.count(a) - 1));
        node += static_cast<std::size_t>(std::lround(t)) * stride;
        stride *= grid.count(a);
    }
    return node;
}

}  // namespace strongcomp

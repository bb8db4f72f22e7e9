#pragma once

// Five-point finite differences for -Laplacian on tensor grids with the
// mixed boundary conditions, and assembly of the linearized operator
// L_u = -Laplacian - f'(r, u) together with its quadratic form.
//
// The stencil is written in flux form and multiplied by the lumped cell
// areas, so the stiffness matrix is the weighted graph Laplacian
//   a_{(i,j),(i+1,j)} = -w_j  rho_{i+1/2} h_theta / h_r
//   a_{(i,j),(i,j+1)} = -h_r / (rho_i h_theta)
// with rho the metric factor (r or 1) and w_j the half weight on Neumann
// columns. Halving the Neumann column is exactly the ghost-node even
// reflection. The disc vertex contributes no flux (rho_{-1/2} = 0).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sectorlab/errors.hpp"
#include "sectorlab/grid.hpp"
#include "sectorlab/sparse.hpp"

namespace sectorlab {

/// Boundary space in which an operator acts.
///   Mixed:        H^1_gamma    (Dirichlet on arcs only)
///   Dirichlet:    H^1_0        (Dirichlet on arcs and both flat edges)
///   InteriorLine: H^1_gamma plus Dirichlet on the interior ray Gamma_alpha
///                 (snapped to grid column `line_column`), optionally
///                 restricted to one of the two sub-sectors.
struct SpaceTag {
    enum class Kind { Mixed, Dirichlet, InteriorLine };
    enum class Side { Both, Below, Above };

    Kind kind = Kind::Mixed;
    std::size_t line_column = 0;
    Side side = Side::Both;

    static SpaceTag mixed() { return {}; }
    static SpaceTag dirichlet() { return {Kind::Dirichlet, 0, Side::Both}; }
    static SpaceTag interior_line(std::size_t column, Side side = Side::Both) {
        return {Kind::InteriorLine, column, side};
    }

    std::string name() const {
        switch (kind) {
            case Kind::Mixed: return "H1_gamma";
            case Kind::Dirichlet: return "H1_0";
            case Kind::InteriorLine: {
                std::string s = "H1_gamma_plus_interior_dirichlet(col=" + std::to_string(line_column);
                if (side == Side::Below) s += ",below";
                if (side == Side::Above) s += ",above";
                return s + ")";
            }
        }
        return "?";
    }
};

/// Column index nearest to the ray theta = alpha and the snapping error.
struct SnappedLine {
    std::size_t column;
    double mismatch;
};

inline SnappedLine snap_to_column(const TensorGrid& g, double alpha) {
    if (!(alpha > 0.0 && alpha < g.beta())) throw DomainError("interior line must lie strictly inside (0, beta)");
    const double pos = alpha / g.h_theta();
    auto col = static_cast<std::size_t>(std::llround(pos));
    col = std::clamp<std::size_t>(col, 1, g.n_theta() - 2);
    return {col, std::abs(static_cast<double>(col) * g.h_theta() - alpha)};
}

/// Map between grid nodes and the free (non-eliminated) unknowns.
struct FreeNodeMap {
    std::vector<long> node_to_free;  // -1 for eliminated nodes
    std::vector<std::size_t> free_to_node;

    std::size_t size() const noexcept { return free_to_node.size(); }
    bool is_free(std::size_t node) const { return node_to_free[node] >= 0; }
};

inline FreeNodeMap free_nodes(const TensorGrid& g, const SpaceTag& space) {
    FreeNodeMap m;
    m.node_to_free.assign(g.size(), -1);
    const std::size_t last_col = g.n_theta() - 1;
    if (space.kind == SpaceTag::Kind::InteriorLine &&
        (space.line_column == 0 || space.line_column >= last_col)) {
        throw DomainError("interior Dirichlet line must be an interior column");
    }
    for (std::size_t i = 0; i < g.n_r(); ++i) {
        if (g.dirichlet_row(i)) continue;
        for (std::size_t j = 0; j <= last_col; ++j) {
            if (space.kind == SpaceTag::Kind::Dirichlet && (j == 0 || j == last_col)) continue;
            if (space.kind == SpaceTag::Kind::InteriorLine) {
                if (j == space.line_column) continue;
                if (space.side == SpaceTag::Side::Below && j > space.line_column) continue;
                if (space.side == SpaceTag::Side::Above && j < space.line_column) continue;
            }
            const std::size_t node = g.index(i, j);
            m.node_to_free[node] = static_cast<long>(m.free_to_node.size());
            m.free_to_node.push_back(node);
        }
    }
    if (m.free_to_node.empty()) throw DomainError("boundary space leaves no free nodes");
    return m;
}

/// Weighted graph Laplacian over every grid node (no eliminations). Its row
/// sums vanish, so constants are in the kernel.
inline SparseMatrix assemble_full_stiffness(const TensorGrid& g) {
    std::vector<Triplet> t;
    t.reserve(g.size() * 5);
    auto couple = [&](std::size_t a, std::size_t b, double w) {
        t.push_back({a, b, -w});
        t.push_back({b, a, -w});
        t.push_back({a, a, w});
        t.push_back({b, b, w});
    };
    const double hr = g.h_r();
    const double ht = g.h_theta();
    for (std::size_t i = 0; i < g.n_r(); ++i) {
        for (std::size_t j = 0; j < g.n_theta(); ++j) {
            const std::size_t node = g.index(i, j);
            if (i + 1 < g.n_r()) couple(node, g.index(i + 1, j), g.column_weight(j) * g.metric_face(i) * ht / hr);
            if (j + 1 < g.n_theta()) couple(node, g.index(i, j + 1), hr / (g.metric(i) * ht));
        }
    }
    return SparseMatrix::from_triplets(g.size(), std::move(t), true);
}

inline std::vector<double> assemble_mass(const TensorGrid& g) {
    std::vector<double> m(g.size());
    for (std::size_t i = 0; i < g.n_r(); ++i) {
        for (std::size_t j = 0; j < g.n_theta(); ++j) m[g.index(i, j)] = g.cell_area(i, j);
    }
    return m;
}

/// Stiffness A (free block), lumped mass M and the free-node map.
struct LaplacianSystem {
    SparseMatrix stiffness;
    std::vector<double> mass;
    FreeNodeMap map;
    SparseMatrix full_stiffness;  // all nodes; used for Dirichlet lifting
    std::vector<double> full_mass;
};

inline SparseMatrix restrict_matrix(const SparseMatrix& full, const FreeNodeMap& map) {
    std::vector<Triplet> t;
    for (std::size_t f = 0; f < map.size(); ++f) {
        const std::size_t node = map.free_to_node[f];
        const auto cols = full.row_cols(node);
        const auto vals = full.row_vals(node);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const long c = map.node_to_free[cols[k]];
            if (c >= 0) t.push_back({f, static_cast<std::size_t>(c), vals[k]});
        }
    }
    return SparseMatrix::from_triplets(map.size(), std::move(t), true);
}

inline LaplacianSystem assemble_laplacian(const TensorGrid& g, const SpaceTag& space) {
    LaplacianSystem sys;
    sys.full_stiffness = assemble_full_stiffness(g);
    sys.full_mass = assemble_mass(g);
    sys.map = free_nodes(g, space);
    sys.stiffness = restrict_matrix(sys.full_stiffness, sys.map);
    sys.mass.resize(sys.map.size());
    for (std::size_t f = 0; f < sys.map.size(); ++f) sys.mass[f] = sys.full_mass[sys.map.free_to_node[f]];
    return sys;
}

inline std::vector<double> restrict_to_free(const ScalarField& v, const FreeNodeMap& map) {
    std::vector<double> out(map.size());
    for (std::size_t f = 0; f < map.size(); ++f) out[f] = v.values[map.free_to_node[f]];
    return out;
}

/// Field that equals x on free nodes and `fill` elsewhere.
inline ScalarField prolong(std::span<const double> x, const FreeNodeMap& map, const TensorGrid& g,
                           double fill = 0.0) {
    ScalarField out(g, fill);
    for (std::size_t f = 0; f < map.size(); ++f) out.values[map.free_to_node[f]] = x[f];
    return out;
}

/// Discrete L_u = A - M V on the free nodes of one boundary space.
struct OperatorSet {
    TensorGrid grid;
    SpaceTag space;
    FreeNodeMap map;
    SparseMatrix stiffness;
    std::vector<double> mass;
    std::vector<double> potential;  // V on free nodes

    std::size_t size() const noexcept { return map.size(); }

    /// K = A - M V as an explicit matrix.
    SparseMatrix operator_matrix() const {
        std::vector<double> d(size());
        for (std::size_t f = 0; f < size(); ++f) d[f] = -mass[f] * potential[f];
        return stiffness.plus_diagonal(d);
    }

    void apply(std::span<const double> x, std::span<double> y) const {
        stiffness.multiply(x, y);
        for (std::size_t f = 0; f < size(); ++f) y[f] -= mass[f] * potential[f] * x[f];
    }
    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> y(size());
        apply(x, y);
        return y;
    }

    double max_abs_potential() const {
        double m = 0.0;
        for (double v : potential) m = std::max(m, std::abs(v));
        return m;
    }
};

/// Operator with a nodal potential given on every grid node.
inline OperatorSet assemble_operator(const TensorGrid& g, const SpaceTag& space, std::span<const double> node_potential) {
    if (node_potential.size() != g.size()) throw DomainError("potential length does not match grid");
    LaplacianSystem sys = assemble_laplacian(g, space);
    OperatorSet ops{g, space, std::move(sys.map), std::move(sys.stiffness), std::move(sys.mass), {}};
    ops.potential.resize(ops.size());
    for (std::size_t f = 0; f < ops.size(); ++f) ops.potential[f] = node_potential[ops.map.free_to_node[f]];
    return ops;
}

inline OperatorSet assemble_operator(const TensorGrid& g, const SpaceTag& space, double constant_potential) {
    const std::vector<double> v(g.size(), constant_potential);
    return assemble_operator(g, space, v);
}

/// Derivative f'(r, u) of the nonlinearity with respect to u.
using NonlinearityDerivative = std::function<double(double r, double u)>;

/// Potential V_i = f'(r_i, u_i) on every node; non-finite values are
/// reported with the node location.
inline std::vector<double> linearization_potential(const ScalarField& u, const NonlinearityDerivative& fprime) {
    const TensorGrid& g = u.grid;
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.n_r(); ++i) {
        for (std::size_t j = 0; j < g.n_theta(); ++j) {
            const double val = fprime(g.r(i), u(i, j));
            if (!std::isfinite(val)) {
                throw RangeError("non-finite f' at node (i=" + std::to_string(i) + ", j=" + std::to_string(j) +
                                 ", r=" + std::to_string(g.r(i)) + ", theta=" + std::to_string(g.theta(j)) + ")");
            }
            v[g.index(i, j)] = val;
        }
    }
    return v;
}

inline OperatorSet assemble_linearized(const ScalarField& u, const NonlinearityDerivative& fprime,
                                       const SpaceTag& space = SpaceTag::mixed()) {
    if (!u.all_finite()) throw DomainError("assemble_linearized: field has non-finite values");
    const auto v = linearization_potential(u, fprime);
    return assemble_operator(u.grid, space, v);
}

/// Q(v) = v^T (A - M V) v over the free nodes. v must vanish (to 1e-12 of
/// its size) on nodes eliminated by the boundary space.
inline double quadratic_form(const OperatorSet& ops, const ScalarField& v) {
    if (!v.grid.same_shape(ops.grid)) throw DomainError("quadratic_form: field lives on a different grid");
    const double limit = 1e-12 * std::max(1.0, v.max_abs());
    for (std::size_t node = 0; node < v.values.size(); ++node) {
        if (!ops.map.is_free(node) && std::abs(v.values[node]) > limit) {
            throw DomainError("quadratic_form: field violates the Dirichlet constraint at node " + std::to_string(node));
        }
    }
    const auto x = restrict_to_free(v, ops.map);
    const auto y = ops.apply(x);
    double q = 0.0;
    for (std::size_t f = 0; f < x.size(); ++f) q += x[f] * y[f];
    return q;
}

/// Discrete L^2 norm sqrt(x^T M x).
inline double mass_norm(std::span<const double> x, std::span<const double> mass) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += mass[k] * x[k] * x[k];
    return std::sqrt(s);
}

/// Norm of a residual vector as a function: sqrt(r^T M^{-1} r).
inline double inverse_mass_norm(std::span<const double> r, std::span<const double> mass) {
    double s = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) s += r[k] * r[k] / mass[k];
    return std::sqrt(s);
}

}  // namespace sectorlab

#pragma once

// Tensor-product grids and nodal fields.
//
// A grid has a "radial" direction (index i, Dirichlet ends) and an "angular"
// direction (index j, Neumann ends on-grid). For sectors these are (r, theta);
// for the rectangle they are (x2, x1) with unit metric.
//
// Radial nodes:
//   disc sector:    r_i = (i + 1/2) h_r,   h_r = r_outer / (n_r - 1/2)
//   annular sector: r_i = r_inner + i h_r, h_r = (r_outer - r_inner) / (n_r - 1)
//   rectangle:      x2_i = i h_r,          h_r = width / (n_r - 1)
// Angular nodes: theta_j = j h_theta, h_theta = beta / (n_theta - 1).
// The disc vertex is never a node: the first radial node sits at h_r / 2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sectorlab/domain.hpp"
#include "sectorlab/errors.hpp"

namespace sectorlab {

enum class Geometry { Polar, Cartesian };

class TensorGrid {
public:
    static TensorGrid sector(const SectorDomain& dom, std::size_t n_r, std::size_t n_theta) {
        check_sizes(n_r, n_theta);
        TensorGrid g;
        g.geometry_ = Geometry::Polar;
        g.sector_ = SectorDomain::make(dom.r_inner, dom.r_outer, dom.beta);
        g.n_r_ = n_r;
        g.n_theta_ = n_theta;
        if (dom.is_disc()) {
            g.h_r_ = dom.r_outer / (static_cast<double>(n_r) - 0.5);
            g.r_first_ = 0.5 * g.h_r_;
        } else {
            g.h_r_ = (dom.r_outer - dom.r_inner) / static_cast<double>(n_r - 1);
            g.r_first_ = dom.r_inner;
        }
        g.h_theta_ = dom.beta / static_cast<double>(n_theta - 1);
        return g;
    }

    static TensorGrid rectangle(const RectDomain& dom, std::size_t n_r, std::size_t n_theta) {
        check_sizes(n_r, n_theta);
        TensorGrid g;
        g.geometry_ = Geometry::Cartesian;
        g.rect_ = RectDomain::make(dom.beta, dom.width);
        g.n_r_ = n_r;
        g.n_theta_ = n_theta;
        g.h_r_ = dom.width / static_cast<double>(n_r - 1);
        g.r_first_ = 0.0;
        g.h_theta_ = dom.beta / static_cast<double>(n_theta - 1);
        return g;
    }

    Geometry geometry() const noexcept { return geometry_; }
    bool is_polar() const noexcept { return geometry_ == Geometry::Polar; }
    const SectorDomain& sector_domain() const noexcept { return sector_; }
    const RectDomain& rect_domain() const noexcept { return rect_; }

    std::size_t n_r() const noexcept { return n_r_; }
    std::size_t n_theta() const noexcept { return n_theta_; }
    std::size_t size() const noexcept { return n_r_ * n_theta_; }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * n_theta_ + j; }
    double h_r() const noexcept { return h_r_; }
    double h_theta() const noexcept { return h_theta_; }

    /// Angular extent (beta for both geometries).
    double beta() const noexcept { return is_polar() ? sector_.beta : rect_.beta; }

    double r(std::size_t i) const noexcept { return r_first_ + static_cast<double>(i) * h_r_; }
    double theta(std::size_t j) const noexcept { return static_cast<double>(j) * h_theta_; }

    /// Metric factor at radial node i (r_i for polar, 1 for Cartesian).
    double metric(std::size_t i) const noexcept { return is_polar() ? r(i) : 1.0; }
    /// Metric factor at the face between radial nodes i and i+1.
    double metric_face(std::size_t i) const noexcept { return is_polar() ? r(i) + 0.5 * h_r_ : 1.0; }

    /// Half weight on the on-grid Neumann columns.
    double column_weight(std::size_t j) const noexcept { return (j == 0 || j + 1 == n_theta_) ? 0.5 : 1.0; }

    /// Lumped mass (cell area) of node (i, j).
    double cell_area(std::size_t i, std::size_t j) const noexcept {
        return metric(i) * h_r_ * h_theta_ * column_weight(j);
    }

    /// Whether radial row i carries Dirichlet data (arcs / long sides).
    bool dirichlet_row(std::size_t i) const noexcept {
        if (i + 1 == n_r_) return true;
        return i == 0 && !staggered();
    }
    bool staggered() const noexcept { return is_polar() && sector_.is_disc(); }

    /// Characteristic mesh width max(h_r, R h_theta) (R = r_outer for sectors).
    double h() const noexcept {
        const double arc = is_polar() ? sector_.r_outer * h_theta_ : h_theta_;
        return std::max(h_r_, arc);
    }

    bool same_shape(const TensorGrid& o) const noexcept {
        return geometry_ == o.geometry_ && n_r_ == o.n_r_ && n_theta_ == o.n_theta_ && h_r_ == o.h_r_ &&
               h_theta_ == o.h_theta_ && r_first_ == o.r_first_;
    }

private:
    static void check_sizes(std::size_t n_r, std::size_t n_theta) {
        if (n_r < 3 || n_theta < 3) throw DomainError("grid needs at least 3 nodes in each direction");
    }

    Geometry geometry_ = Geometry::Polar;
    SectorDomain sector_{};
    RectDomain rect_{};
    std::size_t n_r_ = 0;
    std::size_t n_theta_ = 0;
    double h_r_ = 0.0;
    double h_theta_ = 0.0;
    double r_first_ = 0.0;
};

/// Nodal values on a grid, row-major in r then theta.
struct ScalarField {
    TensorGrid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const TensorGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    ScalarField(const TensorGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size()) throw DomainError("field length does not match grid");
    }

    template <class F>
    static ScalarField from_function(const TensorGrid& g, F&& f) {
        ScalarField out(g);
        for (std::size_t i = 0; i < g.n_r(); ++i) {
            for (std::size_t j = 0; j < g.n_theta(); ++j) out(i, j) = f(g.r(i), g.theta(j));
        }
        return out;
    }

    double& operator()(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
    double operator()(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    bool all_finite() const {
        return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    }
};

/// Field on an angular strip [theta_origin, theta_origin + (n_theta-1) h]
/// of the unwrapped manifold; produced by even extension across an edge.
struct AngularField {
    std::size_t n_r = 0;
    std::size_t n_theta = 0;
    double theta_origin = 0.0;
    double h_theta = 0.0;
    std::vector<double> values;

    static AngularField from(const ScalarField& f) {
        return {f.grid.n_r(), f.grid.n_theta(), 0.0, f.grid.h_theta(), f.values};
    }
    double operator()(std::size_t i, std::size_t j) const { return values[i * n_theta + j]; }
    double theta(std::size_t j) const { return theta_origin + static_cast<double>(j) * h_theta; }
};

enum class Edge { Gamma0, GammaBeta };

/// Even reflection across the lower (Gamma0) or upper (GammaBeta) edge of
/// the strip. The result has 2 n_theta - 1 columns sharing the edge column.
inline AngularField extend_even(const AngularField& f, Edge edge) {
    const std::size_t n = f.n_theta;
    AngularField out;
    out.n_r = f.n_r;
    out.n_theta = 2 * n - 1;
    out.h_theta = f.h_theta;
    out.values.resize(out.n_r * out.n_theta);
    const double span = static_cast<double>(n - 1) * f.h_theta;
    out.theta_origin = edge == Edge::Gamma0 ? f.theta_origin - span : f.theta_origin;
    for (std::size_t i = 0; i < f.n_r; ++i) {
        for (std::size_t j = 0; j < out.n_theta; ++j) {
            std::size_t src = 0;
            if (edge == Edge::Gamma0) {
                src = j < n - 1 ? (n - 1) - j : j - (n - 1);
            } else {
                src = j < n ? j : 2 * (n - 1) - j;
            }
            out.values[i * out.n_theta + j] = f(i, src);
        }
    }
    return out;
}

inline AngularField extend_even(const ScalarField& f, Edge edge) { return extend_even(AngularField::from(f), edge); }

/// Column of the original grid holding the value of the even extension at
/// unwrapped column index m (any integer in [-(n-1), 2(n-1)]).
inline std::size_t fold_column(long m, std::size_t n_theta) {
    const long last = static_cast<long>(n_theta) - 1;
    if (m < 0) m = -m;
    if (m > last) m = 2 * last - m;
    if (m < 0 || m > last) throw DomainError("fold_column: index outside the doubled strip");
    return static_cast<std::size_t>(m);
}

/// Centered angular differences; the Neumann ghost reflection makes the
/// edge columns exactly zero.
inline ScalarField theta_derivative(const ScalarField& v) {
    const TensorGrid& g = v.grid;
    ScalarField out(g);
    const double inv = 1.0 / (2.0 * g.h_theta());
    for (std::size_t i = 0; i < g.n_r(); ++i) {
        for (std::size_t j = 1; j + 1 < g.n_theta(); ++j) out(i, j) = (v(i, j + 1) - v(i, j - 1)) * inv;
    }
    return out;
}

/// u o sigma_{beta/2}: mirror the columns j -> n_theta - 1 - j.
inline ScalarField mirror_columns(const ScalarField& u) {
    ScalarField out(u.grid);
    const std::size_t n = u.grid.n_theta();
    for (std::size_t i = 0; i < u.grid.n_r(); ++i) {
        for (std::size_t j = 0; j < n; ++j) out(i, j) = u(i, n - 1 - j);
    }
    return out;
}

}  // namespace sectorlab

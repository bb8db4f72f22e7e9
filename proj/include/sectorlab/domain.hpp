#pragma once

// Planar sector, annular-sector and rectangle geometry, boundary pieces, and
// the angular reflection sigma_alpha on the unwrapped-angle manifold.

#include <cmath>
#include <numbers>
#include <string>

#include "sectorlab/errors.hpp"

namespace sectorlab {

/// Omega_{0 beta} = { r_inner < r < r_outer, 0 < theta < beta }. r_inner = 0
/// is the disc sector whose vertex is the only point of the axis set.
struct SectorDomain {
    double r_inner = 0.0;
    double r_outer = 1.0;
    double beta = std::numbers::pi / 2.0;

    static SectorDomain make(double r_inner, double r_outer, double beta) {
        if (!(r_inner >= 0.0 && r_inner < r_outer && std::isfinite(r_outer))) {
            throw DomainError("sector radii must satisfy 0 <= r_inner < r_outer");
        }
        if (!(beta > 0.0 && beta < 2.0 * std::numbers::pi)) {
            throw DomainError("sector opening must lie in (0, 2pi), got " + std::to_string(beta));
        }
        return {r_inner, r_outer, beta};
    }

    bool is_disc() const noexcept { return r_inner == 0.0; }
};

/// (0, beta) x (0, width): Neumann ends at x1 = 0, beta and Dirichlet long
/// sides at x2 = 0, width.
struct RectDomain {
    double beta = 1.0;
    double width = 1.0;

    static RectDomain make(double beta, double width) {
        if (!(beta > 0.0 && width > 0.0 && std::isfinite(beta) && std::isfinite(width))) {
            throw DomainError("rectangle sides must be positive");
        }
        return {beta, width};
    }
};

/// Point (r, theta) on the manifold with metric dr^2 + r^2 dt^2. theta is
/// unwrapped: 2 pi + t and t are distinct points.
struct CylCoord {
    double r;
    double theta;
};

/// sigma_alpha(r, t) = (r, 2 alpha - t).
constexpr CylCoord reflect(double alpha, CylCoord p) noexcept { return {p.r, 2.0 * alpha - p.theta}; }

enum class PieceKind {
    GammaTheta,     // flat edge Gamma_theta (Neumann at theta = 0, beta)
    ArcOuter,       // gamma on r = r_outer (Dirichlet)
    ArcInner,       // gamma on r = r_inner > 0 (Dirichlet)
    DirichletSide,  // rectangle long side
    NeumannEnd,     // rectangle end
    Interior,
    Exterior,
};

struct BoundaryPiece {
    PieceKind kind = PieceKind::Interior;
    double angle = 0.0;  // edge angle (or x1 position) for GammaTheta / NeumannEnd

    bool is_dirichlet() const noexcept {
        return kind == PieceKind::ArcOuter || kind == PieceKind::ArcInner || kind == PieceKind::DirichletSide;
    }
    bool on_boundary() const noexcept { return kind != PieceKind::Interior && kind != PieceKind::Exterior; }
};

inline std::string to_string(PieceKind k) {
    switch (k) {
        case PieceKind::GammaTheta: return "GammaTheta";
        case PieceKind::ArcOuter: return "ArcOuter";
        case PieceKind::ArcInner: return "ArcInner";
        case PieceKind::DirichletSide: return "DirichletSide";
        case PieceKind::NeumannEnd: return "NeumannEnd";
        case PieceKind::Interior: return "Interior";
        case PieceKind::Exterior: return "Exterior";
    }
    return "?";
}

/// Classify p against the sector with tolerance band tol. Precedence at
/// corners: Dirichlet arcs first, then the flat edges. The disc vertex
/// (r <= tol when r_inner = 0) belongs to the closure of Gamma_0.
inline BoundaryPiece classify_boundary(const SectorDomain& dom, CylCoord p, double tol) {
    if (!(tol > 0.0)) throw DomainError("classify_boundary: tol must be positive");
    const double t = p.theta;
    const bool in_angle = t >= -tol && t <= dom.beta + tol;
    const bool in_radius = p.r >= dom.r_inner - tol && p.r <= dom.r_outer + tol;
    if (!in_angle || !in_radius) return {PieceKind::Exterior, 0.0};

    if (std::abs(p.r - dom.r_outer) <= tol) return {PieceKind::ArcOuter, 0.0};
    if (!dom.is_disc() && std::abs(p.r - dom.r_inner) <= tol) return {PieceKind::ArcInner, 0.0};
    if (dom.is_disc() && p.r <= tol) return {PieceKind::GammaTheta, 0.0};
    if (std::abs(t) <= tol) return {PieceKind::GammaTheta, 0.0};
    if (std::abs(t - dom.beta) <= tol) return {PieceKind::GammaTheta, dom.beta};
    return {PieceKind::Interior, 0.0};
}

/// Rectangle variant; x1 runs along the Neumann direction, x2 across it.
inline BoundaryPiece classify_boundary(const RectDomain& dom, double x1, double x2, double tol) {
    if (!(tol > 0.0)) throw DomainError("classify_boundary: tol must be positive");
    if (x1 < -tol || x1 > dom.beta + tol || x2 < -tol || x2 > dom.width + tol) return {PieceKind::Exterior, 0.0};
    if (std::abs(x2) <= tol || std::abs(x2 - dom.width) <= tol) return {PieceKind::DirichletSide, 0.0};
    if (std::abs(x1) <= tol) return {PieceKind::NeumannEnd, 0.0};
    if (std::abs(x1 - dom.beta) <= tol) return {PieceKind::NeumannEnd, dom.beta};
    return {PieceKind::Interior, 0.0};
}

}  // namespace sectorlab

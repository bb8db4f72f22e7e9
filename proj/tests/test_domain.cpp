#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sectorlab/domain.hpp"
#include "sectorlab/grid.hpp"

using namespace sectorlab;

TEST(Reflect, Definition) {
    const CylCoord a = reflect(0.7, {1.0, 0.7});
    EXPECT_EQ(a.r, 1.0);
    EXPECT_EQ(a.theta, 0.7);
    const CylCoord b = reflect(0.5, {2.0, 0.2});
    EXPECT_EQ(b.r, 2.0);
    EXPECT_DOUBLE_EQ(b.theta, 0.8);
}

TEST(Reflect, InvolutionPreservesRadius) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(-10.0, 10.0);
    std::uniform_real_distribution<double> rad(0.01, 5.0);
    for (int k = 0; k < 1000; ++k) {
        const double alpha = ang(rng);
        const CylCoord p{rad(rng), ang(rng)};
        const CylCoord q = reflect(alpha, reflect(alpha, p));
        EXPECT_EQ(q.r, p.r);
        EXPECT_NEAR(q.theta, p.theta, 1e-13);
    }
}

TEST(Reflect, UnwrappedAnglesLeaveTheSector) {
    // beta > pi: reflecting across alpha near beta lands beyond 2 pi, not wrapped.
    const CylCoord q = reflect(5.5, {1.0, 0.5});
    EXPECT_DOUBLE_EQ(q.theta, 10.5);
}

TEST(ClassifyBoundary, Examples) {
    const auto quarter = SectorDomain::make(0.0, 1.0, std::numbers::pi / 2);
    EXPECT_EQ(classify_boundary(quarter, {1.0, 0.3}, 1e-9).kind, PieceKind::ArcOuter);
    const auto edge = classify_boundary(quarter, {0.5, 0.0}, 1e-9);
    EXPECT_EQ(edge.kind, PieceKind::GammaTheta);
    EXPECT_EQ(edge.angle, 0.0);
    EXPECT_EQ(classify_boundary(quarter, {0.5, 0.25 * std::numbers::pi}, 1e-9).kind, PieceKind::Interior);
    EXPECT_EQ(classify_boundary(quarter, {0.5, std::numbers::pi / 2}, 1e-9).angle, std::numbers::pi / 2);
    EXPECT_EQ(classify_boundary(quarter, {1.5, 0.3}, 1e-9).kind, PieceKind::Exterior);
    EXPECT_EQ(classify_boundary(quarter, {0.5, 2.0}, 1e-9).kind, PieceKind::Exterior);
    EXPECT_THROW(classify_boundary(quarter, {0.5, 0.1}, 0.0), DomainError);
}

TEST(ClassifyBoundary, CornersPreferDirichlet) {
    const auto ann = SectorDomain::make(0.5, 1.0, 1.0);
    EXPECT_EQ(classify_boundary(ann, {1.0, 0.0}, 1e-9).kind, PieceKind::ArcOuter);
    EXPECT_EQ(classify_boundary(ann, {0.5, 1.0}, 1e-9).kind, PieceKind::ArcInner);
    const auto disc = SectorDomain::make(0.0, 1.0, 1.0);
    EXPECT_EQ(classify_boundary(disc, {0.0, 0.4}, 1e-9).kind, PieceKind::GammaTheta);
    const auto rect = RectDomain::make(2.0, 1.0);
    EXPECT_EQ(classify_boundary(rect, 0.0, 0.0, 1e-9).kind, PieceKind::DirichletSide);
    EXPECT_EQ(classify_boundary(rect, 2.0, 0.5, 1e-9).kind, PieceKind::NeumannEnd);
    EXPECT_EQ(classify_boundary(rect, 1.0, 0.5, 1e-9).kind, PieceKind::Interior);
}

TEST(ClassifyBoundary, DenseBoundarySampleIsFullyClassified) {
    for (const auto& dom : {SectorDomain::make(0.0, 1.0, 1.2), SectorDomain::make(0.3, 2.0, 5.0)}) {
        const int n = 400;
        for (int k = 0; k <= n; ++k) {
            const double t = dom.beta * k / n;
            const double r = dom.r_inner + (dom.r_outer - dom.r_inner) * k / n;
            for (CylCoord p : {CylCoord{dom.r_outer, t}, CylCoord{dom.r_inner, t}, CylCoord{r, 0.0},
                               CylCoord{r, dom.beta}}) {
                const BoundaryPiece b = classify_boundary(dom, p, 1e-12);
                EXPECT_TRUE(b.on_boundary()) << p.r << ' ' << p.theta;
            }
        }
    }
}

TEST(Domain, Validation) {
    EXPECT_THROW(SectorDomain::make(1.0, 0.5, 1.0), DomainError);
    EXPECT_THROW(SectorDomain::make(-0.1, 1.0, 1.0), DomainError);
    EXPECT_THROW(SectorDomain::make(0.0, 1.0, 0.0), DomainError);
    EXPECT_THROW(SectorDomain::make(0.0, 1.0, 2.0 * std::numbers::pi), DomainError);
    EXPECT_THROW(RectDomain::make(0.0, 1.0), DomainError);
}

namespace {
TensorGrid small_grid() { return TensorGrid::sector(SectorDomain::make(0.0, 1.0, 1.0), 6, 9); }
}  // namespace

TEST(ExtendEven, ConstantStaysConstant) {
    const ScalarField c(small_grid(), 2.5);
    for (Edge e : {Edge::Gamma0, Edge::GammaBeta}) {
        const AngularField x = extend_even(c, e);
        EXPECT_EQ(x.n_theta, 17u);
        for (double v : x.values) EXPECT_EQ(v, 2.5);
    }
}

TEST(ExtendEven, CosineAndLinearAcrossGamma0) {
    const TensorGrid g = small_grid();
    const double beta = g.beta();
    const auto cosf = ScalarField::from_function(g, [&](double, double t) { return std::cos(std::numbers::pi * t / beta); });
    const auto lin = ScalarField::from_function(g, [](double, double t) { return t; });
    const AngularField xc = extend_even(cosf, Edge::Gamma0);
    const AngularField xl = extend_even(lin, Edge::Gamma0);
    EXPECT_NEAR(xc.theta(0), -beta, 1e-15);
    for (std::size_t i = 0; i < g.n_r(); ++i) {
        for (std::size_t j = 0; j < xc.n_theta; ++j) {
            const double t = xc.theta(j);
            EXPECT_NEAR(xc(i, j), std::cos(std::numbers::pi * std::abs(t) / beta), 1e-14);
            EXPECT_NEAR(xl(i, j), std::abs(t), 1e-14);
        }
    }
}

TEST(ExtendEven, AcrossGammaBetaIsContinuous) {
    const TensorGrid g = small_grid();
    const auto lin = ScalarField::from_function(g, [](double r, double t) { return r + t; });
    const AngularField x = extend_even(lin, Edge::GammaBeta);
    const std::size_t n = g.n_theta();
    for (std::size_t i = 0; i < g.n_r(); ++i) {
        for (std::size_t k = 0; k < n; ++k) EXPECT_EQ(x(i, n - 1 + k), x(i, n - 1 - k));
    }
}

TEST(ExtendEven, TwiceAcrossTheSameEdgeIsIdempotent) {
    const TensorGrid g = small_grid();
    const auto f = ScalarField::from_function(g, [](double r, double t) { return r * r + std::sin(3.0 * t); });
    for (Edge e : {Edge::Gamma0, Edge::GammaBeta}) {
        const AngularField once = extend_even(f, e);
        const AngularField twice = extend_even(once, e);
        // The second extension reflects the doubled strip about its own edge;
        // restricted to the span of the first extension it reproduces it.
        const std::size_t offset = e == Edge::Gamma0 ? twice.n_theta - once.n_theta : 0;
        for (std::size_t i = 0; i < g.n_r(); ++i) {
            for (std::size_t j = 0; j < once.n_theta; ++j) EXPECT_EQ(twice(i, offset + j), once(i, j));
        }
        const std::size_t n = g.n_theta();
        const long last = static_cast<long>(n) - 1;
        for (long m = -last; m <= 2 * last; ++m) {
            const std::size_t c = fold_column(m, n);
            EXPECT_EQ(fold_column(static_cast<long>(c), n), c);
        }
    }
}

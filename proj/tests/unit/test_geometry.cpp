#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <rte_aot/errors.hpp>
#include <rte_aot/geometry.hpp>
#include <rte_aot/quadrature.hpp>
#include <rte_aot/sources.hpp>

using namespace rte_aot;

namespace
{
Domain const disk = Domain::disk({0, 0}, 1);
}

TEST(ExitTime, CentreOfUnitDisk)
{
    for (double a : {0.0, 0.7, 2.0, 4.5})
    {
        EXPECT_NEAR(exit_time(disk, {0, 0}, unit(a), Side::plus), 1.0, 1e-14);
        EXPECT_NEAR(exit_time(disk, {0, 0}, unit(a), Side::minus), 1.0, 1e-14);
    }
}

TEST(ExitTime, AlongDiameter)
{
    EXPECT_NEAR(exit_time(disk, {0.5, 0}, {1, 0}, Side::plus), 0.5, 1e-14);
    EXPECT_NEAR(exit_time(disk, {0.5, 0}, {1, 0}, Side::minus), 1.5, 1e-14);
}

TEST(ExitTime, OffAxisChord)
{
    EXPECT_NEAR(exit_time(disk, {0, 0.5}, {1, 0}, Side::plus), std::sqrt(0.75), 1e-14);
    EXPECT_NEAR(exit_time(disk, {0, 0.5}, {1, 0}, Side::minus), std::sqrt(0.75), 1e-14);
}

TEST(ExitTime, RejectsOutsidePointsAndBadDirections)
{
    EXPECT_THROW(exit_time(disk, {2, 0}, {1, 0}, Side::plus), DomainError);
    EXPECT_THROW(exit_time(disk, {0, 0}, {2, 0}, Side::plus), ArgumentError);
}

TEST(ExitTime, Rectangle)
{
    auto r = Domain::rectangle({-1, -1}, {1, 1});
    EXPECT_NEAR(exit_time(r, {0.25, 0}, {1, 0}, Side::plus), 0.75, 1e-14);
    EXPECT_NEAR(exit_time(r, {0, 0}, unit(std::numbers::pi / 4), Side::minus), std::sqrt(2.0), 1e-12);
}

TEST(ClassifyBoundary, UnitDisk)
{
    EXPECT_EQ(classify_boundary(disk, {1, 0}, {1, 0}).flow, FlowClass::outflow);
    EXPECT_EQ(classify_boundary(disk, {1, 0}, {-1, 0}).flow, FlowClass::inflow);
    EXPECT_EQ(classify_boundary(disk, {1, 0}, {0, 1}).flow, FlowClass::tangential);
    auto bp = classify_boundary(disk, {1, 0}, {1, 0});
    EXPECT_NEAR(bp.normal.x, 1, 1e-14);
    EXPECT_NEAR(bp.normal.y, 0, 1e-14);
}

TEST(ChordQuadrature, ConstantIntegrand)
{
    auto nodes = chord_quadrature(disk, {0.5, 0}, {1, 0}, 0.01);
    double s = 0;
    for (auto const& n : nodes)
        s += n.weight;
    EXPECT_NEAR(s, 1.5, 1e-9);
}

TEST(ChordQuadrature, Cosine)
{
    auto nodes = chord_quadrature(disk, {0, 0}, {1, 0}, 0.005);
    double s = 0;
    for (auto const& n : nodes)
        s += n.weight * std::cos(10 * n.t);
    EXPECT_NEAR(s, std::sin(10.0) / 10, 1e-6);
}

TEST(ChordQuadrature, SignFlipCancelsWithBreakpoints)
{
    double h = 0.1;
    PlaneFamily planes{{1, 0}, h, 0};
    auto nodes = chord_quadrature(disk, {0, 0}, {1, 0}, 0.03, planes);
    double s = 0;
    for (auto const& n : nodes)
        s += n.weight * parity_sign(n.t / h);
    EXPECT_NEAR(s, 0.0, 1e-12);
}

TEST(DirectionGrid, EightDirections)
{
    DirectionGrid g(8);
    ASSERT_EQ(g.size(), 8);
    EXPECT_NEAR(g.weight(), std::numbers::pi / 4, 1e-15);
    for (int j = 0; j < 8; ++j)
    {
        EXPECT_NEAR(g.angle(j), 2 * std::numbers::pi * j / 8, 1e-14);
        Vec2 a = g.direction(j), b = g.direction(g.opposite(j));
        EXPECT_NEAR(a.x + b.x, 0, 1e-14);
        EXPECT_NEAR(a.y + b.y, 0, 1e-14);
    }
}

TEST(SpatialGrid, DiskVolume)
{
    SpatialGrid g(disk, 64);
    EXPECT_NEAR(g.total_volume(), std::numbers::pi, 0.005 * std::numbers::pi);
}

TEST(SpatialGrid, HatMassesSumToArea)
{
    SpatialGrid g(disk, 48);
    auto m = g.hat_masses(disk);
    double s = 0;
    for (double v : m)
        s += v;
    EXPECT_NEAR(s * g.cell_area(), std::numbers::pi, 1e-3);
}

TEST(BoundaryGrid, ArcWeightsCoverPerimeter)
{
    auto b = make_boundary_grid(disk, 200);
    EXPECT_NEAR(b.arc_weight * b.size(), 2 * std::numbers::pi, 1e-12);
    for (int i = 0; i < b.size(); ++i)
        EXPECT_NEAR(norm(b.points[i]), 1.0, 1e-12);
}

TEST(Quadrature, GaussLegendreIntegratesPolynomials)
{
    for (int order : {2, 3, 4, 8, 16})
    {
        auto const& r = gauss_legendre(order);
        double s = 0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i)
            s += r.weights[i] * std::pow(r.nodes[i], 2 * order - 2);
        EXPECT_NEAR(s, 2.0 / (2 * order - 1), 1e-13) << order;
    }
    EXPECT_THROW(gauss_legendre(5), ArgumentError);
}

TEST(Quadrature, LogLogSlope)
{
    std::vector<double> x{0.1, 0.05, 0.025}, y{0.04, 0.01, 0.0025};
    EXPECT_NEAR(loglog_slope(x, y), 2.0, 1e-12);
}

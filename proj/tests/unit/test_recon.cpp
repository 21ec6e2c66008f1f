#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <rte_aot/errors.hpp>
#include <rte_aot/recon.hpp>

using namespace rte_aot;

namespace
{
Domain const disk = Domain::disk({0, 0}, 1);

DiscretizationPtr ref_disc()
{
    static auto d = make_discretization(disk, 64, 96, 384);
    return d;
}

Medium constant(double sigma, double kappa)
{
    if (kappa == 0)
        return Medium(ScalarField::constant(sigma), ScatteringKernel::none());
    return Medium(ScalarField::constant(sigma), ScatteringKernel::isotropic(ScalarField::constant(kappa)));
}
}  // namespace

TEST(Sources, FhNorms)
{
    auto f = make_f_h(0.0, 0.04);
    EXPECT_NEAR(f.amplitude(), 5.0, 1e-14);
    EXPECT_NEAR(f.angular_l1(), 0.4, 1e-14);
    EXPECT_NEAR(f({1, 0}, unit(0.0)), 5.0, 1e-14);
    EXPECT_EQ(f({1, 0}, unit(0.05)), 0.0);
    for (double h : {0.08, 0.04, 0.02})
    {
        auto fh = make_f_h(0.3, h);
        EXPECT_NEAR(2 * h * fh.amplitude() * fh.amplitude(), 2.0, 1e-12);
    }
}

TEST(Sources, FhRejectsBadH)
{
    EXPECT_THROW(make_f_h(0.0, -0.1), ArgumentError);
    EXPECT_THROW(make_f_h(0.0, 0.0), ArgumentError);
}

TEST(Sources, GhAmplitudeAndStripes)
{
    double h = 0.05;
    auto g = make_g_h(std::numbers::pi / 2, h);
    EXPECT_NEAR(g.amplitude(), 20.0, 1e-12);
    Vec2 th = unit(std::numbers::pi / 2);
    // stripes run across theta1 = (0, 1): the frame coordinate is x1 / h
    auto on_circle = [](double x1) { return Vec2{x1, -std::sqrt(1 - x1 * x1)}; };
    EXPECT_NEAR(g(on_circle(0.5 * h), th), 20.0, 1e-12);
    EXPECT_NEAR(g(on_circle(1.5 * h), th), -20.0, 1e-12);
    EXPECT_NEAR(g(on_circle(-0.5 * h), th), -20.0, 1e-12);
    auto const& frame = *g.frame();
    EXPECT_NEAR(frame.across.x * frame.period / h, 1.0, 1e-14);
    EXPECT_NEAR(frame.across.y, 0.0, 1e-14);
}

TEST(Sources, ParitySign)
{
    EXPECT_EQ(parity_sign(0.5), 1.0);
    EXPECT_EQ(parity_sign(1.5), -1.0);
    EXPECT_EQ(parity_sign(-0.5), -1.0);
}

TEST(Sources, ReflectionFlipsSideAndDirection)
{
    auto g = BoundarySource::angular([](Vec2 th) { return 1 + th.x; }, BoundarySide::outflow);
    auto r = g.reflected();
    EXPECT_EQ(r.side(), BoundarySide::inflow);
    EXPECT_NEAR(r({1, 0}, {1, 0}), 0.0, 1e-15);
    EXPECT_NEAR(r({1, 0}, {-1, 0}), 2.0, 1e-15);
}

TEST(Sigma, ConstantAbsorptionWithoutScattering)
{
    Transport t(constant(0.5, 0), ref_disc());
    std::vector<Vec2> pts{{0, 0}, {0.3, -0.2}};
    for (double h : {0.04, 0.02})
    {
        auto r = recover_sigma(t, 0.3, h, pts);
        for (auto const& p : r.points)
            EXPECT_NEAR(p.sigma_hat, 0.5, 0.5 * h);
    }
}

TEST(Sigma, ScatteringOnlyMedium)
{
    Transport t(constant(0, 0.3), ref_disc());
    std::vector<Vec2> pts{{0, 0}, {-0.2, 0.3}};
    auto r = recover_sigma(t, 0.3, 0.02, pts);
    for (auto const& p : r.points)
        EXPECT_NEAR(p.sigma_hat, 0.0, 0.02);
}

TEST(Sigma, BumpMediumAtNinePoints)
{
    Transport t(Medium(ScalarField::bumps(0.6, {{{0, 0}, 0.2, 0.1}}), ScatteringKernel::isotropic(ScalarField::constant(0.3))),
                ref_disc());
    std::vector<Vec2> pts;
    for (double y : {-0.4, 0.0, 0.4})
        for (double x : {-0.4, 0.0, 0.4})
            pts.push_back({x, y});
    auto r = recover_sigma(t, 0.3, 0.02, pts);
    ASSERT_EQ(r.points.size(), 9u);
    for (auto const& p : r.points)
        EXPECT_LE(std::abs(p.sigma_hat / t.medium().sigma(p.x) - 1), 0.05);
}

TEST(Kernel, ZeroKernel)
{
    Transport t(constant(0.5, 0), ref_disc());
    std::vector<KernelSample> s{{{0, 0}, 0, std::numbers::pi / 2}};
    auto r = recover_k(t, ScalarField::constant(0.5), s, 0.04);
    EXPECT_NEAR(r.points[0].k_hat, 0.0, 1e-3);
}

TEST(Kernel, IsotropicRightAngle)
{
    Transport t(constant(0.5, 0.3), ref_disc());
    std::vector<KernelSample> s{{{0, 0}, 0, std::numbers::pi / 2}};
    auto r = recover_k(t, ScalarField::constant(0.5), s, 0.02);
    EXPECT_NEAR(r.points[0].k_hat, 0.3 / (2 * std::numbers::pi), 0.1 * 0.3 / (2 * std::numbers::pi));
}

TEST(Kernel, AngleGuard)
{
    Transport t(constant(0.5, 0.3), ref_disc());
    std::vector<KernelSample> s{{{0, 0}, 0, 0.1}};
    EXPECT_THROW(recover_k(t, ScalarField::constant(0.5), s, 0.02), ArgumentError);
}

TEST(Study, TableRatiosAndOrders)
{
    std::vector<double> p{0.08, 0.04, 0.02}, e{0.4, 0.2, 0.1};
    auto t = make_table("x", p, e);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_TRUE(std::isnan(t.rows[0].ratio));
    EXPECT_NEAR(t.rows[1].ratio, 2.0, 1e-14);
    EXPECT_NEAR(t.rows[2].order, 1.0, 1e-12);
}

TEST(Study, NeedsThreeParameters)
{
    StudySetup s;
    s.medium = constant(0.5, 0.3);
    s.disc = make_discretization(disk, 16, 16, 64);
    std::vector<double> p{0.08, 0.04};
    EXPECT_THROW(run_convergence_study(StudyKind::ballistic, p, s), ArgumentError);
}

TEST(Stability, ZeroPerturbation)
{
    StudySetup s;
    s.medium = Medium(ScalarField::bumps(0.6, {{{0, 0}, 0.2, 0.1}}), ScatteringKernel::isotropic(ScalarField::constant(0.3)));
    s.disc = make_discretization(disk, 32, 48, 192);
    s.theta0 = 0.3;
    s.eval_points = {{0, 0}, {0.2, 0.1}};
    s.kernel_samples = {{{0, 0}, 0, std::numbers::pi / 2}};
    std::vector<double> deltas{0.0, 0.02};
    auto st = run_stability_study(s, deltas, 0.08);
    ASSERT_EQ(st.rows.size(), 2u);
    EXPECT_EQ(st.rows[0].sigma_diff, 0.0);
    EXPECT_EQ(st.rows[0].h_diff, 0.0);
    EXPECT_GT(st.rows[1].h_diff, 0.0);
}

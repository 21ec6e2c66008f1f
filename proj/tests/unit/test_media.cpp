#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <rte_aot/errors.hpp>
#include <rte_aot/media.hpp>

using namespace rte_aot;

namespace
{
Domain const disk = Domain::disk({0, 0}, 1);

Medium constant(double sigma, double kappa)
{
    return Medium(ScalarField::constant(sigma), ScatteringKernel::isotropic(ScalarField::constant(kappa)));
}
}  // namespace

TEST(Rho, IsotropicConstant)
{
    auto g = build_grids(disk, 32, 24, 64);
    EXPECT_NEAR(rho(constant(0.5, 0.3), g.directions, g.spatial), 0.3, 1e-10);
}

TEST(Rho, NoScattering)
{
    auto g = build_grids(disk, 32, 24, 64);
    Medium m(ScalarField::constant(0.5), ScatteringKernel::none());
    EXPECT_EQ(rho(m, g.directions, g.spatial), 0.0);
}

TEST(Rho, HenyeyGreensteinNormalises)
{
    auto g = build_grids(disk, 64, 24, 64);
    Medium m(ScalarField::constant(0.5), ScatteringKernel::henyey_greenstein(ScalarField::constant(0.3), 0.5));
    EXPECT_NEAR(rho(m, g.directions, g.spatial), 0.3, 1e-6);

    // dense oracle of the phase integral
    double s = 0;
    int n = 20000;
    for (int i = 0; i < n; ++i)
        s += m.kernel().phase(std::cos(2 * std::numbers::pi * (i + 0.5) / n));
    EXPECT_NEAR(s * 2 * std::numbers::pi / n, 1.0, 1e-10);
}

TEST(Admissibility, Both)
{
    auto g = build_grids(disk, 32, 24, 64);
    auto r = check_admissibility(constant(0.5, 0.3), disk, g);
    EXPECT_NEAR(r.tau, 2.0, 1e-12);
    EXPECT_NEAR(r.tau_rho, 0.6, 1e-9);
    EXPECT_NEAR(r.alpha, 0.2, 1e-9);
    EXPECT_EQ(r.condition_met, Condition::both);
}

TEST(Admissibility, NeitherThrowsNamingBoth)
{
    auto g = build_grids(disk, 32, 24, 64);
    auto r = admissibility(constant(0.1, 0.6), disk, g);
    EXPECT_NEAR(r.tau_rho, 1.2, 1e-9);
    EXPECT_NEAR(r.alpha, -0.5, 1e-9);
    EXPECT_EQ(r.condition_met, Condition::neither);
    try
    {
        check_admissibility(constant(0.1, 0.6), disk, g);
        FAIL() << "expected InadmissibleMedium";
    }
    catch (InadmissibleMedium const& e)
    {
        std::string msg = e.what();
        EXPECT_NE(msg.find("smallness"), std::string::npos);
        EXPECT_NE(msg.find("absorption"), std::string::npos);
    }
}

TEST(Admissibility, SmallnessOnly)
{
    auto g = build_grids(disk, 32, 24, 64);
    auto r = check_admissibility(constant(0.0, 0.4), disk, g);
    EXPECT_NEAR(r.tau_rho, 0.8, 1e-9);
    EXPECT_EQ(r.condition_met, Condition::smallness);
}

TEST(OpticalDepth, Constant)
{
    EXPECT_NEAR(optical_depth(constant(0.5, 0), disk, {-0.5, 0}, {1, 0}, 1.5, Orientation::forward), 0.75, 1e-14);
    EXPECT_EQ(optical_depth(constant(0.0, 0), disk, {0.2, 0.1}, {0, 1}, 0.7, Orientation::backward), 0.0);
}

TEST(OpticalDepth, GaussianBumpMatchesDenseQuadrature)
{
    Medium m(ScalarField::bumps(0.6, {{{0, 0}, 0.2, 0.1}}), ScatteringKernel::none());
    double d = optical_depth(m, disk, {0, 0}, {1, 0}, 1.0, Orientation::forward);
    // closed form: 0.6 + 0.2 * sqrt(0.1) * sqrt(pi)/2 * erf(1/sqrt(0.1))
    double exact = 0.6 + 0.2 * std::sqrt(0.1) * std::sqrt(std::numbers::pi) / 2 * std::erf(1 / std::sqrt(0.1));
    EXPECT_NEAR(d, exact, 1e-8);
}

TEST(Modulate, ZeroEpsilonIsIdentity)
{
    Medium m(ScalarField::bumps(0.6, {{{0.1, 0}, 0.2, 0.1}}), ScatteringKernel::isotropic(ScalarField::constant(0.3)));
    auto me = modulate(m, disk, 0.0, {3, 1}, 0.4);
    for (Vec2 x : {Vec2{0, 0}, Vec2{0.3, -0.2}, Vec2{-0.7, 0.1}})
    {
        EXPECT_DOUBLE_EQ(me.sigma(x), m.sigma(x));
        EXPECT_DOUBLE_EQ(me.kappa(x), m.kappa(x));
    }
}

TEST(Modulate, ZeroFrequencyScalesUniformly)
{
    auto m = constant(0.5, 0.3);
    auto me = modulate(m, disk, 0.1, {0, 0}, 0);
    EXPECT_NEAR(me.sigma({0.2, 0.3}), 0.55, 1e-15);
    EXPECT_NEAR(me.kappa({-0.4, 0.1}), 0.33, 1e-15);
}

TEST(Modulate, PointEvaluation)
{
    auto me = modulate(constant(0.5, 0.3), disk, 0.1, {std::numbers::pi, 0}, 0);
    EXPECT_NEAR(me.sigma({1, 0}), 0.45, 1e-15);
}

TEST(Modulate, RejectsBadEpsilon)
{
    EXPECT_THROW(modulate(constant(0.5, 0.3), disk, -0.1, {1, 0}, 0), ArgumentError);
}

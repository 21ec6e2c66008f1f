#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <rte_aot/errors.hpp>
#include <rte_aot/functional.hpp>
#include <rte_aot/recon.hpp>

using namespace rte_aot;

namespace
{
Domain const disk = Domain::disk({0, 0}, 1);

DiscretizationPtr small_disc()
{
    static auto d = make_discretization(disk, 32, 48, 192);
    return d;
}

Medium constant(double sigma, double kappa)
{
    if (kappa == 0)
        return Medium(ScalarField::constant(sigma), ScatteringKernel::none());
    return Medium(ScalarField::constant(sigma), ScatteringKernel::isotropic(ScalarField::constant(kappa)));
}

Medium bump_medium()
{
    return Medium(ScalarField::bumps(0.6, {{{0, 0}, 0.2, 0.1}}), ScatteringKernel::isotropic(ScalarField::constant(0.3)));
}

BoundarySource smooth_f()
{
    return BoundarySource::angular([](Vec2 th) { return 1 + 0.5 * th.x; });
}

BoundarySource smooth_g()
{
    return BoundarySource::boundary_function([](Vec2 b, Vec2 th) { return 1 + 0.3 * th.y + 0.2 * b.y; },
                                             BoundarySide::outflow);
}

BoundarySource ones(BoundarySide side = BoundarySide::inflow)
{
    return BoundarySource::angular([](Vec2) { return 1.0; }, side);
}
}  // namespace

TEST(Pairing, ConstantTracesCancel)
{
    auto d = small_disc();
    BoundaryTrace one{d->boundary().size(), d->n_theta(), std::vector<double>(d->boundary().size() * d->n_theta(), 1.0)};
    EXPECT_NEAR(boundary_pairing(one, one, d->boundary(), d->directions()), 0.0, 1e-12);
}

TEST(Pairing, MismatchedTracesRejected)
{
    auto d = small_disc();
    BoundaryTrace a{3, 4, std::vector<double>(12, 1.0)};
    EXPECT_THROW(boundary_pairing(a, a, d->boundary(), d->directions()), ArgumentError);
}

TEST(Pairing, GreenIdentityUnmodulated)
{
    auto d = small_disc();
    Transport t(bump_medium(), d);
    auto u = t.solve_forward(smooth_f());
    auto v = t.solve_adjoint(smooth_g());
    double p = boundary_pairing(t.trace(u), t.trace(v), d->boundary(), d->directions());
    EXPECT_LE(std::abs(p), 5e-4 * u.field.sup_norm() * v.field.sup_norm());
}

TEST(Measure, VanishesAsEpsilonVanishes)
{
    Measurer m(bump_medium(), small_disc(), smooth_f(), smooth_g());
    double big = m.measure(0.1, {3, 0}, 0);
    double tiny = m.measure(1e-4, {3, 0}, 0);
    EXPECT_LT(std::abs(tiny), 2e-3 * std::abs(big));
}

TEST(Measure, LinearInEpsilon)
{
    Measurer m(bump_medium(), small_disc(), smooth_f(), smooth_g());
    Vec2 q{2, 1};
    double m1 = m.measure(0.1, q, 0), m2 = m.measure(0.05, q, 0), m4 = m.measure(0.025, q, 0);
    double r1 = std::abs(m1 - 2 * m2), r2 = std::abs(m2 - 2 * m4);
    EXPECT_LT(r1, 0.05 * std::abs(m1));
    EXPECT_GT(r1 / r2, 3.0);
    EXPECT_LT(r1 / r2, 5.0);
}

TEST(Measure, ConjugateSymmetry)
{
    Measurer m(bump_medium(), small_disc(), smooth_f(), smooth_g());
    Vec2 q{3, -2};
    EXPECT_NEAR(m.measure(0.05, q, 0), m.measure(0.05, -q, 0), 1e-12);
    // the sine phase modulates +q and -q media differently; only the linear part is odd
    auto odd_defect = [&](double eps) {
        return m.measure(eps, q, std::numbers::pi / 2) + m.measure(eps, -q, std::numbers::pi / 2);
    };
    double r = odd_defect(0.05) / odd_defect(0.025);
    EXPECT_GT(r, 3.0);
    EXPECT_LT(r, 5.0);
}

TEST(Measure, MatchesVolumeIntegralOfH)
{
    auto d = small_disc();
    Measurer m(constant(0.5, 0.3), d, smooth_f(), smooth_g());
    auto const& t = m.transport();
    auto h = oracle_H(t, t.solve_forward(smooth_f()), m.adjoint());
    Vec2 q{std::numbers::pi, 0};
    double eps = 0.1, oracle = 0;
    auto const& g = d->spatial();
    auto const& mass = d->hat_masses();
    for (std::size_t i = 0; i < g.lattice_size(); ++i)
        if (mass[i] > 0)
            oracle += eps * std::cos(dot(q, g.node(int(i)))) * h.values[i] * mass[i] * g.cell_area();
    // linear coefficient by Richardson in eps
    double lin = (4 * m.measure(eps / 2, q, 0) - m.measure(eps, q, 0)) / eps;
    EXPECT_NEAR(lin * eps, oracle, 0.05 * std::abs(oracle));
}

TEST(Measure, NoScatteringMatchesAbsorptionOracle)
{
    auto d = small_disc();
    Medium med(ScalarField::bumps(0.6, {{{0, 0}, 0.2, 0.1}}), ScatteringKernel::none());
    Measurer m(med, d, smooth_f(), smooth_g());
    auto const& t = m.transport();
    auto u = t.solve_forward(smooth_f());
    auto const& v = m.adjoint();
    Vec2 q{2, 2};
    double phi = 0.3, eps = 0.02, oracle = 0;
    auto const& g = d->spatial();
    auto const& mass = d->hat_masses();
    for (int idx : g.active_nodes())
    {
        if (mass[idx] <= 0)
            continue;
        double uv = 0;
        for (int k = 0; k < d->n_theta(); ++k)
            uv += u.field.node_value(idx, k) * v.field.node_value(idx, k) * d->directions().weight();
        Vec2 x = g.eval_point(idx);
        oracle -= std::cos(dot(q, g.node(idx)) + phi) * med.sigma(x) * uv * mass[idx] * g.cell_area();
    }
    EXPECT_NEAR(m.measure(eps, q, phi) / eps, oracle, 0.05 * std::abs(oracle));
}

TEST(FourierRecovery, ZeroMeasurementsGiveZero)
{
    SpatialGrid grid(disk, 16);
    MeasurementSet m;
    m.epsilon = 0.05;
    m.n_q = 16;
    m.extent = grid.extent();
    for (int m2 = -8; m2 < 8; ++m2)
        for (int m1 = -8; m1 < 8; ++m1)
            for (int p = 0; p < 2; ++p)
                m.entries.push_back({m.q(m1, m2), p * std::numbers::pi / 2, 0.0});
    auto h = recover_H_fourier(m, grid);
    for (double v : h.values)
        EXPECT_EQ(v, 0.0);
}

TEST(FourierRecovery, RoundTrip)
{
    SpatialGrid grid(disk, 24);
    std::vector<double> h(grid.lattice_size(), 0.0);
    for (int idx : grid.inside_nodes())
    {
        Vec2 x = grid.node(idx);
        h[idx] = std::exp(-2 * dot(x, x)) + 0.3 * x.x;
    }
    auto m = synthesize_measurements(h, grid, 0.05);
    EXPECT_EQ(m.entries.size(), 24u * 24u * 2u);
    auto back = recover_H_fourier(m, grid);
    for (std::size_t i = 0; i < h.size(); ++i)
        ASSERT_NEAR(back.values[i], h[i], 1e-10);
    EXPECT_EQ(back.provenance, Route::fourier);
}

TEST(FourierRecovery, SynthesisIsConjugateSymmetric)
{
    SpatialGrid grid(disk, 16);
    std::vector<double> h(grid.lattice_size(), 0.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int idx : grid.inside_nodes())
        h[idx] = u(rng);
    auto m = synthesize_measurements(h, grid, 0.1);
    for (int m2 = -7; m2 < 8; ++m2)
        for (int m1 = -7; m1 < 8; ++m1)
        {
            EXPECT_NEAR(m.entries[m.index(m1, m2, 0)].value, m.entries[m.index(-m1, -m2, 0)].value, 1e-12);
            EXPECT_NEAR(m.entries[m.index(m1, m2, 1)].value, -m.entries[m.index(-m1, -m2, 1)].value, 1e-12);
        }
}

TEST(FourierRecovery, RejectsMismatchedGrid)
{
    SpatialGrid grid(disk, 16);
    auto m = synthesize_measurements(std::vector<double>(grid.lattice_size(), 0.0), grid, 0.1);
    EXPECT_THROW(recover_H_fourier(m, SpatialGrid(disk, 24)), ArgumentError);
}

TEST(InternalFunctional, ClosedFormWithoutScattering)
{
    auto d = small_disc();
    double c = 0.5;
    Transport t(constant(c, 0), d);
    auto h = oracle_H(t, ones(), ones(BoundarySide::outflow));
    auto const& dirs = d->directions();
    for (int i : {0, 100, 500, 1200})
    {
        int idx = d->spatial().inside_nodes()[i];
        Vec2 x = d->spatial().eval_point(idx);
        double s = 0;
        for (int k = 0; k < dirs.size(); ++k)
        {
            Vec2 th = dirs.direction(k);
            s += std::exp(-c * (exit_time(disk, x, th, Side::minus) + exit_time(disk, x, th, Side::plus)));
        }
        EXPECT_NEAR(h.values[idx], -c * s * dirs.weight(), 1e-10);
    }
}

TEST(InternalFunctional, VacuumGivesZero)
{
    auto d = small_disc();
    Transport t(constant(0, 0), d);
    auto h = oracle_H(t, smooth_f(), smooth_g());
    for (double v : h.values)
        EXPECT_EQ(v, 0.0);
}

TEST(InternalFunctional, ConcentratedPairApproachesBallisticProduct)
{
    auto d = make_discretization(disk, 64, 96, 384);
    Medium m = bump_medium();
    Transport t(m, d);
    Vec2 x{0.2, -0.1};
    double th0 = 0.3;
    Vec2 th = unit(th0);
    double predicted = -2 * m.sigma(x) * std::exp(-t.depth(x, -th, exit_time(disk, x, th, Side::minus)))
                       * std::exp(-t.depth(x, th, exit_time(disk, x, th, Side::plus)));
    std::vector<double> err;
    for (double h : {0.08, 0.04, 0.02})
    {
        auto u = t.solve_forward(make_f_h(th0, h));
        auto v = t.solve_adjoint(make_f_h(th0, h, BoundarySide::outflow));
        err.push_back(std::abs(internal_functional_at(t, u.field, v.field, x) / predicted - 1));
    }
    EXPECT_LT(err[2], err[0]);
    EXPECT_LT(err[2], 0.05);
}

TEST(InternalFunctional, AngularBreaksCoverCircle)
{
    auto d = small_disc();
    Transport t(bump_medium(), d);
    auto u = t.solve_forward(make_f_h(0.3, 0.02));
    auto v = t.solve_adjoint(make_f_h(0.3, 0.02, BoundarySide::outflow));
    auto b = angular_breaks(u.field, v.field, {0.1, 0.1});
    ASSERT_GE(b.size(), 49u);
    EXPECT_NEAR(b.back() - b.front(), 2 * std::numbers::pi, 1e-12);
    EXPECT_TRUE(std::is_sorted(b.begin(), b.end()));
}

TEST(Stability, IdenticalMediaGiveZero)
{
    auto d = small_disc();
    Transport t(bump_medium(), d);
    auto h = oracle_H(t, smooth_f(), smooth_g());
    auto af = t.albedo(smooth_f());
    auto ag = t.albedo(smooth_g().on_side(BoundarySide::inflow));
    auto r = stability_metric(h, h, d->spatial(), af, af, ag, ag, 2, 2);
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_EQ(r.rhs, 0.0);
}

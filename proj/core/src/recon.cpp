#include "rte_aot/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rte_aot/errors.hpp"
#include "rte_aot/parallel.hpp"
#include "rte_aot/quadrature.hpp"

namespace rte_aot
{
namespace
{
constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void check_h(double h)
{
    if (!(h > 0 && h < pi / 4))
        throw ArgumentError("h must lie in (0, pi/4)");
}

// u - J f at (x, theta); the ballistic term is the first part of a forward solution.
double scattered_value(TransportField const& u, Vec2 x, Vec2 theta)
{
    double v = u.grid_value(x, theta);
    auto const& parts = u.parts();
    for (std::size_t i = 1; i < parts.size(); ++i)
        v += parts[i]->value(x, theta);
    return v;
}

double scattered_sup(Solution const& s, Discretization const& disc)
{
    double m = 0;
    std::size_t lat = disc.lattice_size();
    if (s.scattered.empty())
        return 0;
    for (int d = 0; d < disc.n_theta(); ++d)
        for (int idx : disc.spatial().inside_nodes())
            m = std::max(m, std::abs(s.scattered[d * lat + idx]));
    return m;
}

ScatteringKernel with_kappa(ScatteringKernel const& k, ScalarField kappa)
{
    if (k.kind() == KernelKind::henyey_greenstein)
        return ScatteringKernel::henyey_greenstein(std::move(kappa), k.g());
    return ScatteringKernel::isotropic(std::move(kappa));
}

void require_three(std::span<double const> params)
{
    if (params.size() < 3)
        throw ArgumentError("a convergence study needs at least three parameter values");
    for (double p : params)
        if (!(p > 0))
            throw ArgumentError("study parameters must be positive");
}

}  // namespace

BoundarySource make_f_h(double theta0, double h, BoundarySide side)
{
    check_h(h);
    return BoundarySource::concentrated({theta0, h}, 1 / std::sqrt(h), side);
}

BoundarySource make_g_h(double theta1, double h, BoundarySide side, GhOptions opts)
{
    check_h(h);
    double w = opts.half_width.value_or(h);
    if (!(w > 0 && w <= h))
        throw ArgumentError("g_h arc half width must lie in (0, h]");
    Vec2 t = unit(theta1);
    OscillationFrame frame{{t.y, -t.x}, h, opts.offset};
    return BoundarySource::oscillatory({theta1, w}, 1 / w, frame, side);
}

double kernel_angle_guard(double h) { return 3 * std::sqrt(h); }

SigmaReconstruction recover_sigma(Transport const& transport,
                                  double theta0,
                                  double h,
                                  std::span<Vec2 const> points,
                                  Route route,
                                  double epsilon)
{
    if (transport.medium().modulation())
        throw ArgumentError("sigma recovery expects the unmodulated medium");
    auto const& domain = transport.disc().domain();
    for (Vec2 x : points)
        if (domain.inner_distance(x) <= 0)
            throw DomainError("sigma evaluation points must be interior");

    BoundarySource f = make_f_h(theta0, h);
    BoundarySource g = make_f_h(theta0, h, BoundarySide::outflow);
    Solution u = transport.solve_forward(f);

    std::vector<double> hv(points.size());
    if (route == Route::oracle)
    {
        Solution v = transport.solve_adjoint(g);
        for (std::size_t i = 0; i < points.size(); ++i)
            hv[i] = internal_functional_at(transport, u.field, v.field, points[i]);
    }
    else
    {
        Measurer m(transport.medium(), transport.disc_ptr(), f, g, transport.options());
        auto const& disc = transport.disc();
        auto set = m.measure_all(epsilon, disc.spatial().n());
        auto field = recover_H_fourier(set, disc.spatial(), disc.hat_masses());
        for (std::size_t i = 0; i < points.size(); ++i)
            hv[i] = disc.spatial().interpolate(field.values, points[i]);
    }

    SigmaReconstruction out;
    out.h = h;
    out.theta0 = theta0;
    out.route = route;
    Vec2 th = unit(theta0);
    double floor = 0.5 * std::exp(-transport.medium().sigma_field().sup() * domain.diameter());
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        Vec2 x = points[i];
        Vec2 exit = x + domain.exit_distance(x, th) * th;
        double den = std::sqrt(h) * u.field.evaluate(exit, th);
        if (!(den > floor))
        {
            out.rejected.push_back(x);
            continue;
        }
        double num = -0.5 * hv[i];
        out.points.push_back({x, num, den, num / den});
    }
    return out;
}

KernelReconstruction recover_k(Transport const& transport,
                               ScalarField const& sigma_known,
                               std::span<KernelSample const> samples,
                               double h,
                               KernelFamily family)
{
    check_h(h);
    if (transport.medium().modulation())
        throw ArgumentError("kernel recovery expects the unmodulated medium");
    auto const& domain = transport.disc().domain();
    double guard = kernel_angle_guard(h);
    for (auto const& s : samples)
    {
        if (std::abs(angle_diff(s.theta1, s.theta2)) < guard)
            throw ArgumentError("kernel sample directions are closer than 3 sqrt(h)");
        if (domain.inner_distance(s.x) <= 0)
            throw DomainError("kernel evaluation points must be interior");
    }

    KernelReconstruction out;
    out.h = h;
    out.family = family;
    double panel = std::min(0.05, 0.5 * sigma_known.length_scale());
    auto sig = [&](Vec2 p) { return sigma_known(p); };
    for (auto const& s : samples)
    {
        Vec2 t1 = unit(s.theta1), t2 = unit(s.theta2);
        double back = domain.exit_distance(s.x, -t1);
        double fwd = domain.exit_distance(s.x, t2);
        GhOptions o1, o2;
        if (family == KernelFamily::coherent)
        {
            o1.half_width = h * h;
            o2.half_width = h * h;
            o1.offset = dot(Vec2{t1.y, -t1.x}, s.x - back * t1) - 0.5 * h;
            o2.offset = dot(Vec2{t2.y, -t2.x}, s.x + fwd * t2) - 0.5 * h;
        }
        Solution u = transport.solve_forward(make_g_h(s.theta1, h, BoundarySide::inflow, o1));
        Solution v = transport.solve_adjoint(make_g_h(s.theta2, h, BoundarySide::outflow, o2));
        double hval = internal_functional_at(transport, u.field, v.field, s.x);
        double depth = line_integral(sig, s.x, t2, fwd, panel) + line_integral(sig, s.x, -t1, back, panel);
        out.points.push_back({s, hval, depth, std::abs(hval * std::exp(depth)) / 4});
    }
    return out;
}

StudyTable make_table(std::string name, std::span<double const> params, std::span<double const> errors)
{
    if (params.size() != errors.size())
        throw ArgumentError("study parameters and errors differ in length");
    StudyTable t{std::move(name), {}};
    for (std::size_t i = 0; i < params.size(); ++i)
    {
        StudyRow r{params[i], errors[i], nan, nan};
        if (i > 0 && errors[i] != 0)
        {
            r.ratio = errors[i - 1] / errors[i];
            if (r.ratio > 0 && params[i] != params[i - 1] && params[i] > 0 && params[i - 1] > 0)
                r.order = std::log(r.ratio) / std::log(params[i - 1] / params[i]);
        }
        t.rows.push_back(r);
    }
    return t;
}

std::string to_string(StudyKind k)
{
    switch (k)
    {
        case StudyKind::ballistic: return "ballistic";
        case StudyKind::oscillatory: return "oscillatory";
        case StudyKind::sigma: return "sigma";
        case StudyKind::kernel: return "kernel";
        case StudyKind::epsilon: return "epsilon";
    }
    return "unknown";
}

EpsilonStudy epsilon_study(StudySetup const& setup, std::span<double const> epsilons)
{
    if (epsilons.size() < 2)
        throw ArgumentError("the epsilon study needs at least two values");
    if (!setup.f || !setup.g)
        throw ArgumentError("the epsilon study needs a measurement source pair");
    Measurer m(setup.medium, setup.disc, *setup.f, *setup.g, setup.options);
    auto const& t = m.transport();
    auto const& grid = t.disc().spatial();
    auto h_or = oracle_H(t, t.solve_forward(*setup.f), m.adjoint());
    double ref = l2_norm(h_or.values, grid);
    if (!(ref > 0))
        throw DomainError("the oracle functional vanishes; the epsilon study is undefined");

    EpsilonStudy out;
    out.epsilons.assign(epsilons.begin(), epsilons.end());
    std::vector<std::vector<double>> fields;
    for (double eps : epsilons)
    {
        auto set = m.measure_all(eps, grid.n());
        auto hf = recover_H_fourier(set, grid, t.disc().hat_masses());
        std::vector<double> diff(hf.values.size());
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = hf.values[i] - h_or.values[i];
        out.raw.push_back(l2_norm(diff, grid) / ref);
        fields.push_back(std::move(hf.values));
    }

    std::size_t n = epsilons.size();
    double em = 0;
    for (double e : epsilons)
        em += e / n;
    double see = 0;
    for (double e : epsilons)
        see += (e - em) * (e - em);
    std::vector<double> a(grid.lattice_size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        double ym = 0;
        for (std::size_t k = 0; k < n; ++k)
            ym += fields[k][i] / n;
        double sey = 0;
        for (std::size_t k = 0; k < n; ++k)
            sey += (epsilons[k] - em) * (fields[k][i] - ym);
        a[i] = ym - sey / see * em;
    }
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        diff[i] = a[i] - h_or.values[i];
    out.floor = l2_norm(diff, grid) / ref;
    for (std::size_t k = 0; k < n; ++k)
    {
        for (std::size_t i = 0; i < a.size(); ++i)
            diff[i] = fields[k][i] - a[i];
        out.eps_part.push_back(l2_norm(diff, grid) / ref);
    }
    out.slope = loglog_slope(out.epsilons, out.eps_part);
    return out;
}

std::vector<StudyTable> run_convergence_study(StudyKind kind, std::span<double const> params, StudySetup const& setup)
{
    require_three(params);
    Transport transport(setup.medium, setup.disc, setup.options);
    auto const& disc = transport.disc();
    auto const& sg = disc.spatial();
    std::vector<StudyTable> out;

    switch (kind)
    {
        case StudyKind::ballistic: {
            // unit-L1 rescaling keeps the scattered part O(h); the raw f_h row is O(sqrt h)
            std::vector<double> scaled, raw;
            for (double h : params)
            {
                check_h(h);
                auto src = BoundarySource::concentrated({setup.theta0, h}, 0.5);
                scaled.push_back(scattered_sup(transport.solve_forward(src), disc));
                raw.push_back(scattered_sup(transport.solve_forward(make_f_h(setup.theta0, h)), disc));
            }
            out.push_back(make_table("ballistic", params, scaled));
            out.push_back(make_table("ballistic_raw", params, raw));
            break;
        }
        case StudyKind::oscillatory: {
            std::vector<double> sup, l1, wh;
            auto inside = sg.inside_nodes();
            std::size_t lat = disc.lattice_size();
            for (double h : params)
            {
                Solution s = transport.solve_forward(make_g_h(setup.theta1, h));
                double cap = std::sqrt(h);
                std::vector<double> node_sup(inside.size()), node_wh(inside.size());
                parallel_for(inside.size(), [&](std::size_t k) {
                    int idx = inside[k];
                    Vec2 x = sg.eval_point(idx);
                    double ms = 0, mw = 0;
                    for (int d = 0; d < disc.n_theta(); ++d)
                    {
                        double v = s.scattered.empty() ? 0 : std::abs(s.scattered[d * lat + idx]);
                        ms = std::max(ms, v);
                        if (std::abs(angle_diff(disc.directions().angle(d), setup.theta1)) >= cap)
                            mw = std::max(mw, v);
                    }
                    for (int j = -8; j <= 8; ++j)
                        ms = std::max(ms, std::abs(scattered_value(s.field, x, unit(setup.theta1 + j * h / 4))));
                    for (double sgn : {-1.0, 1.0})
                        mw = std::max(mw, std::abs(scattered_value(s.field, x, unit(setup.theta1 + sgn * cap))));
                    node_sup[k] = std::max(ms, mw);
                    node_wh[k] = mw;
                });
                sup.push_back(*std::max_element(node_sup.begin(), node_sup.end()));
                wh.push_back(*std::max_element(node_wh.begin(), node_wh.end()));

                Vec2 x = setup.fixed_point;
                auto br = angular_breaks(s.field, s.field, x);
                auto const& rule = gauss_legendre(8);
                double acc = 0;
                for (std::size_t p = 0; p + 1 < br.size(); ++p)
                    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
                    {
                        double a = 0.5 * (br[p] + br[p + 1]) + 0.5 * (br[p + 1] - br[p]) * rule.nodes[q];
                        acc += 0.5 * (br[p + 1] - br[p]) * rule.weights[q]
                               * std::abs(scattered_value(s.field, x, unit(a)));
                    }
                l1.push_back(acc);
            }
            out.push_back(make_table("oscillatory_sup", params, sup));
            out.push_back(make_table("oscillatory_l1_fixed_x", params, l1));
            out.push_back(make_table("oscillatory_w_h", params, wh));
            break;
        }
        case StudyKind::sigma: {
            std::vector<double> err;
            for (double h : params)
            {
                auto rec = recover_sigma(transport, setup.theta0, h, setup.eval_points);
                if (!rec.rejected.empty())
                    throw DomainError("sigma study: an evaluation point fell below the albedo floor");
                double e = 0;
                for (auto const& p : rec.points)
                {
                    double truth = setup.medium.sigma(p.x);
                    e = std::max(e, std::abs(p.sigma_hat - truth) / truth);
                }
                err.push_back(e);
            }
            out.push_back(make_table("sigma", params, err));
            break;
        }
        case StudyKind::kernel: {
            std::vector<double> err;
            for (double h : params)
            {
                auto rec = recover_k(transport, setup.medium.sigma_field(), setup.kernel_samples, h);
                double e = 0;
                for (auto const& p : rec.points)
                {
                    auto const& s = p.sample;
                    double truth = setup.medium.k(s.x, unit(s.theta2), unit(s.theta1));
                    e = std::max(e, std::abs(p.k_hat - truth) / truth);
                }
                err.push_back(e);
            }
            out.push_back(make_table("kernel", params, err));
            break;
        }
        case StudyKind::epsilon: {
            auto st = epsilon_study(setup, params);
            out.push_back(make_table("epsilon", params, st.eps_part));
            out.push_back(make_table("epsilon_raw", params, st.raw));
            break;
        }
    }
    return out;
}

Bump stability_bump(double delta) { return {{0.2, 0.1}, delta, 0.1}; }

std::vector<StudyTable> StabilityStudy::tables() const
{
    std::vector<double> d, s, hh, lip, k, kh;
    for (auto const& r : rows)
    {
        d.push_back(r.delta);
        s.push_back(r.sigma_diff);
        hh.push_back(r.h_diff);
        lip.push_back(r.h_diff > 0 ? r.sigma_diff / r.h_diff : 0.0);
        k.push_back(r.kernel_diff);
        kh.push_back(r.kernel_h_diff);
    }
    return {make_table("stability_sigma", d, s),
            make_table("stability_h", d, hh),
            make_table("stability_lipschitz", d, lip),
            make_table("stability_kernel", d, k),
            make_table("stability_kernel_h", d, kh)};
}

StabilityStudy run_stability_study(StudySetup const& setup, std::span<double const> deltas, double h)
{
    if (deltas.size() < 2)
        throw ArgumentError("the stability study needs at least two perturbation sizes");
    Transport t1(setup.medium, setup.disc, setup.options);
    auto base = recover_sigma(t1, setup.theta0, h, setup.eval_points);
    std::vector<KernelSample> ks;
    if (!setup.kernel_samples.empty())
        ks.push_back(setup.kernel_samples.front());
    KernelReconstruction kbase;
    if (!ks.empty())
        kbase = recover_k(t1, setup.medium.sigma_field(), ks, h);

    StabilityStudy out;
    out.h = h;
    for (double delta : deltas)
    {
        StabilityRow row;
        row.delta = delta;
        if (delta != 0)
        {
            Medium m2(setup.medium.sigma_field().with_bump(stability_bump(delta)), setup.medium.kernel());
            Transport t2(std::move(m2), setup.disc, setup.options);
            auto rec = recover_sigma(t2, setup.theta0, h, setup.eval_points);
            if (rec.points.size() != base.points.size())
                throw DomainError("stability study: an evaluation point fell below the albedo floor");
            for (std::size_t i = 0; i < rec.points.size(); ++i)
            {
                row.sigma_diff = std::max(row.sigma_diff, std::abs(rec.points[i].sigma_hat - base.points[i].sigma_hat));
                // H = -2 * numerator
                row.h_diff = std::max(row.h_diff, 2 * std::abs(rec.points[i].numerator - base.points[i].numerator));
            }
            if (!ks.empty())
            {
                auto const& kern = setup.medium.kernel();
                Medium m3(setup.medium.sigma_field(),
                          with_kappa(kern, kern.kappa_field().with_bump(stability_bump(delta))));
                Transport t3(std::move(m3), setup.disc, setup.options);
                auto krec = recover_k(t3, setup.medium.sigma_field(), ks, h);
                row.kernel_diff = std::abs(krec.points[0].k_hat - kbase.points[0].k_hat);
                row.kernel_h_diff = std::abs(krec.points[0].h_value - kbase.points[0].h_value);
            }
        }
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace rte_aot

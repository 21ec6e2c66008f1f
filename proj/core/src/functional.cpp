#include "rte_aot/functional.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

#include "rte_aot/errors.hpp"
#include "rte_aot/parallel.hpp"
#include "rte_aot/quadrature.hpp"

namespace rte_aot
{
namespace
{
constexpr double pi = std::numbers::pi;

void require_same(BoundaryTrace const& a, BoundaryTrace const& b)
{
    if (a.n_b != b.n_b || a.n_theta != b.n_theta || a.values.size() != b.values.size())
        throw ArgumentError("boundary traces live on different grids");
}

double max_diff(BoundaryTrace const& a, BoundaryTrace const& b)
{
    require_same(a, b);
    double m = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace

std::vector<double> angular_breaks(TransportField const& u, TransportField const& v, Vec2 x)
{
    constexpr int k_uniform = 48;
    std::vector<double> br;
    for (int j = 0; j < k_uniform; ++j)
        br.push_back(2 * pi * j / k_uniform);
    for (auto const* field : {&u, &v})
    {
        for (auto const& part : field->parts())
        {
            for (auto const& f : part->features())
            {
                br.push_back(f.center);
                for (double w = f.half_width; w < pi; w *= 2)
                {
                    br.push_back(f.center - w);
                    br.push_back(f.center + w);
                }
            }
            part->breaks(x, br);
        }
    }
    for (double& a : br)
    {
        a = std::fmod(a, 2 * pi);
        if (a < 0)
            a += 2 * pi;
    }
    std::sort(br.begin(), br.end());
    std::vector<double> out;
    for (double a : br)
        if (out.empty() || a - out.back() > 1e-12)
            out.push_back(a);
    if (2 * pi - out.back() + out.front() <= 1e-12)
        out.pop_back();
    out.push_back(out.front() + 2 * pi);
    return out;
}

std::string to_string(Route r) { return r == Route::oracle ? "oracle" : "fourier"; }

double boundary_pairing(BoundaryTrace const& u,
                        BoundaryTrace const& v,
                        BoundaryGrid const& boundary,
                        DirectionGrid const& dirs)
{
    require_same(u, v);
    if (u.n_b != boundary.size() || u.n_theta != dirs.size())
        throw ArgumentError("traces do not match the boundary and direction grids");
    double sum = 0;
    for (int b = 0; b < u.n_b; ++b)
    {
        double row = 0;
        for (int d = 0; d < u.n_theta; ++d)
            row += u.at(b, d) * v.at(b, d) * dot(boundary.normals[b], dirs.direction(d));
        sum += row;
    }
    return sum * boundary.arc_weight * dirs.weight();
}

Vec2 MeasurementSet::q(int m1, int m2) const
{
    return {2 * pi * m1 / extent.x, 2 * pi * m2 / extent.y};
}

Measurer::Measurer(Medium medium, DiscretizationPtr disc, BoundarySource f, BoundarySource g, SolverOptions options)
    : transport_(std::move(medium), std::move(disc), options), f_(std::move(f)), g_(std::move(g))
{
    if (transport_.medium().modulation())
        throw ArgumentError("measurements start from an unmodulated medium");
    v_ = transport_.solve_adjoint(g_);
    v_trace_ = transport_.trace(v_);
    auto const& d = transport_.disc();
    base_ = boundary_pairing(transport_.trace(transport_.solve_forward(f_)), v_trace_, d.boundary(), d.directions());
}

double Measurer::measure(double epsilon, Vec2 q, double phi) const
{
    auto const& d = transport_.disc();
    Medium mod = modulate(transport_.medium(), d.domain(), epsilon, q, phi);
    Transport t(std::move(mod), transport_.disc_ptr(), transport_.options());
    BoundaryTrace u = t.trace(t.solve_forward(f_));
    return boundary_pairing(u, v_trace_, d.boundary(), d.directions()) - base_;
}

MeasurementSet Measurer::measure_all(double epsilon, int n_q) const
{
    if (n_q < 2 || n_q % 2 != 0)
        throw ArgumentError("the frequency grid size must be even and at least 2");
    MeasurementSet set;
    set.epsilon = epsilon;
    set.n_q = n_q;
    set.extent = transport_.disc().spatial().extent();
    set.entries.resize(2 * static_cast<std::size_t>(n_q) * n_q);
    for (int m2 = -n_q / 2; m2 < n_q / 2; ++m2)
        for (int m1 = -n_q / 2; m1 < n_q / 2; ++m1)
            for (int p = 0; p < 2; ++p)
            {
                Vec2 q = set.q(m1, m2);
                double phi = p * pi / 2;
                set.entries[set.index(m1, m2, p)] = {q, phi, measure(epsilon, q, phi)};
            }
    return set;
}

double measure(Medium const& medium,
               DiscretizationPtr disc,
               BoundarySource const& f,
               BoundarySource const& g,
               double epsilon,
               Vec2 q,
               double phi,
               SolverOptions options)
{
    return Measurer(medium, std::move(disc), f, g, options).measure(epsilon, q, phi);
}

double InternalFunctionalField::sup_norm(SpatialGrid const& grid) const
{
    double m = 0;
    for (int idx : grid.inside_nodes())
        m = std::max(m, std::abs(values[idx]));
    return m;
}

InternalFunctionalField recover_H_fourier(MeasurementSet const& m,
                                          SpatialGrid const& grid,
                                          std::optional<std::span<double const>> hat_masses)
{
    int n = m.n_q;
    if (n != grid.n())
        throw ArgumentError("frequency grid and spatial grid sizes differ");
    if (m.entries.size() != 2 * static_cast<std::size_t>(n) * n)
        throw ArgumentError("measurement set does not cover every (q, phi) pair");
    if (std::abs(m.extent.x - grid.extent().x) > 1e-12 || std::abs(m.extent.y - grid.extent().y) > 1e-12)
        throw ArgumentError("measurement dual grid does not match the spatial grid");
    if (!(m.epsilon > 0))
        throw ArgumentError("measurement epsilon must be positive");
    if (hat_masses && hat_masses->size() != grid.lattice_size())
        throw ArgumentError("hat masses have the wrong size");

    using cplx = std::complex<double>;
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n * n));
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> guard(buf, &fftw_free);
    auto* data = reinterpret_cast<cplx*>(buf);

    Vec2 origin = grid.lo() + Vec2{0.5 * grid.dx(), 0.5 * grid.dy()};
    for (int k2 = 0; k2 < n; ++k2)
        for (int k1 = 0; k1 < n; ++k1)
        {
            int m1 = k1 - n / 2, m2 = k2 - n / 2;
            auto const& c = m.entries[m.index(m1, m2, 0)];
            auto const& s = m.entries[m.index(m1, m2, 1)];
            if (!std::isfinite(c.value) || !std::isfinite(s.value))
                throw ArgumentError("measurement set holds non-finite entries");
            cplx hat(c.value / m.epsilon, -s.value / m.epsilon);
            Vec2 q = m.q(m1, m2);
            data[k2 * n + k1] = hat * std::polar(1.0, -dot(q, origin));
        }

    fftw_plan plan = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    InternalFunctionalField out;
    out.provenance = Route::fourier;
    out.sources = m.sources;
    out.values.assign(grid.lattice_size(), 0.0);
    double inv_box = 1 / (m.extent.x * m.extent.y);
    for (int idx : grid.inside_nodes())
    {
        int i = idx % n, j = idx / n;
        double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        double v = sign * data[idx].real() * inv_box;
        if (hat_masses)
        {
            double mass = (*hat_masses)[idx];
            v = mass > 0 ? v / mass : 0.0;
        }
        out.values[idx] = v;
    }
    return out;
}

MeasurementSet synthesize_measurements(std::span<double const> h, SpatialGrid const& grid, double epsilon)
{
    if (h.size() != grid.lattice_size())
        throw ArgumentError("field has the wrong size");
    int n = grid.n();
    MeasurementSet set;
    set.epsilon = epsilon;
    set.n_q = n;
    set.extent = grid.extent();
    set.entries.resize(2 * static_cast<std::size_t>(n) * n);
    for (int m2 = -n / 2; m2 < n / 2; ++m2)
        for (int m1 = -n / 2; m1 < n / 2; ++m1)
        {
            Vec2 q = set.q(m1, m2);
            for (int p = 0; p < 2; ++p)
            {
                double phi = p * pi / 2;
                double sum = 0;
                for (std::size_t idx = 0; idx < h.size(); ++idx)
                    if (h[idx] != 0)
                        sum += h[idx] * std::cos(dot(q, grid.node(static_cast<int>(idx))) + phi);
                set.entries[set.index(m1, m2, p)] = {q, phi, epsilon * grid.cell_area() * sum};
            }
        }
    return set;
}

InternalFunctionalField oracle_H(Transport const& transport, Solution const& u, Solution const& v)
{
    auto const& disc = transport.disc();
    std::size_t lat = disc.lattice_size();
    auto au = transport.apply_A(u.field);
    auto vv = transport.node_values(v.field);
    InternalFunctionalField out;
    out.provenance = Route::oracle;
    out.values.assign(lat, 0.0);
    double w = disc.directions().weight();
    for (int idx : disc.spatial().inside_nodes())
    {
        double s = 0;
        for (int d = 0; d < disc.n_theta(); ++d)
            s += au.grid()[d * lat + idx] * vv[d * lat + idx];
        out.values[idx] = w * s;
    }
    return out;
}

InternalFunctionalField oracle_H(Transport const& transport, BoundarySource const& f, BoundarySource const& g)
{
    return oracle_H(transport, transport.solve_forward(f), transport.solve_adjoint(g));
}

double internal_functional_at(Transport const& transport,
                              TransportField const& u,
                              TransportField const& v,
                              Vec2 x)
{
    if (!transport.disc().domain().in_closure(x))
        throw DomainError("evaluation point lies outside the domain");
    auto br = angular_breaks(u, v, x);
    auto const& rule = gauss_legendre(8);
    std::size_t nodes = (br.size() - 1) * rule.nodes.size();
    std::vector<Vec2> th(nodes);
    std::vector<double> wt(nodes), uu(nodes), vv(nodes);
    for (std::size_t p = 0; p + 1 < br.size(); ++p)
    {
        double a = br[p], b = br[p + 1];
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        {
            std::size_t k = p * rule.nodes.size() + q;
            th[k] = unit(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q]);
            wt[k] = 0.5 * (b - a) * rule.weights[q];
        }
    }
    parallel_for(nodes, [&](std::size_t k) {
        uu[k] = u.evaluate(x, th[k]);
        vv[k] = v.evaluate(x, th[k]);
    });

    auto const& kernel = transport.medium().kernel();
    double kap = transport.kappa(x);
    double sig = transport.sigma(x);
    double h = 0;
    for (std::size_t m = 0; m < nodes; ++m)
    {
        if (vv[m] == 0)
            continue;
        double a2 = 0;
        if (kap != 0)
        {
            for (std::size_t k = 0; k < nodes; ++k)
                if (uu[k] != 0)
                    a2 += wt[k] * kernel.phase(dot(th[m], th[k])) * uu[k];
            a2 *= kap;
        }
        h += wt[m] * (-sig * uu[m] + a2) * vv[m];
    }
    return h;
}

double l2_norm(std::span<double const> v, SpatialGrid const& grid)
{
    if (v.size() != grid.lattice_size())
        throw ArgumentError("field has the wrong size");
    double s = 0;
    for (int idx : grid.inside_nodes())
        s += v[idx] * v[idx];
    return std::sqrt(s * grid.cell_area());
}

StabilityReport stability_metric(InternalFunctionalField const& h1,
                                 InternalFunctionalField const& h2,
                                 SpatialGrid const& grid,
                                 BoundaryTrace const& albedo_f1,
                                 BoundaryTrace const& albedo_f2,
                                 BoundaryTrace const& albedo_g1,
                                 BoundaryTrace const& albedo_g2,
                                 double f_l1,
                                 double g_l1)
{
    if (h1.values.size() != grid.lattice_size() || h2.values.size() != grid.lattice_size())
        throw ArgumentError("internal functionals live on different grids");
    StabilityReport r;
    for (int idx : grid.inside_nodes())
        r.lhs = std::max(r.lhs, std::abs(h1.values[idx] - h2.values[idx]));
    r.rhs = g_l1 * max_diff(albedo_f1, albedo_f2) + f_l1 * max_diff(albedo_g1, albedo_g2);
    r.ratio = r.rhs > 0 ? r.lhs / r.rhs : 0;
    return r;
}

}  // namespace rte_aot

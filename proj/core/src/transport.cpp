#include "rte_aot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rte_aot/errors.hpp"
#include "rte_aot/parallel.hpp"
#include "rte_aot/quadrature.hpp"
#include "transport_state.hpp"

namespace rte_aot
{
using detail::BallisticPart;
using detail::ChordPart;
using detail::TransportState;

namespace
{
inline double bilinear(double const* v, Bilinear const& s, int n)
{
    return (1 - s.fy) * ((1 - s.fx) * v[s.base] + s.fx * v[s.base + 1])
           + s.fy * ((1 - s.fx) * v[s.base + n] + s.fx * v[s.base + n + 1]);
}

double sup_inside(Discretization const& disc, std::vector<double> const& v)
{
    double m = 0;
    std::size_t lat = disc.lattice_size();
    for (int d = 0; d < disc.n_theta(); ++d)
        for (int node : disc.spatial().inside_nodes())
            m = std::max(m, std::abs(v[d * lat + node]));
    return m;
}

std::shared_ptr<TransportState> build_state(Medium medium, DiscretizationPtr disc, SolverOptions opts)
{
    if (!(opts.tol_series > 0) || opts.j_max < 1)
        throw ArgumentError("series tolerance must be positive and j_max >= 1");
    if (!(opts.max_step >= 0))
        throw ArgumentError("max_step must be non-negative");
    gauss_legendre(opts.m_sub);  // validates the sub-quadrature order

    auto s = std::make_shared<TransportState>();
    s->medium = std::move(medium);
    s->disc = std::move(disc);
    s->options = opts;
    auto const& sg = s->disc->spatial();
    auto const& dirs = s->disc->directions();
    std::size_t lat = sg.lattice_size();

    if (auto const& mod = s->medium.modulation())
    {
        s->envelope.resize(lat);
        for (std::size_t i = 0; i < lat; ++i)
            s->envelope[i] = mod->envelope(sg.node(static_cast<int>(i)));
    }
    s->kappa_lat.assign(lat, 0.0);
    auto const& kappa0 = s->medium.kernel().kappa_field();
    for (int idx : sg.active_nodes())
        s->kappa_lat[idx] = kappa0(sg.eval_point(idx)) * (s->envelope.empty() ? 1.0 : s->envelope[idx]);

    double scale = s->medium.sigma_field().length_scale();
    s->panel = std::min(0.25, 0.5 * scale);
    if (!s->envelope.empty())
        s->panel = std::min(s->panel, std::min(sg.dx(), sg.dy()));

    int n = dirs.size();
    s->phase_table.resize(n);
    for (int m = 0; m < n; ++m)
        s->phase_table[m] = s->medium.kernel().phase(std::cos(2 * std::numbers::pi * m / n));

    bool uniform = s->envelope.empty() && s->medium.sigma_field().is_constant();
    double sigma0 = s->medium.sigma_field().base();
    auto const& gl3 = gauss_legendre(3);
    s->atten.resize(n);
    TransportState const& cs = *s;
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t d) {
        auto const& lay = cs.disc->rays(static_cast<int>(d));
        auto& a = s->atten[d];
        a.assign(lay.samples(), 1.0);
        for (int r = 0; r < lay.rays(); ++r)
        {
            double ds = lay.step[r];
            for (int i = lay.start[r] + 1; i < lay.start[r + 1]; ++i)
            {
                int local = i - lay.start[r];
                if (uniform)
                {
                    a[i] = std::exp(-sigma0 * ds);
                    continue;
                }
                Vec2 mid = lay.sample_point(r, local) - (0.5 * ds) * lay.theta;
                double sum = 0;
                for (std::size_t q = 0; q < gl3.nodes.size(); ++q)
                    sum += gl3.weights[q] * cs.sigma(mid + (0.5 * ds * gl3.nodes[q]) * lay.theta);
                a[i] = std::exp(-0.5 * ds * sum);
            }
        }
    });
    return s;
}

}  // namespace

namespace detail
{
double BallisticPart::value(Vec2 x, Vec2 theta) const
{
    if (src_.window() && !src_.window()->contains(angle_of(theta)))
        return 0;
    Vec2 dir = src_.side() == BoundarySide::inflow ? -theta : theta;
    double t = s_->domain().exit_distance(x, dir);
    double f = src_(x + t * dir, theta);
    if (f == 0)
        return 0;
    return f * std::exp(-s_->depth(x, dir, t));
}

std::vector<AngularWindow> BallisticPart::features() const
{
    if (src_.window())
        return {*src_.window()};
    return {};
}

void BallisticPart::breaks(Vec2 x, std::vector<double>& out) const
{
    if (src_.kind() == BoundarySource::Kind::oscillatory)
        sign_breaks(s_->domain(), x, *src_.window(), *src_.frame(), src_.side(), out);
}

double ChordPart::value(Vec2 x, Vec2 theta) const
{
    auto const& disc = *s_->disc;
    auto const& sg = disc.spatial();
    double len = s_->domain().exit_distance(x, -theta);
    std::size_t lat = disc.lattice_size();
    AngularSlot slot = angular_slot(disc.n_theta(), theta);
    double w[4] = {0, 1, 0, 0};
    if (slot.frac != 0)
        cubic_weights(slot.frac, w);
    int n_theta = disc.n_theta();
    double const* planes[4];
    for (int q = 0; q < 4; ++q)
        planes[q] = src_->data() + ((slot.index + q - 1 + n_theta) % n_theta) * lat;
    auto src_at = [&](Vec2 z) {
        Bilinear st = sg.stencil(z);
        double v = 0;
        for (int q = 0; q < 4; ++q)
            if (w[q] != 0)
                v += w[q] * bilinear(planes[q], st, sg.n());
        return v;
    };

    if (len <= 0)
        return 0;
    double step = 0.5 * std::min(sg.dx(), sg.dy());
    if (s_->options.max_step > 0)
        step = std::min(step, s_->options.max_step);
    int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    double ds = len / n;
    double depth = 0;
    double sig_prev = s_->sigma(x);
    double sum = 0;
    for (int i = 0; i <= n; ++i)
    {
        Vec2 z = x - (i * ds) * theta;
        if (i > 0)
        {
            double sig = s_->sigma(z);
            depth += 0.5 * ds * (sig_prev + sig);
            sig_prev = sig;
        }
        double wt = (i == 0 || i == n) ? 0.5 * ds : ds;
        sum += wt * std::exp(-depth) * src_at(z);
    }
    return sum;
}

void sign_breaks(Domain const& domain,
                 Vec2 x,
                 AngularWindow window,
                 OscillationFrame const& frame,
                 BoundarySide side,
                 std::vector<double>& out)
{
    auto coord = [&](double a) {
        Vec2 th = unit(a);
        Vec2 dir = side == BoundarySide::inflow ? -th : th;
        double t = domain.exit_distance(x, dir);
        return frame.coordinate(x + t * dir);
    };
    constexpr int k_samples = 16;
    double a0 = window.center - window.half_width;
    double da = 2 * window.half_width / k_samples;
    double prev = coord(a0);
    for (int k = 1; k <= k_samples; ++k)
    {
        double a_lo = a0 + (k - 1) * da;
        double a_hi = a0 + k * da;
        double cur = coord(a_hi);
        double lo_v = std::min(prev, cur), hi_v = std::max(prev, cur);
        for (double m = std::floor(lo_v) + 1; m <= hi_v; m += 1)
        {
            double l = a_lo, r = a_hi;
            bool rising = cur > prev;
            for (int it = 0; it < 60; ++it)
            {
                double mid = 0.5 * (l + r);
                bool above = coord(mid) >= m;
                if (above == rising)
                    r = mid;
                else
                    l = mid;
            }
            out.push_back(angle_diff(0.5 * (l + r), 0));
        }
        prev = cur;
    }
}

}  // namespace detail

Transport::Transport(Medium medium, DiscretizationPtr disc, SolverOptions options)
    : s_(build_state(std::move(medium), std::move(disc), options))
{
}

Medium const& Transport::medium() const { return s_->medium; }
Discretization const& Transport::disc() const { return *s_->disc; }
DiscretizationPtr const& Transport::disc_ptr() const { return s_->disc; }
SolverOptions const& Transport::options() const { return s_->options; }
double Transport::sigma(Vec2 x) const { return s_->sigma(x); }
double Transport::kappa(Vec2 x) const { return s_->kappa(x); }
double Transport::k(Vec2 x, Vec2 theta, Vec2 theta_p) const
{
    return s_->kappa(x) * s_->medium.kernel().phase(dot(theta, theta_p));
}
double Transport::depth(Vec2 x, Vec2 dir, double t) const { return s_->depth(x, dir, t); }

std::vector<double> Transport::sweep(std::span<double const> src) const
{
    auto const& disc = *s_->disc;
    std::size_t lat = disc.lattice_size();
    if (src.size() != disc.field_size())
        throw ArgumentError("sweep source has the wrong size");
    std::vector<double> out(disc.field_size(), 0.0);
    auto active = disc.spatial().active_nodes();
    int n = disc.spatial().n();
    parallel_for(static_cast<std::size_t>(disc.n_theta()), [&](std::size_t d) {
        auto const& lay = disc.rays(static_cast<int>(d));
        auto const& a = s_->atten[d];
        double const* plane = src.data() + d * lat;
        std::vector<double> t(lay.samples());
        for (int r = 0; r < lay.rays(); ++r)
        {
            int first = lay.start[r];
            double hs = 0.5 * lay.step[r];
            t[first] = 0;
            double prev = bilinear(plane, lay.stencil[first], n);
            for (int i = first + 1; i < lay.start[r + 1]; ++i)
            {
                double cur = bilinear(plane, lay.stencil[i], n);
                t[i] = a[i] * (t[i - 1] + hs * prev) + hs * cur;
                prev = cur;
            }
        }
        double* o = out.data() + d * lat;
        for (std::size_t k = 0; k < active.size(); ++k)
        {
            double v = 0;
            for (int q = 0; q < 4; ++q)
                v += lay.out_weight[4 * k + q] * t[lay.out_sample[4 * k + q]];
            o[active[k]] = v;
        }
    });
    return out;
}

std::vector<double> Transport::ballistic_grid(BoundarySource const& f) const
{
    if (f.side() != BoundarySide::inflow)
        throw ArgumentError("ballistic sweep needs inflow data");
    auto const& disc = *s_->disc;
    std::size_t lat = disc.lattice_size();
    std::vector<double> out(disc.field_size(), 0.0);
    auto active = disc.spatial().active_nodes();
    parallel_for(static_cast<std::size_t>(disc.n_theta()), [&](std::size_t d) {
        auto const& lay = disc.rays(static_cast<int>(d));
        auto const& a = s_->atten[d];
        std::vector<double> b(lay.samples());
        for (int r = 0; r < lay.rays(); ++r)
        {
            int first = lay.start[r];
            b[first] = f(lay.entry[r], lay.theta);
            for (int i = first + 1; i < lay.start[r + 1]; ++i)
                b[i] = a[i] * b[i - 1];
        }
        double* o = out.data() + d * lat;
        for (std::size_t k = 0; k < active.size(); ++k)
        {
            double v = 0;
            for (int q = 0; q < 4; ++q)
                v += lay.out_weight[4 * k + q] * b[lay.out_sample[4 * k + q]];
            o[active[k]] = v;
        }
    });
    return out;
}

std::vector<double> Transport::a2_grid(std::span<double const> w) const
{
    auto const& disc = *s_->disc;
    std::size_t lat = disc.lattice_size();
    int n = disc.n_theta();
    double wt = disc.directions().weight();
    if (w.size() != disc.field_size())
        throw ArgumentError("A2 input has the wrong size");
    std::vector<double> out(disc.field_size(), 0.0);
    auto const& kap = s_->kappa_lat;
    if (s_->medium.kernel().is_zero())
        return out;
    if (s_->medium.kernel().kind() == KernelKind::isotropic)
    {
        std::vector<double> total(lat, 0.0);
        for (int d = 0; d < n; ++d)
            for (std::size_t i = 0; i < lat; ++i)
                total[i] += w[d * lat + i];
        double p = s_->phase_table[0] * wt;
        for (std::size_t i = 0; i < lat; ++i)
            total[i] *= p * kap[i];
        for (int d = 0; d < n; ++d)
            std::copy(total.begin(), total.end(), out.begin() + d * lat);
        return out;
    }
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t d) {
        double* o = out.data() + d * lat;
        for (int dp = 0; dp < n; ++dp)
        {
            double c = s_->phase_table[(static_cast<int>(d) - dp + n) % n] * wt;
            double const* in = w.data() + dp * lat;
            for (std::size_t i = 0; i < lat; ++i)
                o[i] += c * in[i];
        }
        for (std::size_t i = 0; i < lat; ++i)
            o[i] *= kap[i];
    });
    return out;
}

std::vector<double> Transport::node_values(TransportField const& w) const
{
    auto const& disc = *s_->disc;
    std::size_t lat = disc.lattice_size();
    std::vector<double> out = w.has_grid() ? std::vector<double>(w.grid().begin(), w.grid().end())
                                           : std::vector<double>(disc.field_size(), 0.0);
    if (w.parts().empty())
        return out;
    auto active = disc.spatial().active_nodes();
    parallel_for(active.size(), [&](std::size_t k) {
        int node = active[k];
        Vec2 y = disc.spatial().eval_point(node);
        for (int d = 0; d < disc.n_theta(); ++d)
            out[d * lat + node] += w.parts_value(y, disc.directions().direction(d));
    });
    return out;
}

std::vector<double> Transport::window_a2(FieldPart const& part) const
{
    auto const& disc = *s_->disc;
    auto const win = part.support();
    if (!win)
        throw ArgumentError("window sub-quadrature needs a part with angular support");
    std::size_t lat = disc.lattice_size();
    std::vector<double> out(disc.field_size(), 0.0);
    if (s_->medium.kernel().is_zero())
        return out;
    auto const& rule = gauss_legendre(s_->options.m_sub);
    auto const& kernel = s_->medium.kernel();
    auto active = disc.spatial().active_nodes();
    parallel_for(active.size(), [&](std::size_t k) {
        int node = active[k];
        Vec2 y = disc.spatial().eval_point(node);
        std::vector<double> cuts{win->center - win->half_width};
        std::vector<double> br;
        part.breaks(y, br);
        for (double b : br)
            cuts.push_back(win->center + angle_diff(b, win->center));
        cuts.push_back(win->center + win->half_width);
        std::sort(cuts.begin(), cuts.end());
        std::vector<Vec2> dirs;
        std::vector<double> vals;
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
        {
            double a = cuts[c], b = cuts[c + 1];
            if (b <= a)
                continue;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q)
            {
                Vec2 th = unit(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q]);
                dirs.push_back(th);
                vals.push_back(0.5 * (b - a) * rule.weights[q] * part.value(y, th));
            }
        }
        double kap = s_->kappa_lat[node];
        for (int d = 0; d < disc.n_theta(); ++d)
        {
            Vec2 th = disc.directions().direction(d);
            double s = 0;
            for (std::size_t m = 0; m < dirs.size(); ++m)
                s += kernel.phase(dot(th, dirs[m])) * vals[m];
            out[d * lat + node] = kap * s;
        }
    });
    return out;
}

TransportField Transport::apply_J(BoundarySource const& f) const
{
    if (f.side() != BoundarySide::inflow)
        throw ArgumentError("J acts on inflow data");
    TransportField u(s_->disc);
    u.add_part(std::make_shared<BallisticPart>(s_, f));
    return u;
}

TransportField Transport::apply_Jtilde(BoundarySource const& f) const
{
    if (f.side() != BoundarySide::outflow)
        throw ArgumentError("J~ acts on outflow data");
    TransportField u(s_->disc);
    u.add_part(std::make_shared<BallisticPart>(s_, f));
    return u;
}

TransportField Transport::apply_A2(TransportField const& w) const
{
    TransportField grid_only(s_->disc);
    if (w.has_grid())
        grid_only = TransportField(s_->disc, std::vector<double>(w.grid().begin(), w.grid().end()));
    std::vector<std::vector<double>> windowed;
    for (auto const& p : w.parts())
    {
        if (p->support())
            windowed.push_back(window_a2(*p));
        else
            grid_only.add_part(p);
    }
    std::vector<double> out = a2_grid(node_values(grid_only));
    for (auto const& v : windowed)
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += v[i];
    return TransportField(s_->disc, std::move(out));
}

TransportField Transport::apply_T1inv(TransportField const& w) const
{
    auto src = std::make_shared<std::vector<double>>(node_values(w));
    TransportField out(s_->disc, sweep(*src));
    out.set_grid_evaluator(std::make_shared<ChordPart>(s_, src));
    return out;
}

TransportField Transport::apply_A(TransportField const& w) const
{
    auto const& disc = *s_->disc;
    std::size_t lat = disc.lattice_size();
    std::vector<double> vals = node_values(w);
    std::vector<double> out = apply_A2(w).grid_mut();
    for (int node : disc.spatial().active_nodes())
    {
        double sig = s_->sigma(disc.spatial().eval_point(node));
        for (int d = 0; d < disc.n_theta(); ++d)
            out[d * lat + node] -= sig * vals[d * lat + node];
    }
    return TransportField(s_->disc, std::move(out));
}

Solution Transport::solve_forward(BoundarySource const& f) const
{
    if (f.side() != BoundarySide::inflow)
        throw ArgumentError("forward solve needs inflow data");
    auto const& disc = *s_->disc;
    auto ballistic = std::make_shared<BallisticPart>(s_, f);
    Solution sol{TransportField(s_->disc), {}, f, {}};
    sol.field.add_part(ballistic);
    if (s_->medium.kernel().is_zero())
        return sol;

    std::vector<double> src;
    std::vector<double> k1;
    std::vector<double> norms;
    double ref = f.sup_estimate();
    switch (f.kind())
    {
        case BoundarySource::Kind::angular:
        case BoundarySource::Kind::boundary_function: {
            auto b = ballistic_grid(f);
            ref = sup_inside(disc, b);
            src = a2_grid(b);
            break;
        }
        case BoundarySource::Kind::concentrated: src = window_a2(*ballistic); break;
        case BoundarySource::Kind::oscillatory: {
            auto first = detail::make_oscillatory_collision(s_, f);
            k1 = detail::oscillatory_collision_grid(*first, disc);
            sol.field.add_part(first);
            norms.push_back(sup_inside(disc, k1));
            src = a2_grid(k1);
            break;
        }
    }

    auto total_src = std::make_shared<std::vector<double>>(src.size(), 0.0);
    std::vector<double> sum(src.size(), 0.0);
    int const j_max = s_->options.j_max;
    int terms = static_cast<int>(norms.size());
    while (true)
    {
        auto w = sweep(src);
        for (std::size_t i = 0; i < src.size(); ++i)
        {
            (*total_src)[i] += src[i];
            sum[i] += w[i];
        }
        double nw = sup_inside(disc, w);
        norms.push_back(nw);
        ++terms;
        double scale = std::max(ref, sup_inside(disc, sum));
        if (nw <= s_->options.tol_series * scale || terms >= j_max)
            break;
        src = a2_grid(w);
    }

    auto& diag = sol.diagnostics;
    diag.terms_used = terms;
    diag.first_collision_norm = norms.front();
    double c = 0;
    for (std::size_t j = 1; j < norms.size(); ++j)
        if (norms[j - 1] > 0)
            c = std::max(c, norms[j] / norms[j - 1]);
    diag.contraction_observed = c;
    if (c >= 1)
    {
        char buf[128];
        std::snprintf(buf, sizeof buf, "collision series does not contract (observed ratio %.4g)", c);
        throw DivergenceError(buf);
    }
    diag.tail_bound = std::pow(c, terms) / (1 - c) * diag.first_collision_norm;
    bool converged = norms.back() <= s_->options.tol_series * std::max(ref, sup_inside(disc, sum));
    diag.jmax_warning = !converged && diag.tail_bound > 10 * s_->options.tol_series;

    sol.scattered = sum;
    for (std::size_t i = 0; i < k1.size(); ++i)
        sol.scattered[i] += k1[i];
    sol.field.grid_mut() = std::move(sum);
    sol.field.set_grid_evaluator(std::make_shared<ChordPart>(s_, total_src));
    return sol;
}

Solution Transport::solve_adjoint(BoundarySource const& g) const
{
    if (g.side() != BoundarySide::outflow)
        throw ArgumentError("adjoint solve needs outflow data");
    // the presets depend on x and angle(theta, theta') only, so k~ = k
    Solution sol = solve_forward(g.reflected());
    sol.field = sol.field.reflected();
    if (!sol.scattered.empty())
    {
        auto const& disc = *s_->disc;
        std::size_t lat = disc.lattice_size();
        std::vector<double> r(sol.scattered.size());
        for (int d = 0; d < disc.n_theta(); ++d)
            std::copy_n(sol.scattered.begin() + disc.directions().opposite(d) * lat, lat, r.begin() + d * lat);
        sol.scattered = std::move(r);
    }
    sol.source = g;
    return sol;
}

BoundaryTrace Transport::trace(Solution const& sol) const
{
    auto const& disc = *s_->disc;
    auto const& bg = disc.boundary();
    auto const& dirs = disc.directions();
    BoundaryTrace t{bg.size(), dirs.size(), std::vector<double>(static_cast<std::size_t>(bg.size()) * dirs.size())};
    bool data_inflow = sol.source.side() == BoundarySide::inflow;
    parallel_for(static_cast<std::size_t>(bg.size()), [&](std::size_t bi) {
        int b = static_cast<int>(bi);
        for (int d = 0; d < dirs.size(); ++d)
        {
            Vec2 th = dirs.direction(d);
            double c = dot(bg.normals[b], th);
            if (std::abs(c) <= tol_tangent)
                continue;
            bool data_side = data_inflow ? c < 0 : c > 0;
            t.at(b, d) = data_side ? sol.source(bg.points[b], th) : sol.field.evaluate(bg.points[b], th);
        }
    });
    return t;
}

BoundaryTrace Transport::albedo(BoundarySource const& f) const
{
    BoundaryTrace t = trace(solve_forward(f));
    auto const& bg = disc().boundary();
    for (int b = 0; b < t.n_b; ++b)
        for (int d = 0; d < t.n_theta; ++d)
            if (dot(bg.normals[b], disc().directions().direction(d)) <= tol_tangent)
                t.at(b, d) = 0;
    return t;
}

}  // namespace rte_aot

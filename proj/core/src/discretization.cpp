#include "rte_aot/discretization.hpp"

#include <algorithm>
#include <cmath>

#include "rte_aot/parallel.hpp"

namespace rte_aot
{
namespace
{
RayLayout build_layout(Domain const& domain, SpatialGrid const& grid, Vec2 theta)
{
    RayLayout lay;
    lay.theta = theta;
    Vec2 across = perp(theta);
    Vec2 origin = 0.5 * (domain.lo() + domain.hi());
    double spacing = std::min(grid.dx(), grid.dy());

    // extent of the domain projected on the across axis
    double p_lo, p_hi;
    if (auto const* d = domain.as_disk())
    {
        double c = dot(across, d->center - origin);
        p_lo = c - d->radius;
        p_hi = c + d->radius;
    }
    else
    {
        Vec2 lo = domain.lo(), hi = domain.hi();
        Vec2 corners[4] = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
        p_lo = INFINITY;
        p_hi = -INFINITY;
        for (Vec2 c : corners)
        {
            double p = dot(across, c - origin);
            p_lo = std::min(p_lo, p);
            p_hi = std::max(p_hi, p);
        }
    }
    int n_rays = std::max(2, static_cast<int>(std::ceil((p_hi - p_lo) / spacing))) + 1;
    double dp = (p_hi - p_lo) / (n_rays - 1);

    std::vector<double> s_in(n_rays);
    lay.start.push_back(0);
    for (int r = 0; r < n_rays; ++r)
    {
        Vec2 base = origin + (p_lo + r * dp) * across;
        auto iv = domain.line_interval(base, theta);
        double a = 0, b = 0;
        if (iv)
        {
            a = iv->first;
            b = std::max(iv->first, iv->second);
        }
        else
        {
            // tangent extreme ray: a single point on the boundary
            Vec2 q = domain.project(base);
            a = b = dot(theta, q - origin) - dot(theta, base - origin);
        }
        s_in[r] = a;
        double len = b - a;
        int segs = len > 0 ? std::max(1, static_cast<int>(std::ceil(len / spacing))) : 0;
        double step = segs ? len / segs : 0;
        Vec2 entry = base + a * theta;
        lay.entry.push_back(entry);
        lay.step.push_back(step);
        for (int i = 0; i <= segs; ++i)
            lay.stencil.push_back(grid.stencil(entry + (i * step) * theta));
        lay.start.push_back(static_cast<int>(lay.stencil.size()));
    }

    auto active = grid.active_nodes();
    lay.out_sample.resize(4 * active.size());
    lay.out_weight.resize(4 * active.size());
    for (std::size_t k = 0; k < active.size(); ++k)
    {
        Vec2 y = grid.eval_point(active[k]);
        double p = dot(across, y - origin);
        double s = dot(theta, y - origin);
        int r = std::clamp(static_cast<int>(std::floor((p - p_lo) / dp)), 0, n_rays - 2);
        double beta = std::clamp((p - (p_lo + r * dp)) / dp, 0.0, 1.0);
        for (int side = 0; side < 2; ++side)
        {
            int ray = r + side;
            double wr = side ? beta : 1 - beta;
            int first = lay.start[ray];
            int segs = lay.start[ray + 1] - first - 1;
            int i0 = first, i1 = first;
            double lam = 0;
            if (segs > 0)
            {
                double t = s - s_in[ray];
                double u = t / lay.step[ray];
                int i = std::clamp(static_cast<int>(std::floor(u)), 0, segs - 1);
                lam = std::clamp(u - i, -1.0, 2.0);
                i0 = first + i;
                i1 = i0 + 1;
            }
            lay.out_sample[4 * k + 2 * side] = i0;
            lay.out_sample[4 * k + 2 * side + 1] = i1;
            lay.out_weight[4 * k + 2 * side] = wr * (1 - lam);
            lay.out_weight[4 * k + 2 * side + 1] = wr * lam;
        }
    }
    return lay;
}
}  // namespace

Discretization::Discretization(Domain const& domain, int n_theta, int n_x, int n_b)
    : domain_(domain), grids_(build_grids(domain, n_theta, n_x, n_b))
{
    rays_.resize(n_theta);
    parallel_for(static_cast<std::size_t>(n_theta), [&](std::size_t d) {
        rays_[d] = build_layout(domain_, grids_.spatial, grids_.directions.direction(static_cast<int>(d)));
    });
    hat_mass_ = grids_.spatial.hat_masses(domain_);
}

DiscretizationPtr make_discretization(Domain const& domain, int n_theta, int n_x, int n_b)
{
    return std::make_shared<Discretization const>(domain, n_theta, n_x, n_b);
}

}  // namespace rte_aot

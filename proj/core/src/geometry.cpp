#include "rte_aot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rte_aot/errors.hpp"

namespace rte_aot
{
Domain Domain::disk(Vec2 center, double radius)
{
    if (!(radius > 0) || !std::isfinite(radius))
        throw ArgumentError("disk radius must be positive");
    return Domain(Disk{center, radius});
}

Domain Domain::rectangle(Vec2 lo, Vec2 hi)
{
    if (!(lo.x < hi.x && lo.y < hi.y))
        throw ArgumentError("rectangle needs lo < hi componentwise");
    return Domain(Rectangle{lo, hi});
}

double Domain::diameter() const
{
    if (auto const* d = as_disk())
        return 2 * d->radius;
    auto const& r = std::get<Rectangle>(shape_);
    return norm(r.hi - r.lo);
}

double Domain::area() const
{
    if (auto const* d = as_disk())
        return std::numbers::pi * d->radius * d->radius;
    auto const& r = std::get<Rectangle>(shape_);
    return (r.hi.x - r.lo.x) * (r.hi.y - r.lo.y);
}

double Domain::perimeter() const
{
    if (auto const* d = as_disk())
        return 2 * std::numbers::pi * d->radius;
    auto const& r = std::get<Rectangle>(shape_);
    return 2 * ((r.hi.x - r.lo.x) + (r.hi.y - r.lo.y));
}

Vec2 Domain::lo() const
{
    if (auto const* d = as_disk())
        return d->center - Vec2{d->radius, d->radius};
    return std::get<Rectangle>(shape_).lo;
}

Vec2 Domain::hi() const
{
    if (auto const* d = as_disk())
        return d->center + Vec2{d->radius, d->radius};
    return std::get<Rectangle>(shape_).hi;
}

double Domain::inner_distance(Vec2 x) const
{
    if (auto const* d = as_disk())
        return d->radius - norm(x - d->center);
    auto const& r = std::get<Rectangle>(shape_);
    double ox = std::max({r.lo.x - x.x, 0.0, x.x - r.hi.x});
    double oy = std::max({r.lo.y - x.y, 0.0, x.y - r.hi.y});
    if (ox > 0 || oy > 0)
        return -std::hypot(ox, oy);
    return std::min({x.x - r.lo.x, r.hi.x - x.x, x.y - r.lo.y, r.hi.y - x.y});
}

namespace
{
// Face of a rectangle nearest to x: 0 left, 1 right, 2 bottom, 3 top.
int nearest_face(Rectangle const& r, Vec2 x)
{
    double d[4] = {std::abs(x.x - r.lo.x), std::abs(r.hi.x - x.x), std::abs(x.y - r.lo.y),
                   std::abs(r.hi.y - x.y)};
    return static_cast<int>(std::min_element(d, d + 4) - d);
}
}  // namespace

Vec2 Domain::project(Vec2 x) const
{
    if (auto const* d = as_disk())
    {
        Vec2 rel = x - d->center;
        double len = norm(rel);
        if (len == 0)
            return d->center + Vec2{d->radius, 0};
        return d->center + (d->radius / len) * rel;
    }
    auto const& r = std::get<Rectangle>(shape_);
    Vec2 c{std::clamp(x.x, r.lo.x, r.hi.x), std::clamp(x.y, r.lo.y, r.hi.y)};
    if (!(c == x))
        return c;
    switch (nearest_face(r, x))
    {
        case 0: return {r.lo.x, x.y};
        case 1: return {r.hi.x, x.y};
        case 2: return {x.x, r.lo.y};
        default: return {x.x, r.hi.y};
    }
}

Vec2 Domain::normal(Vec2 b) const
{
    if (auto const* d = as_disk())
    {
        Vec2 rel = b - d->center;
        return (1 / norm(rel)) * rel;
    }
    switch (nearest_face(std::get<Rectangle>(shape_), b))
    {
        case 0: return {-1, 0};
        case 1: return {1, 0};
        case 2: return {0, -1};
        default: return {0, 1};
    }
}

std::optional<std::pair<double, double>> Domain::line_interval(Vec2 p, Vec2 dir) const
{
    if (auto const* d = as_disk())
    {
        Vec2 rel = p - d->center;
        double a = dot(dir, dir);
        double b = dot(rel, dir);
        double c = dot(rel, rel) - d->radius * d->radius;
        double disc = b * b - a * c;
        if (disc < 0)
            return std::nullopt;
        double s = std::sqrt(disc);
        return std::pair{(-b - s) / a, (-b + s) / a};
    }
    auto const& r = std::get<Rectangle>(shape_);
    double t0 = -INFINITY, t1 = INFINITY;
    double const pv[2] = {p.x, p.y};
    double const dv[2] = {dir.x, dir.y};
    double const lo[2] = {r.lo.x, r.lo.y};
    double const hi[2] = {r.hi.x, r.hi.y};
    for (int k = 0; k < 2; ++k)
    {
        if (dv[k] == 0)
        {
            if (pv[k] < lo[k] || pv[k] > hi[k])
                return std::nullopt;
            continue;
        }
        double a = (lo[k] - pv[k]) / dv[k];
        double b = (hi[k] - pv[k]) / dv[k];
        t0 = std::max(t0, std::min(a, b));
        t1 = std::min(t1, std::max(a, b));
    }
    if (t0 > t1)
        return std::nullopt;
    return std::pair{t0, t1};
}

double Domain::exit_distance(Vec2 x, Vec2 dir) const
{
    if (auto const* d = as_disk())
    {
        Vec2 rel = x - d->center;
        double b = dot(rel, dir);
        double c = dot(rel, rel) - d->radius * d->radius;
        double disc = std::max(b * b - c, 0.0);
        return std::max(0.0, -b + std::sqrt(disc));
    }
    auto const& r = std::get<Rectangle>(shape_);
    double t = INFINITY;
    if (dir.x > 0)
        t = std::min(t, (r.hi.x - x.x) / dir.x);
    else if (dir.x < 0)
        t = std::min(t, (r.lo.x - x.x) / dir.x);
    if (dir.y > 0)
        t = std::min(t, (r.hi.y - x.y) / dir.y);
    else if (dir.y < 0)
        t = std::min(t, (r.lo.y - x.y) / dir.y);
    return std::max(0.0, t);
}

Vec2 Domain::boundary_point(double s) const
{
    double per = perimeter();
    s = std::fmod(s, per);
    if (s < 0)
        s += per;
    if (auto const* d = as_disk())
        return d->center + d->radius * unit(s / d->radius);
    auto const& r = std::get<Rectangle>(shape_);
    double w = r.hi.x - r.lo.x;
    double h = r.hi.y - r.lo.y;
    if (s < w)
        return {r.lo.x + s, r.lo.y};
    s -= w;
    if (s < h)
        return {r.hi.x, r.lo.y + s};
    s -= h;
    if (s < w)
        return {r.hi.x - s, r.hi.y};
    s -= w;
    return {r.lo.x, r.hi.y - s};
}

double exit_time(Domain const& domain, Vec2 x, Vec2 theta, Side side)
{
    if (std::abs(norm(theta) - 1) > 1e-12)
        throw ArgumentError("direction is not a unit vector");
    if (!domain.in_closure(x))
        throw DomainError("point lies outside the domain");
    return domain.exit_distance(x, side == Side::plus ? theta : -theta);
}

BoundaryPoint classify_boundary(Domain const& domain, Vec2 b, Vec2 theta)
{
    if (std::abs(domain.inner_distance(b)) > tol_boundary)
        throw ArgumentError("point is not on the boundary");
    BoundaryPoint bp;
    bp.position = b;
    bp.normal = domain.normal(b);
    double c = dot(theta, bp.normal);
    bp.flow = c > tol_tangent ? FlowClass::outflow
                              : (c < -tol_tangent ? FlowClass::inflow : FlowClass::tangential);
    return bp;
}

std::vector<ChordNode> chord_quadrature(
    Domain const& domain, Vec2 x, Vec2 theta, double max_step, std::optional<PlaneFamily> planes)
{
    if (!(max_step > 0))
        throw ArgumentError("max_step must be positive");
    double len = exit_time(domain, x, theta, Side::minus);
    std::vector<ChordNode> out;
    if (len <= 0)
    {
        out.push_back({x, 0, 0});
        return out;
    }

    std::vector<double> cuts{0.0};
    if (planes)
    {
        if (!(planes->spacing > 0))
            throw ArgumentError("plane spacing must be positive");
        double rate = dot(planes->normal, theta);
        if (rate != 0)
        {
            // plane coordinate along the chord: c(t) = c0 - t * rate
            double c0 = dot(planes->normal, x) - planes->offset;
            double c1 = c0 - len * rate;
            auto m_lo = static_cast<long>(std::ceil(std::min(c0, c1) / planes->spacing));
            auto m_hi = static_cast<long>(std::floor(std::max(c0, c1) / planes->spacing));
            for (long m = m_lo; m <= m_hi; ++m)
            {
                double t = (c0 - static_cast<double>(m) * planes->spacing) / rate;
                if (t > 0 && t < len)
                    cuts.push_back(t);
            }
            std::sort(cuts.begin(), cuts.end());
        }
    }
    cuts.push_back(len);

    double const nudge = 1e-12 * std::max(1.0, len);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    {
        double a = cuts[k];
        double b = cuts[k + 1];
        double piece = b - a;
        if (piece <= 0)
            continue;
        int n = std::max(1, static_cast<int>(std::ceil(piece / max_step - 1e-12)));
        n += n % 2;
        double step = piece / n;
        for (int i = 0; i <= n; ++i)
        {
            double t = a + i * step;
            double w = (i == 0 || i == n) ? step / 3 : (i % 2 ? 4 * step / 3 : 2 * step / 3);
            if (planes && piece > 4 * nudge)
            {
                if (i == 0)
                    t += nudge;
                if (i == n)
                    t -= nudge;
            }
            out.push_back({x - t * theta, t, w});
        }
    }
    return out;
}

DirectionGrid::DirectionGrid(int n)
{
    if (n < 4 || n % 2 != 0)
        throw ArgumentError("direction count must be even and >= 4, got " + std::to_string(n));
    dirs_.resize(n);
    angles_.resize(n);
    for (int j = 0; j < n; ++j)
        angles_[j] = 2 * std::numbers::pi * j / n;
    for (int j = 0; j < n / 2; ++j)
    {
        dirs_[j] = unit(angles_[j]);
        dirs_[j + n / 2] = -dirs_[j];
    }
    weight_ = 2 * std::numbers::pi / n;
}

SpatialGrid::SpatialGrid(Domain const& domain, int n) : n_(n)
{
    if (n < 4)
        throw ArgumentError("spatial grid needs at least 4 nodes per axis");
    lo_ = domain.lo();
    extent_ = domain.hi() - lo_;
    dx_ = extent_.x / n;
    dy_ = extent_.y / n;
    double reach = std::hypot(dx_, dy_) * (1 + 1e-12);
    kinds_.assign(lattice_size(), NodeKind::outside);
    eval_points_.resize(lattice_size());
    for (int idx = 0; idx < static_cast<int>(lattice_size()); ++idx)
    {
        Vec2 p = node(idx);
        double d = domain.inner_distance(p);
        eval_points_[idx] = p;
        if (d > 0)
        {
            kinds_[idx] = NodeKind::inside;
            inside_.push_back(idx);
            active_.push_back(idx);
        }
        else if (-d <= reach)
        {
            kinds_[idx] = NodeKind::ghost;
            eval_points_[idx] = domain.project(p);
            active_.push_back(idx);
        }
    }
}

Bilinear SpatialGrid::stencil(Vec2 p) const
{
    double gx = (p.x - lo_.x) / dx_ - 0.5;
    double gy = (p.y - lo_.y) / dy_ - 0.5;
    int i = std::clamp(static_cast<int>(std::floor(gx)), 0, n_ - 2);
    int j = std::clamp(static_cast<int>(std::floor(gy)), 0, n_ - 2);
    return {index(i, j), std::clamp(gx - i, 0.0, 1.0), std::clamp(gy - j, 0.0, 1.0)};
}

double SpatialGrid::interpolate(std::span<double const> v, Vec2 p) const
{
    Bilinear s = stencil(p);
    double const* a = v.data() + s.base;
    return (1 - s.fy) * ((1 - s.fx) * a[0] + s.fx * a[1])
           + s.fy * ((1 - s.fx) * a[n_] + s.fx * a[n_ + 1]);
}

std::vector<double> SpatialGrid::hat_masses(Domain const& domain, int subsamples) const
{
    std::vector<double> mass(lattice_size(), 0.0);
    int m = n_ * subsamples;
    double hx = extent_.x / m;
    double hy = extent_.y / m;
    double da = hx * hy;
    for (int j = 0; j < m; ++j)
    {
        for (int i = 0; i < m; ++i)
        {
            Vec2 p{lo_.x + (i + 0.5) * hx, lo_.y + (j + 0.5) * hy};
            if (domain.inner_distance(p) < 0)
                continue;
            Bilinear s = stencil(p);
            mass[s.base] += (1 - s.fx) * (1 - s.fy) * da;
            mass[s.base + 1] += s.fx * (1 - s.fy) * da;
            mass[s.base + n_] += (1 - s.fx) * s.fy * da;
            mass[s.base + n_ + 1] += s.fx * s.fy * da;
        }
    }
    for (double& v : mass)
        v /= cell_area();
    return mass;
}

BoundaryGrid make_boundary_grid(Domain const& domain, int n_b)
{
    if (n_b < 4)
        throw ArgumentError("boundary grid needs at least 4 points");
    BoundaryGrid g;
    double per = domain.perimeter();
    g.arc_weight = per / n_b;
    for (int i = 0; i < n_b; ++i)
    {
        Vec2 b = domain.boundary_point((i + 0.5) * g.arc_weight);
        g.points.push_back(b);
        g.normals.push_back(domain.normal(b));
    }
    return g;
}

Grids build_grids(Domain const& domain, int n_theta, int n_x, int n_b)
{
    if (n_theta % 2 != 0)
        throw ArgumentError("N_theta must be even for reflection closure");
    if (n_theta < 4 || n_x < 4 || n_b < 4)
        throw ArgumentError("grid counts must be >= 4");
    return Grids{DirectionGrid(n_theta), SpatialGrid(domain, n_x), make_boundary_grid(domain, n_b)};
}

}  // namespace rte_aot

#include "rte_aot/field.hpp"

#include <algorithm>
#include <cmath>

#include "rte_aot/errors.hpp"

namespace rte_aot
{
TransportField::TransportField(DiscretizationPtr disc, std::vector<double> grid)
    : disc_(std::move(disc)), grid_(std::move(grid))
{
    if (!grid_.empty() && grid_.size() != disc_->field_size())
        throw ArgumentError("grid values do not match the discretization");
}

AngularSlot angular_slot(int n_theta, Vec2 theta)
{
    double a = angle_of(theta);
    if (a < 0)
        a += 2 * std::numbers::pi;
    double u = a * n_theta / (2 * std::numbers::pi);
    double f = std::floor(u);
    AngularSlot s{static_cast<int>(f) % n_theta, u - f};
    if (s.frac > 1 - 1e-12)
    {
        s.index = (s.index + 1) % n_theta;
        s.frac = 0;
    }
    else if (s.frac < 1e-12)
        s.frac = 0;
    return s;
}

void cubic_weights(double t, double w[4])
{
    // nodes at -1, 0, 1, 2
    w[0] = -t * (t - 1) * (t - 2) / 6;
    w[1] = (t + 1) * (t - 1) * (t - 2) / 2;
    w[2] = -(t + 1) * t * (t - 2) / 2;
    w[3] = (t + 1) * t * (t - 1) / 6;
}

double TransportField::interpolate_grid(Vec2 x, Vec2 theta) const
{
    if (grid_.empty())
        return 0;
    int n = disc_->n_theta();
    auto const& sg = disc_->spatial();
    AngularSlot s = angular_slot(n, theta);
    if (s.frac == 0)
        return sg.interpolate(plane(s.index), x);
    double w[4];
    cubic_weights(s.frac, w);
    double v = 0;
    for (int k = 0; k < 4; ++k)
        v += w[k] * sg.interpolate(plane(((s.index + k - 1) % n + n) % n), x);
    return v;
}

double TransportField::grid_value(Vec2 x, Vec2 theta) const
{
    if (grid_eval_)
        return grid_eval_->value(x, theta);
    return interpolate_grid(x, theta);
}

double TransportField::parts_value(Vec2 x, Vec2 theta) const
{
    double v = 0;
    for (auto const& p : parts_)
        v += p->value(x, theta);
    return v;
}

double TransportField::node_value(int node, int d) const
{
    double v = grid_.empty() ? 0.0 : grid_[d * disc_->lattice_size() + node];
    if (!parts_.empty())
        v += parts_value(disc_->spatial().eval_point(node), disc_->directions().direction(d));
    return v;
}

double TransportField::sup_norm() const
{
    double m = 0;
    for (int d = 0; d < disc_->n_theta(); ++d)
        for (int node : disc_->spatial().inside_nodes())
            m = std::max(m, std::abs(node_value(node, d)));
    return m;
}

double TransportField::grid_sup_norm() const
{
    if (grid_.empty())
        return 0;
    double m = 0;
    std::size_t lat = disc_->lattice_size();
    for (int d = 0; d < disc_->n_theta(); ++d)
        for (int node : disc_->spatial().inside_nodes())
            m = std::max(m, std::abs(grid_[d * lat + node]));
    return m;
}

double TransportField::l1_theta(int node) const
{
    double s = 0;
    for (int d = 0; d < disc_->n_theta(); ++d)
        s += std::abs(node_value(node, d));
    return s * disc_->directions().weight();
}

TransportField TransportField::reflected() const
{
    TransportField r(disc_);
    if (!grid_.empty())
    {
        std::size_t lat = disc_->lattice_size();
        r.grid_.resize(grid_.size());
        auto const& dirs = disc_->directions();
        for (int d = 0; d < dirs.size(); ++d)
            std::copy_n(grid_.begin() + dirs.opposite(d) * lat, lat, r.grid_.begin() + d * lat);
    }
    for (auto const& p : parts_)
        r.parts_.push_back(std::make_shared<ReflectedPart>(p));
    if (grid_eval_)
        r.grid_eval_ = std::make_shared<ReflectedPart>(grid_eval_);
    return r;
}

std::optional<AngularWindow> ReflectedPart::support() const
{
    auto w = inner_->support();
    if (w)
        w->center = angle_diff(w->center + std::numbers::pi, 0);
    return w;
}

std::vector<AngularWindow> ReflectedPart::features() const
{
    auto f = inner_->features();
    for (auto& w : f)
        w.center = angle_diff(w.center + std::numbers::pi, 0);
    return f;
}

void ReflectedPart::breaks(Vec2 x, std::vector<double>& out) const
{
    std::size_t first = out.size();
    inner_->breaks(x, out);
    for (std::size_t i = first; i < out.size(); ++i)
        out[i] = angle_diff(out[i] + std::numbers::pi, 0);
}

}  // namespace rte_aot

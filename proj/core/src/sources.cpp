#include "rte_aot/sources.hpp"

#include <algorithm>

#include "rte_aot/errors.hpp"

namespace rte_aot
{
BoundarySource BoundarySource::angular(AngularFn f, BoundarySide side)
{
    if (!f)
        throw ArgumentError("empty angular source");
    BoundarySource s;
    s.kind_ = Kind::angular;
    s.side_ = side;
    s.fn_ = [f = std::move(f)](Vec2, Vec2 theta) { return f(theta); };
    return s;
}

BoundarySource BoundarySource::boundary_function(BoundaryFn f, BoundarySide side)
{
    if (!f)
        throw ArgumentError("empty boundary source");
    BoundarySource s;
    s.kind_ = Kind::boundary_function;
    s.side_ = side;
    s.fn_ = std::move(f);
    return s;
}

BoundarySource BoundarySource::concentrated(AngularWindow window, double amplitude, BoundarySide side)
{
    if (!(window.half_width > 0 && window.half_width < std::numbers::pi))
        throw ArgumentError("angular window half width out of range");
    BoundarySource s;
    s.kind_ = Kind::concentrated;
    s.side_ = side;
    s.window_ = window;
    s.amplitude_ = amplitude;
    return s;
}

BoundarySource BoundarySource::oscillatory(AngularWindow window,
                                           double amplitude,
                                           OscillationFrame frame,
                                           BoundarySide side)
{
    if (!(frame.period > 0))
        throw ArgumentError("oscillation period must be positive");
    BoundarySource s = concentrated(window, amplitude, side);
    s.kind_ = Kind::oscillatory;
    s.frame_ = frame;
    return s;
}

double BoundarySource::operator()(Vec2 b, Vec2 theta) const
{
    switch (kind_)
    {
        case Kind::angular:
        case Kind::boundary_function: return scale_ * fn_(b, theta);
        case Kind::concentrated:
            return window_->contains(angle_of(theta)) ? scale_ * amplitude_ : 0.0;
        case Kind::oscillatory:
            return window_->contains(angle_of(theta)) ? scale_ * amplitude_ * frame_->sign(b) : 0.0;
    }
    return 0;
}

double BoundarySource::angular_l1() const
{
    if (!window_)
        throw ArgumentError("angular L1 norm is only tabulated for windowed sources");
    return 2 * window_->half_width * std::abs(scale_ * amplitude_);
}

double BoundarySource::sup_estimate() const
{
    if (window_)
        return std::abs(scale_ * amplitude_);
    double m = 0;
    for (int i = 0; i < 720; ++i)
        m = std::max(m, std::abs((*this)({0, 0}, unit(2 * std::numbers::pi * i / 720))));
    return m;
}

BoundarySource BoundarySource::reflected() const
{
    BoundarySource s = *this;
    s.side_ = side_ == BoundarySide::inflow ? BoundarySide::outflow : BoundarySide::inflow;
    if (window_)
        s.window_->center = angle_diff(window_->center + std::numbers::pi, 0);
    if (fn_)
        s.fn_ = [f = fn_](Vec2 b, Vec2 theta) { return f(b, -theta); };
    return s;
}

BoundarySource BoundarySource::scaled(double factor) const
{
    BoundarySource s = *this;
    s.scale_ *= factor;
    return s;
}

BoundarySource BoundarySource::on_side(BoundarySide side) const
{
    BoundarySource s = *this;
    s.side_ = side;
    return s;
}

}  // namespace rte_aot

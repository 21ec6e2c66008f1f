#pragma once

#include <functional>
#include <optional>

#include "rte_aot/vec.hpp"

namespace rte_aot
{
enum class BoundarySide
{
    inflow,   //!< data on Gamma_-
    outflow   //!< data on Gamma_+
};

//! Open geodesic arc |angle - center| < half_width.
struct AngularWindow
{
    double center = 0;
    double half_width = 0;

    bool contains(double angle) const { return std::abs(angle_diff(angle, center)) < half_width; }
};

//! +1 when floor(t) is even, -1 when odd.
inline double parity_sign(double t)
{
    double f = std::floor(t);
    return std::fmod(f, 2.0) == 0 ? 1.0 : -1.0;
}

//! Stripes s((across . b - offset) / period) on the boundary.
struct OscillationFrame
{
    Vec2 across;
    double period = 1;
    double offset = 0;

    double coordinate(Vec2 b) const { return (dot(across, b) - offset) / period; }
    double sign(Vec2 b) const { return parity_sign(coordinate(b)); }
};

class BoundarySource
{
  public:
    enum class Kind
    {
        angular,            //!< f(theta)
        boundary_function,  //!< f(b, theta)
        concentrated,       //!< constant amplitude on an arc
        oscillatory         //!< amplitude on an arc times boundary stripes
    };

    using AngularFn = std::function<double(Vec2)>;
    using BoundaryFn = std::function<double(Vec2, Vec2)>;

    static BoundarySource angular(AngularFn f, BoundarySide side = BoundarySide::inflow);
    static BoundarySource boundary_function(BoundaryFn f, BoundarySide side = BoundarySide::inflow);
    static BoundarySource concentrated(AngularWindow window,
                                       double amplitude,
                                       BoundarySide side = BoundarySide::inflow);
    static BoundarySource oscillatory(AngularWindow window,
                                      double amplitude,
                                      OscillationFrame frame,
                                      BoundarySide side = BoundarySide::inflow);

    Kind kind() const { return kind_; }
    BoundarySide side() const { return side_; }
    bool is_smooth() const { return kind_ == Kind::angular || kind_ == Kind::boundary_function; }
    std::optional<AngularWindow> const& window() const { return window_; }
    std::optional<OscillationFrame> const& frame() const { return frame_; }
    double amplitude() const { return scale_ * amplitude_; }

    double operator()(Vec2 b, Vec2 theta) const;

    //! Integral over S^1 of |f(b, .)| for windowed sources.
    double angular_l1() const;
    //! Supremum of |f|; for smooth sources estimated on 720 directions at the origin.
    double sup_estimate() const;

    //! g(b, theta) -> g(b, -theta) with the side flipped.
    BoundarySource reflected() const;
    BoundarySource scaled(double s) const;
    BoundarySource on_side(BoundarySide side) const;

  private:
    Kind kind_ = Kind::angular;
    BoundarySide side_ = BoundarySide::inflow;
    BoundaryFn fn_;
    std::optional<AngularWindow> window_;
    std::optional<OscillationFrame> frame_;
    double amplitude_ = 0;
    double scale_ = 1;
};

}  // namespace rte_aot

#pragma once

#include <memory>
#include <vector>

#include "rte_aot/field.hpp"
#include "rte_aot/transport.hpp"

namespace rte_aot::detail
{
struct TransportState
{
    Medium medium;
    DiscretizationPtr disc;
    SolverOptions options;
    std::vector<double> envelope;   //!< nodal acoustic envelope; empty when unmodulated
    std::vector<double> kappa_lat;  //!< solver kappa at lattice eval points
    std::vector<std::vector<double>> atten;  //!< per direction, per ray sample: exp(-depth of segment)
    std::vector<double> phase_table;         //!< p(cos(2 pi m / N)) for grid offsets m
    double panel = 0.25;                     //!< Gauss panel length for closure depths

    double sigma(Vec2 x) const
    {
        double s = medium.sigma_field()(x);
        if (!envelope.empty())
            s *= disc->spatial().interpolate(envelope, x);
        return s;
    }
    double kappa(Vec2 x) const
    {
        double k = medium.kernel().kappa_field()(x);
        if (!envelope.empty())
            k *= disc->spatial().interpolate(envelope, x);
        return k;
    }
    double depth(Vec2 x, Vec2 dir, double t) const
    {
        if (t <= 0)
            return 0;
        if (envelope.empty() && medium.sigma_field().is_constant())
            return medium.sigma_field().base() * t;
        return line_integral([this](Vec2 p) { return sigma(p); }, x, dir, t, panel);
    }
    Domain const& domain() const { return disc->domain(); }
};

using StatePtr = std::shared_ptr<TransportState const>;

//! Ballistic closure: J f (inflow data) or J~ f (outflow data).
class BallisticPart final : public FieldPart
{
  public:
    BallisticPart(StatePtr s, BoundarySource src) : s_(std::move(s)), src_(std::move(src)) {}
    double value(Vec2 x, Vec2 theta) const override;
    std::optional<AngularWindow> support() const override { return src_.window(); }
    std::vector<AngularWindow> features() const override;
    void breaks(Vec2 x, std::vector<double>& out) const override;
    BoundarySource const& source() const { return src_; }

  private:
    StatePtr s_;
    BoundarySource src_;
};

//! T1^{-1} S by chord quadrature of a gridded source S.
class ChordPart final : public FieldPart
{
  public:
    ChordPart(StatePtr s, std::shared_ptr<std::vector<double> const> src)
        : s_(std::move(s)), src_(std::move(src))
    {
    }
    double value(Vec2 x, Vec2 theta) const override;

  private:
    StatePtr s_;
    std::shared_ptr<std::vector<double> const> src_;
};

//! Angles inside the source arc where the boundary stripe seen from x flips sign.
void sign_breaks(Domain const& domain,
                 Vec2 x,
                 AngularWindow window,
                 OscillationFrame const& frame,
                 BoundarySide side,
                 std::vector<double>& out);

//! First collision K J g of an oscillatory source, tabulated on a fine lattice.
FieldPartPtr make_oscillatory_collision(StatePtr s, BoundarySource const& g);

//! Evaluate an oscillatory first-collision part at grid nodes with a coarse step.
std::vector<double> oscillatory_collision_grid(FieldPart const& part, Discretization const& disc);

}  // namespace rte_aot::detail

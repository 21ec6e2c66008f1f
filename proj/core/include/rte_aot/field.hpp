#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rte_aot/discretization.hpp"
#include "rte_aot/sources.hpp"

namespace rte_aot
{
//! Analytic component of a transport field, evaluated on demand.
class FieldPart
{
  public:
    virtual ~FieldPart() = default;
    virtual double value(Vec2 x, Vec2 theta) const = 0;
    //! Angular arc outside of which the part vanishes.
    virtual std::optional<AngularWindow> support() const { return std::nullopt; }
    //! Arcs where the part varies rapidly in angle (quadrature refinement hints).
    virtual std::vector<AngularWindow> features() const { return {}; }
    //! Angles at which the part jumps, at a fixed point.
    virtual void breaks(Vec2, std::vector<double>&) const {}
};

using FieldPartPtr = std::shared_ptr<FieldPart const>;

//! Sum of analytic parts and a gridded part on the lattice x direction grid.
//! Grid values are stored direction-major: values[d * lattice + node].
class TransportField
{
  public:
    TransportField() = default;
    explicit TransportField(DiscretizationPtr disc) : disc_(std::move(disc)) {}
    TransportField(DiscretizationPtr disc, std::vector<double> grid);

    Discretization const& disc() const { return *disc_; }
    DiscretizationPtr const& disc_ptr() const { return disc_; }

    bool has_grid() const { return !grid_.empty(); }
    std::span<double const> grid() const { return grid_; }
    std::vector<double>& grid_mut() { return grid_; }
    std::span<double const> plane(int d) const
    {
        return std::span<double const>(grid_).subspan(d * disc_->lattice_size(), disc_->lattice_size());
    }

    void add_part(FieldPartPtr p) { parts_.push_back(std::move(p)); }
    std::vector<FieldPartPtr> const& parts() const { return parts_; }

    //! Off-grid evaluator of the gridded part (e.g. a chord integral of its source).
    void set_grid_evaluator(FieldPartPtr p) { grid_eval_ = std::move(p); }
    FieldPartPtr const& grid_evaluator() const { return grid_eval_; }

    //! Gridded part only, interpolated bilinearly in space and cubically in angle.
    double interpolate_grid(Vec2 x, Vec2 theta) const;
    //! Gridded part at (x, theta): evaluator when present, interpolation otherwise.
    double grid_value(Vec2 x, Vec2 theta) const;
    double parts_value(Vec2 x, Vec2 theta) const;
    double evaluate(Vec2 x, Vec2 theta) const { return parts_value(x, theta) + grid_value(x, theta); }

    //! Total value at a lattice node (its eval point) and grid direction.
    double node_value(int node, int d) const;

    //! sup over inside nodes x grid directions of |value|.
    double sup_norm() const;
    //! sup over inside nodes x grid directions of the gridded part.
    double grid_sup_norm() const;
    //! Direction-grid quadrature of |value| at a node.
    double l1_theta(int node) const;

    //! v(x, theta) = u(x, -theta).
    TransportField reflected() const;

  private:
    DiscretizationPtr disc_;
    std::vector<double> grid_;
    std::vector<FieldPartPtr> parts_;
    FieldPartPtr grid_eval_;
};

//! Wraps a part with theta -> -theta.
class ReflectedPart final : public FieldPart
{
  public:
    explicit ReflectedPart(FieldPartPtr inner) : inner_(std::move(inner)) {}
    double value(Vec2 x, Vec2 theta) const override { return inner_->value(x, -theta); }
    std::optional<AngularWindow> support() const override;
    std::vector<AngularWindow> features() const override;
    void breaks(Vec2 x, std::vector<double>& out) const override;

  private:
    FieldPartPtr inner_;
};

//! Angle position of theta on a uniform grid: lower index and fraction.
struct AngularSlot
{
    int index = 0;
    double frac = 0;
};
AngularSlot angular_slot(int n_theta, Vec2 theta);

//! Four-point periodic Lagrange weights for a fractional position.
void cubic_weights(double frac, double w[4]);

}  // namespace rte_aot

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "rte_aot/vec.hpp"

namespace rte_aot
{
inline constexpr double tol_tangent = 1e-9;
inline constexpr double tol_boundary = 1e-9;

enum class Side
{
    plus,   //!< distance to the outflow boundary along +theta
    minus   //!< distance to the inflow boundary along -theta
};

enum class FlowClass
{
    inflow,
    outflow,
    tangential
};

struct Disk
{
    Vec2 center;
    double radius = 1;
};

struct Rectangle
{
    Vec2 lo;
    Vec2 hi;
};

class Domain
{
  public:
    static Domain disk(Vec2 center, double radius);
    static Domain rectangle(Vec2 lo, Vec2 hi);

    int dimension() const { return 2; }
    double diameter() const;
    double area() const;
    double perimeter() const;
    Vec2 lo() const;
    Vec2 hi() const;

    bool is_disk() const { return std::holds_alternative<Disk>(shape_); }
    Disk const* as_disk() const { return std::get_if<Disk>(&shape_); }
    Rectangle const* as_rectangle() const { return std::get_if<Rectangle>(&shape_); }

    //! Signed distance to the boundary, positive inside.
    double inner_distance(Vec2 x) const;
    bool in_closure(Vec2 x, double tol = tol_boundary) const { return inner_distance(x) >= -tol; }

    //! Nearest boundary point.
    Vec2 project(Vec2 x) const;
    //! Outward unit normal at (or nearest to) a boundary point.
    Vec2 normal(Vec2 b) const;

    //! Parameter interval {t : p + t dir in closure}, empty if the line misses.
    std::optional<std::pair<double, double>> line_interval(Vec2 p, Vec2 dir) const;

    //! Distance from x to the boundary along dir (x in closure, dir unit).
    double exit_distance(Vec2 x, Vec2 dir) const;

    //! Boundary point at arc length s from the reference point.
    Vec2 boundary_point(double s) const;

  private:
    explicit Domain(std::variant<Disk, Rectangle> s) : shape_(s) {}
    std::variant<Disk, Rectangle> shape_;
};

//! tau_+(x, theta) or tau_-(x, theta); validates its arguments.
double exit_time(Domain const& domain, Vec2 x, Vec2 theta, Side side);

struct BoundaryPoint
{
    Vec2 position;
    Vec2 normal;
    FlowClass flow = FlowClass::tangential;
};

BoundaryPoint classify_boundary(Domain const& domain, Vec2 b, Vec2 theta);

//! Planes {y : normal . y = offset + m * spacing}, m integer.
struct PlaneFamily
{
    Vec2 normal;
    double spacing = 1;
    double offset = 0;
};

struct ChordNode
{
    Vec2 point;
    double t = 0;
    double weight = 0;
};

//! Composite Simpson nodes on the backward chord x - t theta, t in [0, tau_-].
//! With planes given, no subinterval straddles a plane; nodes at a plane are
//! placed a hair inside their own piece so one-sided values are sampled.
//! Pieces are split into an even number of steps no longer than max_step.
std::vector<ChordNode> chord_quadrature(Domain const& domain,
                                        Vec2 x,
                                        Vec2 theta,
                                        double max_step,
                                        std::optional<PlaneFamily> planes = {});

class DirectionGrid
{
  public:
    explicit DirectionGrid(int n);

    int size() const { return static_cast<int>(dirs_.size()); }
    Vec2 direction(int i) const { return dirs_[i]; }
    double angle(int i) const { return angles_[i]; }
    double weight() const { return weight_; }
    int opposite(int i) const { return (i + size() / 2) % size(); }
    std::span<Vec2 const> directions() const { return dirs_; }

  private:
    std::vector<Vec2> dirs_;
    std::vector<double> angles_;
    double weight_ = 0;
};

enum class NodeKind : std::uint8_t
{
    outside,
    inside,
    ghost  //!< outside X but touching a cell that meets X; evaluated at its projection
};

struct Bilinear
{
    int base = 0;  //!< lattice index of the lower-left corner
    double fx = 0;
    double fy = 0;
};

//! Cell-centered N x N lattice over the bounding box of X.
class SpatialGrid
{
  public:
    SpatialGrid(Domain const& domain, int n);

    int n() const { return n_; }
    std::size_t lattice_size() const { return static_cast<std::size_t>(n_) * n_; }
    Vec2 lo() const { return lo_; }
    Vec2 extent() const { return extent_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }
    double cell_area() const { return dx_ * dy_; }

    int index(int i, int j) const { return j * n_ + i; }
    Vec2 node(int idx) const
    {
        return {lo_.x + (idx % n_ + 0.5) * dx_, lo_.y + (idx / n_ + 0.5) * dy_};
    }
    NodeKind kind(int idx) const { return kinds_[idx]; }
    //! Position where a node's value is defined (ghosts: boundary projection).
    Vec2 eval_point(int idx) const { return eval_points_[idx]; }

    std::span<int const> inside_nodes() const { return inside_; }
    std::span<int const> active_nodes() const { return active_; }

    //! Quadrature weight of a lattice node (cell area inside, 0 otherwise).
    double volume_weight(int idx) const { return kinds_[idx] == NodeKind::inside ? cell_area() : 0.0; }
    double total_volume() const { return cell_area() * static_cast<double>(inside_.size()); }

    //! Clamped bilinear stencil for a point of the plane.
    Bilinear stencil(Vec2 p) const;
    double interpolate(std::span<double const> lattice_values, Vec2 p) const;

    //! Integral over X of each node's bilinear hat, divided by the cell area.
    std::vector<double> hat_masses(Domain const& domain, int subsamples = 16) const;

  private:
    int n_ = 0;
    Vec2 lo_, extent_;
    double dx_ = 0, dy_ = 0;
    std::vector<NodeKind> kinds_;
    std::vector<Vec2> eval_points_;
    std::vector<int> inside_;
    std::vector<int> active_;
};

//! Boundary nodes uniform in arc length.
struct BoundaryGrid
{
    std::vector<Vec2> points;
    std::vector<Vec2> normals;
    double arc_weight = 0;

    int size() const { return static_cast<int>(points.size()); }
};

BoundaryGrid make_boundary_grid(Domain const& domain, int n_b);

struct Grids
{
    DirectionGrid directions;
    SpatialGrid spatial;
    BoundaryGrid boundary;
};

Grids build_grids(Domain const& domain, int n_theta, int n_x, int n_b);

}  // namespace rte_aot

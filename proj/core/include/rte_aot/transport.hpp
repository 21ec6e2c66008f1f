#pragma once

#include <memory>
#include <span>
#include <vector>

#include "rte_aot/discretization.hpp"
#include "rte_aot/field.hpp"
#include "rte_aot/media.hpp"
#include "rte_aot/sources.hpp"

namespace rte_aot
{
struct SolverOptions
{
    double tol_series = 1e-8;
    int j_max = 60;
    //! Gauss points across a concentrated source's arc.
    int m_sub = 16;
    //! Upper bound on the chord step of off-grid evaluation; 0 means half a cell.
    double max_step = 0;
};

struct SolveDiagnostics
{
    int terms_used = 0;
    double contraction_observed = 0;
    double tail_bound = 0;
    //! sup norm of the first collision term K J f
    double first_collision_norm = 0;
    bool jmax_warning = false;
};

//! field.parts().front() is the ballistic term J f.
struct Solution
{
    TransportField field;
    SolveDiagnostics diagnostics;
    BoundarySource source;
    //! u - J f at active nodes and grid directions (direction-major); empty when k = 0.
    std::vector<double> scattered;
};

//! Values on the full boundary grid x direction grid; tangential pairs hold 0.
struct BoundaryTrace
{
    int n_b = 0;
    int n_theta = 0;
    std::vector<double> values;

    double& at(int b, int d) { return values[static_cast<std::size_t>(b) * n_theta + d]; }
    double at(int b, int d) const { return values[static_cast<std::size_t>(b) * n_theta + d]; }
};

namespace detail
{
struct TransportState;
}

//! Collision-expansion solver bound to one medium and one discretization.
//! A modulated medium's acoustic envelope is resolved on the lattice: the
//! solver uses its nodal values, interpolated bilinearly between nodes.
class Transport
{
  public:
    Transport(Medium medium, DiscretizationPtr disc, SolverOptions options = {});

    Medium const& medium() const;
    Discretization const& disc() const;
    DiscretizationPtr const& disc_ptr() const;
    SolverOptions const& options() const;

    //! Coefficients as the solver sees them.
    double sigma(Vec2 x) const;
    double kappa(Vec2 x) const;
    double k(Vec2 x, Vec2 theta, Vec2 theta_p) const;
    //! Integral of sigma along x + s dir, s in [0, t].
    double depth(Vec2 x, Vec2 dir, double t) const;

    TransportField apply_J(BoundarySource const& f) const;
    TransportField apply_Jtilde(BoundarySource const& f) const;
    TransportField apply_A2(TransportField const& w) const;
    TransportField apply_T1inv(TransportField const& w) const;
    TransportField apply_A(TransportField const& w) const;

    Solution solve_forward(BoundarySource const& f) const;
    //! Source given on Gamma_+; solved by reflection and the reciprocal kernel.
    Solution solve_adjoint(BoundarySource const& g) const;

    //! Data on the source side, solution trace on the other side.
    BoundaryTrace trace(Solution const& s) const;
    //! Gamma_+ trace of the forward solution; zero elsewhere.
    BoundaryTrace albedo(BoundarySource const& f) const;

    //! Gridded building blocks (direction-major lattice arrays).
    std::vector<double> sweep(std::span<double const> source) const;
    std::vector<double> ballistic_grid(BoundarySource const& f) const;
    std::vector<double> a2_grid(std::span<double const> w) const;
    //! Total values (parts + grid) at active nodes and grid directions.
    std::vector<double> node_values(TransportField const& w) const;
    //! A2 of a windowed part by Gauss sub-quadrature across its arc.
    std::vector<double> window_a2(FieldPart const& part) const;

    std::shared_ptr<detail::TransportState const> const& state() const { return s_; }

  private:
    std::shared_ptr<detail::TransportState const> s_;
};

}  // namespace rte_aot

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rte_aot/transport.hpp"

namespace rte_aot
{
enum class Route
{
    oracle,
    fourier
};

std::string to_string(Route r);

//! Quadrature of u v (n . theta) over the boundary grid x direction grid.
double boundary_pairing(BoundaryTrace const& u,
                        BoundaryTrace const& v,
                        BoundaryGrid const& boundary,
                        DirectionGrid const& dirs);

struct Measurement
{
    Vec2 q;
    double phi = 0;
    double value = 0;
};

//! Entries ordered by (m2, m1, phase) with m in [-n_q/2, n_q/2) and phase in {0, pi/2}.
struct MeasurementSet
{
    double epsilon = 0;
    int n_q = 0;
    Vec2 extent;  //!< bounding box side lengths defining the dual grid
    std::string sources;
    std::vector<Measurement> entries;

    std::size_t index(int m1, int m2, int phase) const
    {
        return (static_cast<std::size_t>(m2 + n_q / 2) * n_q + (m1 + n_q / 2)) * 2 + phase;
    }
    Vec2 q(int m1, int m2) const;
};

//! Differential boundary measurements for one source pair on one medium.
//! The adjoint solve and the unmodulated pairing are computed once.
class Measurer
{
  public:
    Measurer(Medium medium, DiscretizationPtr disc, BoundarySource f, BoundarySource g, SolverOptions options = {});

    //! pairing(u_eps, v) - pairing(u_0, v); both pairings share v.
    double measure(double epsilon, Vec2 q, double phi) const;
    MeasurementSet measure_all(double epsilon, int n_q) const;

    Transport const& transport() const { return transport_; }
    Solution const& adjoint() const { return v_; }
    //! Pairing of the unmodulated pair: the discrete Green-identity residual.
    double baseline() const { return base_; }

  private:
    Transport transport_;
    BoundarySource f_;
    BoundarySource g_;
    Solution v_;
    BoundaryTrace v_trace_;
    double base_ = 0;
};

double measure(Medium const& medium,
               DiscretizationPtr disc,
               BoundarySource const& f,
               BoundarySource const& g,
               double epsilon,
               Vec2 q,
               double phi,
               SolverOptions options = {});

struct InternalFunctionalField
{
    std::vector<double> values;  //!< lattice-indexed; zero outside X
    Route provenance = Route::oracle;
    std::string sources;

    double sup_norm(SpatialGrid const& grid) const;
};

//! Inverse transform of (M(q,0) - i M(q,pi/2)) / eps onto the lattice.
//! With hat masses given (as fractions of a cell), node values are divided
//! by them, undoing the partial cells along the boundary.
InternalFunctionalField recover_H_fourier(MeasurementSet const& m,
                                          SpatialGrid const& grid,
                                          std::optional<std::span<double const>> hat_masses = std::nullopt);

//! Forward transform used to synthesise measurements from a gridded H (cell-area weights).
MeasurementSet synthesize_measurements(std::span<double const> h, SpatialGrid const& grid, double epsilon);

//! H = sum over grid directions of (A u) v, at every inside node.
InternalFunctionalField oracle_H(Transport const& transport, Solution const& u, Solution const& v);
InternalFunctionalField oracle_H(Transport const& transport, BoundarySource const& f, BoundarySource const& g);

//! Sorted panel breaks covering [a, a + 2 pi): uniform panels refined
//! geometrically around the angular features and jumps of both fields at x.
std::vector<double> angular_breaks(TransportField const& u, TransportField const& v, Vec2 x);

//! H at an arbitrary point by panel quadrature in angle, refined on the
//! angular features of both fields.
double internal_functional_at(Transport const& transport,
                              TransportField const& u,
                              TransportField const& v,
                              Vec2 x);

//! L2(X) norm of a lattice field over inside nodes.
double l2_norm(std::span<double const> v, SpatialGrid const& grid);

struct StabilityReport
{
    double lhs = 0;  //!< sup |H1 - H2|
    double rhs = 0;  //!< |g|_L1 |A1_eps f - A2_eps f| + |f|_L1 |A1 g - A2 g|
    double ratio = 0;
};

StabilityReport stability_metric(InternalFunctionalField const& h1,
                                 InternalFunctionalField const& h2,
                                 SpatialGrid const& grid,
                                 BoundaryTrace const& albedo_f1,
                                 BoundaryTrace const& albedo_f2,
                                 BoundaryTrace const& albedo_g1,
                                 BoundaryTrace const& albedo_g2,
                                 double f_l1,
                                 double g_l1);

}  // namespace rte_aot

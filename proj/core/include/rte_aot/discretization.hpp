#pragma once

#include <memory>
#include <vector>

#include "rte_aot/geometry.hpp"

namespace rte_aot
{
//! Parallel rays for one direction, sampled uniformly from their inflow end.
//! A transport sweep runs a recurrence along each ray; lattice nodes read
//! their value from the two neighbouring rays.
struct RayLayout
{
    Vec2 theta;
    std::vector<int> start;        //!< first sample of each ray; size rays + 1
    std::vector<double> step;      //!< sample spacing per ray (0 for degenerate rays)
    std::vector<Vec2> entry;       //!< inflow end of each ray
    std::vector<Bilinear> stencil; //!< lattice stencil of each sample
    std::vector<int> out_sample;   //!< 4 samples per active node
    std::vector<double> out_weight;

    int rays() const { return static_cast<int>(entry.size()); }
    int samples() const { return static_cast<int>(stencil.size()); }
    Vec2 sample_point(int ray, int i) const { return entry[ray] + (i * step[ray]) * theta; }
};

//! Grids plus the medium-independent ray layouts shared by every solve on them.
class Discretization
{
  public:
    Discretization(Domain const& domain, int n_theta, int n_x, int n_b);

    Domain const& domain() const { return domain_; }
    Grids const& grids() const { return grids_; }
    DirectionGrid const& directions() const { return grids_.directions; }
    SpatialGrid const& spatial() const { return grids_.spatial; }
    BoundaryGrid const& boundary() const { return grids_.boundary; }
    RayLayout const& rays(int d) const { return rays_[d]; }

    int n_theta() const { return directions().size(); }
    std::size_t lattice_size() const { return spatial().lattice_size(); }
    //! Size of a direction-major field array.
    std::size_t field_size() const { return lattice_size() * n_theta(); }
    //! Hat masses of the lattice nodes over X (cached).
    std::vector<double> const& hat_masses() const { return hat_mass_; }

  private:
    Domain domain_;
    Grids grids_;
    std::vector<RayLayout> rays_;
    std::vector<double> hat_mass_;
};

using DiscretizationPtr = std::shared_ptr<Discretization const>;

DiscretizationPtr make_discretization(Domain const& domain, int n_theta, int n_x, int n_b);

}  // namespace rte_aot

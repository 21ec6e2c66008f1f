#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rte_aot/geometry.hpp"
#include "rte_aot/vec.hpp"

namespace rte_aot
{
//! amplitude * exp(-|x - center|^2 / width)
struct Bump
{
    Vec2 center;
    double amplitude = 0;
    double width = 1;
};

//! base + sum of gaussian bumps
class ScalarField
{
  public:
    ScalarField() = default;
    static ScalarField constant(double value);
    static ScalarField bumps(double base, std::vector<Bump> bumps);

    double operator()(Vec2 x) const
    {
        double v = base_;
        for (auto const& b : bumps_)
        {
            Vec2 d = x - b.center;
            v += b.amplitude * std::exp(-dot(d, d) / b.width);
        }
        return v;
    }

    bool is_constant() const { return bumps_.empty(); }
    double base() const { return base_; }
    std::vector<Bump> const& bump_list() const { return bumps_; }
    double sup() const;
    double inf() const;
    //! Smallest feature length (infinite for constants).
    double length_scale() const;

    ScalarField scaled(double s) const;
    ScalarField with_bump(Bump b) const;

  private:
    double base_ = 0;
    std::vector<Bump> bumps_;
};

enum class KernelKind
{
    isotropic,
    henyey_greenstein
};

//! k(x, theta, theta') = kappa(x) * p(angle(theta, theta')), with p normalized on S^1.
class ScatteringKernel
{
  public:
    ScatteringKernel() = default;
    static ScatteringKernel none();
    static ScatteringKernel isotropic(ScalarField kappa);
    static ScatteringKernel henyey_greenstein(ScalarField kappa, double g);

    KernelKind kind() const { return kind_; }
    double g() const { return g_; }
    ScalarField const& kappa_field() const { return kappa_; }
    bool is_zero() const { return kappa_.is_constant() && kappa_.base() == 0; }

    //! Angular profile as a function of cos(psi); integrates to 1 over S^1.
    double phase(double cos_psi) const
    {
        if (kind_ == KernelKind::isotropic)
            return 1 / (2 * std::numbers::pi);
        return (1 - g_ * g_) / (2 * std::numbers::pi * (1 + g_ * g_ - 2 * g_ * cos_psi));
    }
    //! First and second derivatives of the profile in psi.
    double phase_d1(double psi) const;
    double phase_d2(double psi) const;

    double operator()(Vec2 x, Vec2 theta, Vec2 theta_p) const
    {
        return kappa_(x) * phase(dot(theta, theta_p));
    }

  private:
    KernelKind kind_ = KernelKind::isotropic;
    ScalarField kappa_;
    double g_ = 0;
};

struct Modulation
{
    double epsilon = 0;
    Vec2 q;
    double phase = 0;

    double envelope(Vec2 x) const { return 1 + epsilon * std::cos(dot(q, x) + phase); }
};

class Medium
{
  public:
    Medium() = default;
    Medium(ScalarField sigma, ScatteringKernel kernel) : sigma_(std::move(sigma)), kernel_(std::move(kernel)) {}

    double sigma(Vec2 x) const { return mod_ ? mod_->envelope(x) * sigma_(x) : sigma_(x); }
    double kappa(Vec2 x) const
    {
        double k = kernel_.kappa_field()(x);
        return mod_ ? mod_->envelope(x) * k : k;
    }
    double k(Vec2 x, Vec2 theta, Vec2 theta_p) const { return kappa(x) * kernel_.phase(dot(theta, theta_p)); }

    ScalarField const& sigma_field() const { return sigma_; }
    ScatteringKernel const& kernel() const { return kernel_; }
    std::optional<Modulation> const& modulation() const { return mod_; }
    Medium unmodulated() const { return Medium(sigma_, kernel_); }

    //! Smallest length on which sigma varies (bumps, acoustic wavelength).
    double length_scale() const;
    bool constant_sigma() const { return sigma_.is_constant() && !mod_; }

    friend Medium modulate(Medium const&, Domain const&, double, Vec2, double);

  private:
    ScalarField sigma_;
    ScatteringKernel kernel_;
    std::optional<Modulation> mod_;
};

enum class Condition
{
    neither,
    absorption,
    smallness,
    both
};

std::string to_string(Condition c);

struct AdmissibilityReport
{
    double rho = 0;
    double tau = 0;
    double tau_rho = 0;
    double alpha = 0;
    Condition condition_met = Condition::neither;
    //! Upper bound on the sup-norm of K from sigma_inf and rho.
    double contraction_estimate = 0;
};

//! max over grid (x, theta) of the theta'-quadrature of |k|.
double rho(Medium const& medium, DirectionGrid const& dirs, SpatialGrid const& spatial);

//! Throws InadmissibleMedium naming the failed conditions when neither holds.
AdmissibilityReport check_admissibility(Medium const& medium, Domain const& domain, Grids const& grids);

//! Report without throwing.
AdmissibilityReport admissibility(Medium const& medium, Domain const& domain, Grids const& grids);

enum class Orientation
{
    backward,  //!< integral of sigma(x - s theta), s in [0, t]
    forward    //!< integral of sigma(x + s theta)
};

double optical_depth(Medium const& medium,
                     Domain const& domain,
                     Vec2 x,
                     Vec2 theta,
                     double t,
                     Orientation orientation);

//! Panel Gauss-Legendre line integral of any field along x + s dir, s in [0, t].
template<class F>
double line_integral(F const& f, Vec2 x, Vec2 dir, double t, double panel);

//! Scale sigma and k by 1 + eps cos(q.x + phi); checks (1+eps) tau rho < 1 or absorption.
Medium modulate(Medium const& medium, Domain const& domain, double epsilon, Vec2 q, double phi);

}  // namespace rte_aot

#include "rte_aot/quadrature.hpp"

namespace rte_aot
{
template<class F>
double line_integral(F const& f, Vec2 x, Vec2 dir, double t, double panel)
{
    if (t <= 0)
        return 0;
    auto const& rule = gauss_legendre(8);
    int n = std::max(1, static_cast<int>(std::ceil(t / panel)));
    double h = t / n;
    double sum = 0;
    for (int p = 0; p < n; ++p)
    {
        double mid = (p + 0.5) * h;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k)
            sum += rule.weights[k] * f(x + (mid + 0.5 * h * rule.nodes[k]) * dir);
    }
    return 0.5 * h * sum;
}
}  // namespace rte_aot

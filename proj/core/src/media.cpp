#include "rte_aot/media.hpp"

#include <cstdio>
#include <limits>

#include "rte_aot/errors.hpp"

namespace rte_aot
{
namespace
{
std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}
}  // namespace

ScalarField ScalarField::constant(double value)
{
    ScalarField f;
    f.base_ = value;
    return f;
}

ScalarField ScalarField::bumps(double base, std::vector<Bump> bumps)
{
    for (auto const& b : bumps)
        if (!(b.width > 0))
            throw ArgumentError("bump width must be positive");
    ScalarField f;
    f.base_ = base;
    f.bumps_ = std::move(bumps);
    return f;
}

double ScalarField::sup() const
{
    double v = base_;
    for (auto const& b : bumps_)
        v += std::max(b.amplitude, 0.0);
    return v;
}

double ScalarField::inf() const
{
    double v = base_;
    for (auto const& b : bumps_)
        v += std::min(b.amplitude, 0.0);
    return v;
}

double ScalarField::length_scale() const
{
    double l = std::numeric_limits<double>::infinity();
    for (auto const& b : bumps_)
        l = std::min(l, std::sqrt(b.width));
    return l;
}

ScalarField ScalarField::scaled(double s) const
{
    ScalarField f = *this;
    f.base_ *= s;
    for (auto& b : f.bumps_)
        b.amplitude *= s;
    return f;
}

ScalarField ScalarField::with_bump(Bump b) const
{
    if (!(b.width > 0))
        throw ArgumentError("bump width must be positive");
    ScalarField f = *this;
    f.bumps_.push_back(b);
    return f;
}

ScatteringKernel ScatteringKernel::none() { return isotropic(ScalarField::constant(0)); }

ScatteringKernel ScatteringKernel::isotropic(ScalarField kappa)
{
    ScatteringKernel k;
    k.kind_ = KernelKind::isotropic;
    k.kappa_ = std::move(kappa);
    return k;
}

ScatteringKernel ScatteringKernel::henyey_greenstein(ScalarField kappa, double g)
{
    if (!(g > -1 && g < 1))
        throw ArgumentError("Henyey-Greenstein asymmetry must lie in (-1, 1)");
    ScatteringKernel k;
    k.kind_ = KernelKind::henyey_greenstein;
    k.kappa_ = std::move(kappa);
    k.g_ = g;
    return k;
}

double ScatteringKernel::phase_d1(double psi) const
{
    if (kind_ == KernelKind::isotropic)
        return 0;
    double c = (1 - g_ * g_) / (2 * std::numbers::pi);
    double d = 1 + g_ * g_ - 2 * g_ * std::cos(psi);
    return -2 * c * g_ * std::sin(psi) / (d * d);
}

double ScatteringKernel::phase_d2(double psi) const
{
    if (kind_ == KernelKind::isotropic)
        return 0;
    double c = (1 - g_ * g_) / (2 * std::numbers::pi);
    double d = 1 + g_ * g_ - 2 * g_ * std::cos(psi);
    double s = std::sin(psi);
    return -2 * c * g_ * std::cos(psi) / (d * d) + 8 * c * g_ * g_ * s * s / (d * d * d);
}

double Medium::length_scale() const
{
    double l = sigma_.length_scale();
    if (mod_)
    {
        double qn = norm(mod_->q);
        if (qn > 0)
            l = std::min(l, 2 * std::numbers::pi / qn);
    }
    return l;
}

std::string to_string(Condition c)
{
    switch (c)
    {
        case Condition::absorption: return "absorption";
        case Condition::smallness: return "smallness";
        case Condition::both: return "both";
        default: return "neither";
    }
}

double rho(Medium const& medium, DirectionGrid const& dirs, SpatialGrid const& spatial)
{
    auto const& kernel = medium.kernel();
    if (kernel.is_zero())
        return 0;
    // k factorizes as kappa(x) p(theta . theta'), so the theta' sum is shared by all x
    double ang = 0;
    for (int i = 0; i < dirs.size(); ++i)
    {
        double s = 0;
        for (int j = 0; j < dirs.size(); ++j)
            s += std::abs(kernel.phase(dot(dirs.direction(i), dirs.direction(j)))) * dirs.weight();
        ang = std::max(ang, s);
    }
    double kmax = 0;
    for (int idx : spatial.inside_nodes())
        kmax = std::max(kmax, std::abs(medium.kappa(spatial.node(idx))));
    return kmax * ang;
}

AdmissibilityReport admissibility(Medium const& medium, Domain const& domain, Grids const& grids)
{
    AdmissibilityReport r;
    r.rho = rho(medium, grids.directions, grids.spatial);
    r.tau = domain.diameter();
    r.tau_rho = r.tau * r.rho;
    double sigma_inf = std::numeric_limits<double>::infinity();
    for (int idx : grids.spatial.inside_nodes())
        sigma_inf = std::min(sigma_inf, medium.sigma(grids.spatial.node(idx)));
    r.alpha = sigma_inf - r.rho;
    bool absorb = r.alpha > 0;
    bool small = r.tau_rho < 1;
    r.condition_met = absorb && small ? Condition::both
                      : absorb        ? Condition::absorption
                      : small         ? Condition::smallness
                                      : Condition::neither;
    r.contraction_estimate = sigma_inf > 0 ? r.rho * (1 - std::exp(-sigma_inf * r.tau)) / sigma_inf
                                           : r.tau_rho;
    return r;
}

AdmissibilityReport check_admissibility(Medium const& medium, Domain const& domain, Grids const& grids)
{
    auto r = admissibility(medium, domain, grids);
    if (r.condition_met == Condition::neither)
    {
        throw InadmissibleMedium("inadmissible medium: absorption condition fails (inf(sigma - rho) = "
                                 + num(r.alpha) + " <= 0); smallness condition fails (tau*rho = "
                                 + num(r.tau_rho) + " >= 1)");
    }
    return r;
}

double optical_depth(Medium const& medium, Domain const& domain, Vec2 x, Vec2 theta, double t, Orientation o)
{
    Vec2 dir = o == Orientation::backward ? -theta : theta;
    double reach = exit_time(domain, x, dir, Side::plus);
    if (t < 0 || t > reach + 1e-9)
        throw ArgumentError("optical depth length outside the chord");
    if (medium.constant_sigma())
        return medium.sigma_field().base() * t;
    double panel = std::min(0.25, 0.5 * medium.length_scale());
    return line_integral([&](Vec2 p) { return medium.sigma(p); }, x, dir, t, panel);
}

Medium modulate(Medium const& medium, Domain const& domain, double epsilon, Vec2 q, double phi)
{
    if (medium.modulation())
        throw ArgumentError("medium is already modulated");
    if (!(epsilon >= 0 && epsilon <= 0.2))
        throw ArgumentError("modulation amplitude must satisfy 0 <= eps <= 0.2");
    double rho0 = medium.kernel().kappa_field().sup();
    double tau = domain.diameter();
    bool small = (1 + epsilon) * tau * rho0 < 1;
    bool absorb = (1 - epsilon) * medium.sigma_field().inf() - (1 + epsilon) * rho0 > 0;
    if (!small && !absorb)
    {
        throw InadmissibleMedium("modulated medium inadmissible: smallness condition fails ((1+eps)*tau*rho = "
                                 + num((1 + epsilon) * tau * rho0)
                                 + " >= 1) and absorption condition fails");
    }
    Medium m = medium;
    m.mod_ = Modulation{epsilon, q, phi};
    return m;
}

}  // namespace rte_aot

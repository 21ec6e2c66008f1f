// First collision of an oscillatory boundary source.
//
// A2 J g (z, theta) only sees J g through the narrow source arc, so with
// alpha = angle(theta) - center and p the angular profile,
//   A2 J g = kappa(z) [p(alpha) b0(z) - p'(alpha) b1(z) + p''(alpha) b2(z) / 2],
//   b_m(z) = integral over the arc of delta^m J g(z, center + delta).
// The moments are tabulated on a lattice fine enough to resolve the boundary
// stripes; each moment integral is split where the stripe seen from z flips.

#include <algorithm>
#include <cmath>

#include "rte_aot/errors.hpp"
#include "rte_aot/parallel.hpp"
#include "rte_aot/quadrature.hpp"
#include "transport_state.hpp"

namespace rte_aot::detail
{
namespace
{
class OscillatoryCollision final : public FieldPart
{
  public:
    OscillatoryCollision(StatePtr s, BoundarySource const& g);

    double value(Vec2 x, Vec2 theta) const override { return chord(x, theta, period_ / 16); }
    double coarse_value(Vec2 x, Vec2 theta) const { return chord(x, theta, period_ / 4); }

    std::vector<AngularWindow> features() const override
    {
        return {{center_, std::sqrt(period_)}, {center_, period_}, {center_, half_width_}};
    }

  private:
    double chord(Vec2 x, Vec2 theta, double max_step) const;
    double depth_back(Vec2 z, double delta) const;
    double table(std::vector<double> const& t, Vec2 z) const;

    StatePtr s_;
    double center_ = 0;
    double half_width_ = 0;
    double amplitude_ = 0;
    OscillationFrame frame_;
    double period_ = 0;
    bool uniform_ = false;
    bool isotropic_ = true;

    // coarse depth tables at delta = -w, 0, w
    std::vector<double> depth_tab_[3];

    Vec2 lo_;
    double hf_ = 0;
    int nf_ = 0;
    std::vector<double> beta_[3];
};

OscillatoryCollision::OscillatoryCollision(StatePtr s, BoundarySource const& g) : s_(std::move(s))
{
    if (g.kind() != BoundarySource::Kind::oscillatory || g.side() != BoundarySide::inflow)
        throw ArgumentError("oscillatory collision needs an inflow oscillatory source");
    center_ = g.window()->center;
    half_width_ = g.window()->half_width;
    amplitude_ = g.amplitude();
    frame_ = *g.frame();
    period_ = frame_.period;
    uniform_ = s_->envelope.empty() && s_->medium.sigma_field().is_constant();
    isotropic_ = s_->medium.kernel().kind() == KernelKind::isotropic;

    auto const& domain = s_->domain();
    auto const& sg = s_->disc->spatial();
    if (!uniform_)
    {
        for (int k = 0; k < 3; ++k)
        {
            Vec2 th = unit(center_ + (k - 1) * half_width_);
            auto& tab = depth_tab_[k];
            tab.assign(sg.lattice_size(), 0.0);
            auto active = sg.active_nodes();
            parallel_for(active.size(), [&](std::size_t i) {
                Vec2 y = sg.eval_point(active[i]);
                tab[active[i]] = s_->depth(y, -th, domain.exit_distance(y, -th));
            });
        }
    }

    Vec2 extent = domain.hi() - domain.lo();
    double span = std::max(extent.x, extent.y);
    hf_ = std::max(period_ / 8, span / 1600);
    nf_ = static_cast<int>(std::ceil(span / hf_)) + 1;
    lo_ = domain.lo();
    int moments = isotropic_ ? 1 : 3;
    for (int m = 0; m < moments; ++m)
        beta_[m].assign(static_cast<std::size_t>(nf_) * nf_, 0.0);

    auto const& gl = gauss_legendre(4);
    double reach = 2 * hf_;
    parallel_for(static_cast<std::size_t>(nf_), [&](std::size_t row) {
        std::vector<double> cuts;
        for (int i = 0; i < nf_; ++i)
        {
            Vec2 z{lo_.x + i * hf_, lo_.y + static_cast<double>(row) * hf_};
            double dist = domain.inner_distance(z);
            if (dist < -reach)
                continue;
            Vec2 ze = dist >= 0 ? z : domain.project(z);

            cuts.clear();
            cuts.push_back(center_ - half_width_);
            sign_breaks(domain, ze, {center_, half_width_}, frame_, BoundarySide::inflow, cuts);
            for (std::size_t c = 1; c < cuts.size(); ++c)
                cuts[c] = center_ + angle_diff(cuts[c], center_);
            cuts.push_back(center_ + half_width_);
            std::sort(cuts.begin(), cuts.end());

            double b[3] = {0, 0, 0};
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
            {
                double a0 = cuts[c], a1 = cuts[c + 1];
                if (a1 <= a0)
                    continue;
                Vec2 th_mid = unit(0.5 * (a0 + a1));
                double t_mid = domain.exit_distance(ze, -th_mid);
                double sgn = frame_.sign(ze - t_mid * th_mid);
                for (std::size_t q = 0; q < gl.nodes.size(); ++q)
                {
                    double a = 0.5 * (a0 + a1) + 0.5 * (a1 - a0) * gl.nodes[q];
                    double delta = a - center_;
                    double w = 0.5 * (a1 - a0) * gl.weights[q] * sgn * std::exp(-depth_back(ze, delta));
                    b[0] += w;
                    b[1] += w * delta;
                    b[2] += w * delta * delta;
                }
            }
            std::size_t idx = row * nf_ + i;
            for (int m = 0; m < moments; ++m)
                beta_[m][idx] = amplitude_ * b[m];
        }
    });
}

double OscillatoryCollision::depth_back(Vec2 z, double delta) const
{
    if (uniform_)
    {
        Vec2 th = unit(center_ + delta);
        return s_->medium.sigma_field().base() * s_->domain().exit_distance(z, -th);
    }
    auto const& sg = s_->disc->spatial();
    double dm = sg.interpolate(depth_tab_[0], z);
    double d0 = sg.interpolate(depth_tab_[1], z);
    double dp = sg.interpolate(depth_tab_[2], z);
    double u = delta / half_width_;
    return d0 + 0.5 * u * (dp - dm) + 0.5 * u * u * (dp - 2 * d0 + dm);
}

double OscillatoryCollision::table(std::vector<double> const& t, Vec2 z) const
{
    double gx = (z.x - lo_.x) / hf_;
    double gy = (z.y - lo_.y) / hf_;
    int i = std::clamp(static_cast<int>(std::floor(gx)), 0, nf_ - 2);
    int j = std::clamp(static_cast<int>(std::floor(gy)), 0, nf_ - 2);
    double fx = std::clamp(gx - i, 0.0, 1.0);
    double fy = std::clamp(gy - j, 0.0, 1.0);
    double const* a = t.data() + static_cast<std::size_t>(j) * nf_ + i;
    return (1 - fy) * ((1 - fx) * a[0] + fx * a[1]) + fy * ((1 - fx) * a[nf_] + fx * a[nf_ + 1]);
}

double OscillatoryCollision::chord(Vec2 x, Vec2 theta, double max_step) const
{
    double len = s_->domain().exit_distance(x, -theta);
    if (len <= 0)
        return 0;
    auto const& kernel = s_->medium.kernel();
    double alpha = angle_diff(angle_of(theta), center_);
    double p0 = kernel.phase(std::cos(alpha));
    double p1 = isotropic_ ? 0 : kernel.phase_d1(alpha);
    double p2 = isotropic_ ? 0 : kernel.phase_d2(alpha);

    int n = std::max(1, static_cast<int>(std::ceil(len / max_step)));
    double ds = len / n;
    double sigma0 = s_->medium.sigma_field().base();
    double depth = 0;
    double sig_prev = uniform_ ? sigma0 : s_->sigma(x);
    double sum = 0;
    for (int i = 0; i <= n; ++i)
    {
        Vec2 z = x - (i * ds) * theta;
        if (i > 0)
        {
            double sig = uniform_ ? sigma0 : s_->sigma(z);
            depth += 0.5 * ds * (sig_prev + sig);
            sig_prev = sig;
        }
        double a2 = p0 * table(beta_[0], z);
        if (!isotropic_)
            a2 += -p1 * table(beta_[1], z) + 0.5 * p2 * table(beta_[2], z);
        double wt = (i == 0 || i == n) ? 0.5 * ds : ds;
        sum += wt * std::exp(-depth) * s_->kappa(z) * a2;
    }
    return sum;
}

}  // namespace

FieldPartPtr make_oscillatory_collision(StatePtr s, BoundarySource const& g)
{
    return std::make_shared<OscillatoryCollision>(std::move(s), g);
}

std::vector<double> oscillatory_collision_grid(FieldPart const& part, Discretization const& disc)
{
    auto const* osc = dynamic_cast<OscillatoryCollision const*>(&part);
    if (!osc)
        throw ArgumentError("not an oscillatory collision part");
    std::size_t lat = disc.lattice_size();
    std::vector<double> out(disc.field_size(), 0.0);
    auto active = disc.spatial().active_nodes();
    parallel_for(active.size(), [&](std::size_t k) {
        int node = active[k];
        Vec2 y = disc.spatial().eval_point(node);
        for (int d = 0; d < disc.n_theta(); ++d)
            out[d * lat + node] = osc->coarse_value(y, disc.directions().direction(d));
    });
    return out;
}

}  // namespace rte_aot::detail

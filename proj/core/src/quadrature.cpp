#include "rte_aot/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "rte_aot/errors.hpp"

namespace rte_aot
{
namespace
{
template<int N>
GaussRule make_rule()
{
    using G = boost::math::quadrature::gauss<double, N>;
    auto const& x = G::abscissa();
    auto const& w = G::weights();
    GaussRule r;
    // boost stores the non-negative half of the symmetric rule
    for (std::size_t i = x.size(); i-- > 0;)
    {
        if (x[i] == 0)
            continue;
        r.nodes.push_back(-x[i]);
        r.weights.push_back(w[i]);
    }
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        r.nodes.push_back(x[i]);
        r.weights.push_back(w[i]);
    }
    return r;
}
}  // namespace

GaussRule const& gauss_legendre(int order)
{
    static GaussRule const r2 = make_rule<2>();
    static GaussRule const r3 = make_rule<3>();
    static GaussRule const r4 = make_rule<4>();
    static GaussRule const r8 = make_rule<8>();
    static GaussRule const r16 = make_rule<16>();
    switch (order)
    {
        case 2: return r2;
        case 3: return r3;
        case 4: return r4;
        case 8: return r8;
        case 16: return r16;
        default: throw ArgumentError("unsupported Gauss-Legendre order " + std::to_string(order));
    }
}

double loglog_slope(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw ArgumentError("loglog_slope needs two or more matching samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        double lx = std::log(x[i]);
        double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace rte_aot

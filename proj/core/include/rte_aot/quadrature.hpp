#pragma once

#include <span>
#include <vector>

namespace rte_aot
{
//! Gauss-Legendre rule on [-1, 1].
struct GaussRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

//! Supported orders: 2, 3, 4, 8, 16.
GaussRule const& gauss_legendre(int order);

//! Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<double const> x, std::span<double const> y);

}  // namespace rte_aot

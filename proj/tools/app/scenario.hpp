#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <rte_aot/recon.hpp>

namespace rte_aot::app
{
//! Bad or inadmissible scenario; maps to exit code 2.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! File system failure; maps to exit code 4.
class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr int max_n_theta = 1024;
inline constexpr int max_n_x = 512;

struct GridSpec
{
    int n_theta = 64;
    int n_x = 96;
    int n_b = 0;       //!< 0: four per spatial cell along the perimeter
    int n_q = 32;      //!< frequency grid per axis; the fourier route runs on an n_q lattice
    int n_theta_q = 0; //!< directions for the fourier route; 0: n_theta
};

struct Scenario
{
    std::string name;
    Domain domain = Domain::disk({0, 0}, 1);
    Medium medium;
    GridSpec grid;
    SolverOptions solver;

    double epsilon = 0.05;
    std::vector<double> h{0.08, 0.04, 0.02};
    std::vector<double> epsilons{0.1, 0.05, 0.025};
    std::vector<double> deltas{0.02, 0.04};
    double theta0 = 0.3;
    double theta1 = 0.7;
    Vec2 fixed_point{0.1, -0.2};
    std::vector<Vec2> eval_points;
    std::vector<KernelSample> kernel_samples;
    std::vector<std::string> studies{"ballistic", "oscillatory", "sigma", "kernel", "epsilon", "stability"};
    std::uint64_t seed = 1;

    std::optional<std::filesystem::path> out_dir;

    int n_b() const;
};

//! Parses and validates; every failure raises ConfigError naming the cause.
Scenario parse_scenario(std::filesystem::path const& path);
Scenario parse_scenario_text(std::string const& text, std::string const& source_name = "<string>");

//! The smooth measurement pair: f = 1 + cos(theta - 0.4) / 2 on the inflow side,
//! g = 1 + 0.3 sin(2 theta) + 0.2 b_y on the outflow side.
BoundarySource measurement_f();
BoundarySource measurement_g();

}  // namespace rte_aot::app

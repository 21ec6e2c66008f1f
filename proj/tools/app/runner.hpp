#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <rte_aot/recon.hpp>

namespace rte_aot::app
{
enum ExitCode
{
    exit_ok = 0,
    exit_config = 2,
    exit_numerical = 3,
    exit_io = 4
};

inline std::vector<std::string> const subcommands{
    "forward", "albedo", "measure", "recover-h", "recover-sigma", "recover-k", "study", "check"};

struct RunOptions
{
    std::string subcommand;
    std::filesystem::path scenario;
    std::optional<std::filesystem::path> out_dir;
    std::optional<unsigned> threads;
    Route route = Route::oracle;
};

//! Runs one subcommand, writing CSVs and manifest.json; returns the exit code.
int run(RunOptions const& opts);

//! Smooth lattice field sum of a few random plane waves in (x, theta).
std::vector<double> random_smooth_field(Discretization const& disc, std::mt19937_64& rng);

//! Volume-and-angle inner product over inside nodes.
double field_inner(Discretization const& disc, std::span<double const> a, std::span<double const> b);

}  // namespace rte_aot::app

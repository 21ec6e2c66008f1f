#include <CLI11.hpp>

#include <iostream>

#include "app/runner.hpp"

int main(int argc, char** argv)
{
    using namespace rte_aot::app;
    CLI::App cli{"rte-aot: forward transport, albedo measurements and coefficient recovery"};
    RunOptions opts;
    std::string out, route = "oracle";
    unsigned threads = 0;
    cli.add_option("subcommand", opts.subcommand, "forward|albedo|measure|recover-h|recover-sigma|recover-k|study|check")
        ->required()
        ->check(CLI::IsMember(subcommands));
    cli.add_option("--scenario", opts.scenario, "scenario TOML file")->required();
    auto* out_opt = cli.add_option("--out", out, "output directory");
    auto* thr_opt = cli.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
    cli.add_option("--route", route, "oracle|fourier")->check(CLI::IsMember({"oracle", "fourier"}));
    try
    {
        cli.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int rc = cli.exit(e);
        return rc == 0 ? 0 : exit_config;
    }
    if (*out_opt)
        opts.out_dir = out;
    if (*thr_opt)
        opts.threads = threads;
    opts.route = route == "fourier" ? rte_aot::Route::fourier : rte_aot::Route::oracle;
    return run(opts);
}

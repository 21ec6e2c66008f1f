#include "runner.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include <nlohmann/json.hpp>

#include <rte_aot/errors.hpp>
#include <rte_aot/parallel.hpp>

#include "output.hpp"
#include "scenario.hpp"

namespace rte_aot::app
{
namespace
{
using nlohmann::json;
namespace fs = std::filesystem;

constexpr char const* version = "0.1.0";

json diagnostics_json(SolveDiagnostics const& d)
{
    return {{"terms_used", d.terms_used},
            {"contraction_observed", d.contraction_observed},
            {"tail_bound", d.tail_bound},
            {"first_collision_norm", d.first_collision_norm},
            {"jmax_warning", d.jmax_warning}};
}

json table_json(StudyTable const& t)
{
    json rows = json::array();
    for (auto const& r : t.rows)
        rows.push_back({r.param, r.error, r.ratio, r.order});
    return {{"name", t.name}, {"rows", rows}};
}

void write_table(fs::path const& dir, StudyTable const& t)
{
    CsvWriter csv(dir / ("study_" + t.name + ".csv"), {"param", "error", "ratio", "order"});
    for (auto const& r : t.rows)
        csv.row({r.param, r.error, r.ratio, r.order});
    csv.close();
}

void write_h_field(fs::path const& path, InternalFunctionalField const& h, SpatialGrid const& grid)
{
    CsvWriter csv(path, {"x1", "x2", "H"});
    for (int idx : grid.inside_nodes())
    {
        Vec2 x = grid.node(idx);
        csv.row({x.x, x.y, h.values[idx]});
    }
    csv.close();
}

double min_h(Scenario const& s) { return *std::min_element(s.h.begin(), s.h.end()); }

struct Context
{
    Scenario const& sc;
    RunOptions const& opts;
    fs::path out;
    StageClock& clock;
    json& diag;

    DiscretizationPtr main_disc() const
    {
        clock.start("discretize");
        auto d = make_discretization(sc.domain, sc.grid.n_theta, sc.grid.n_x, sc.n_b());
        clock.stop();
        return d;
    }
    DiscretizationPtr q_disc() const
    {
        clock.start("discretize_q");
        int nt = sc.grid.n_theta_q > 0 ? sc.grid.n_theta_q : sc.grid.n_theta;
        auto d = make_discretization(sc.domain, nt, sc.grid.n_q, 4 * sc.grid.n_q);
        clock.stop();
        return d;
    }
    StudySetup setup(DiscretizationPtr disc) const
    {
        StudySetup s;
        s.medium = sc.medium;
        s.disc = std::move(disc);
        s.options = sc.solver;
        s.theta0 = sc.theta0;
        s.theta1 = sc.theta1;
        s.fixed_point = sc.fixed_point;
        s.eval_points = sc.eval_points;
        s.kernel_samples = sc.kernel_samples;
        s.f = measurement_f();
        s.g = measurement_g();
        return s;
    }
};

void run_forward(Context& c)
{
    auto disc = c.main_disc();
    Transport tr(c.sc.medium, disc, c.sc.solver);
    c.clock.start("solve");
    Solution u = tr.solve_forward(measurement_f());
    c.clock.start("write");
    auto vals = tr.node_values(u.field);
    std::size_t lat = disc->lattice_size();
    CsvWriter csv(c.out / "u_field.csv", {"x1", "x2", "theta", "u"});
    for (int idx : disc->spatial().inside_nodes())
        for (int d = 0; d < disc->n_theta(); ++d)
        {
            Vec2 x = disc->spatial().node(idx);
            csv.row({x.x, x.y, disc->directions().angle(d), vals[d * lat + idx]});
        }
    csv.close();
    c.clock.stop();
    c.diag["solve"] = diagnostics_json(u.diagnostics);
    c.diag["sup_norm"] = u.field.sup_norm();
}

void run_albedo(Context& c)
{
    auto disc = c.main_disc();
    Transport tr(c.sc.medium, disc, c.sc.solver);
    c.clock.start("solve");
    Solution u = tr.solve_forward(measurement_f());
    BoundaryTrace t = tr.trace(u);
    c.clock.start("write");
    auto const& bg = disc->boundary();
    CsvWriter csv(c.out / "albedo.csv", {"x1", "x2", "theta", "value"});
    for (int b = 0; b < t.n_b; ++b)
        for (int d = 0; d < t.n_theta; ++d)
            if (dot(bg.normals[b], disc->directions().direction(d)) > tol_tangent)
                csv.row({bg.points[b].x, bg.points[b].y, disc->directions().angle(d), t.at(b, d)});
    csv.close();
    c.clock.stop();
    c.diag["solve"] = diagnostics_json(u.diagnostics);
}

MeasurementSet measure_set(Context& c, Measurer const& m)
{
    c.clock.start("measure");
    auto set = m.measure_all(c.sc.epsilon, c.sc.grid.n_q);
    set.sources = "f=1+cos(theta-0.4)/2;g=1+0.3sin(2theta)+0.2b_y";
    c.clock.stop();
    c.diag["green_residual"] = m.baseline();
    c.diag["epsilon"] = c.sc.epsilon;
    c.diag["entries"] = set.entries.size();
    return set;
}

void run_measure(Context& c)
{
    auto disc = c.q_disc();
    c.clock.start("adjoint");
    Measurer m(c.sc.medium, disc, measurement_f(), measurement_g(), c.sc.solver);
    auto set = measure_set(c, m);
    c.clock.start("write");
    CsvWriter csv(c.out / "measurements.csv", {"q1", "q2", "phi", "epsilon", "M"});
    for (auto const& e : set.entries)
        csv.row({e.q.x, e.q.y, e.phi, set.epsilon, e.value});
    csv.close();
    c.clock.stop();
}

void run_recover_h(Context& c)
{
    auto disc = c.q_disc();
    c.clock.start("adjoint");
    Measurer m(c.sc.medium, disc, measurement_f(), measurement_g(), c.sc.solver);
    auto set = measure_set(c, m);
    c.clock.start("recover");
    auto const& grid = disc->spatial();
    auto hf = recover_H_fourier(set, grid, disc->hat_masses());
    auto const& t = m.transport();
    auto ho = oracle_H(t, t.solve_forward(measurement_f()), m.adjoint());
    std::vector<double> diff(hf.values.size());
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = hf.values[i] - ho.values[i];
    double ref = l2_norm(ho.values, grid);
    c.clock.start("write");
    write_h_field(c.out / "h_field_oracle.csv", ho, grid);
    write_h_field(c.out / "h_field_fourier.csv", hf, grid);
    c.clock.stop();
    c.diag["l2_difference"] = l2_norm(diff, grid);
    c.diag["relative_l2_difference"] = ref > 0 ? l2_norm(diff, grid) / ref : 0.0;
    c.diag["sup_oracle"] = ho.sup_norm(grid);
    c.diag["sup_fourier"] = hf.sup_norm(grid);
}

void run_recover_sigma(Context& c)
{
    auto disc = c.opts.route == Route::fourier ? c.q_disc() : c.main_disc();
    Transport tr(c.sc.medium, disc, c.sc.solver);
    double h = min_h(c.sc);
    c.clock.start("recover");
    auto rec = recover_sigma(tr, c.sc.theta0, h, c.sc.eval_points, c.opts.route, c.sc.epsilon);
    c.clock.start("write");
    CsvWriter csv(c.out / "sigma.csv", {"x1", "x2", "sigma_true", "sigma_hat", "rel_err"});
    double worst = 0;
    json pts = json::array();
    for (auto const& p : rec.points)
    {
        double truth = c.sc.medium.sigma(p.x);
        double err = std::abs(p.sigma_hat - truth) / truth;
        worst = std::max(worst, err);
        csv.row({p.x.x, p.x.y, truth, p.sigma_hat, err});
        pts.push_back({{"x", {p.x.x, p.x.y}}, {"numerator", p.numerator}, {"denominator", p.denominator}});
    }
    csv.close();
    c.clock.stop();
    c.diag["h"] = h;
    c.diag["route"] = to_string(c.opts.route);
    c.diag["max_rel_err"] = worst;
    c.diag["points"] = pts;
    c.diag["rejected"] = rec.rejected.size();
}

void run_recover_k(Context& c)
{
    if (c.opts.route == Route::fourier)
        throw ConfigError("kernel recovery supports the oracle route only");
    auto disc = c.main_disc();
    Transport tr(c.sc.medium, disc, c.sc.solver);
    double h = min_h(c.sc);
    c.clock.start("recover");
    auto rec = recover_k(tr, c.sc.medium.sigma_field(), c.sc.kernel_samples, h);
    c.clock.start("write");
    CsvWriter csv(c.out / "kernel.csv", {"x1", "x2", "theta1", "theta2", "k_true", "k_hat", "rel_err"});
    double worst = 0;
    for (auto const& p : rec.points)
    {
        auto const& s = p.sample;
        double truth = c.sc.medium.k(s.x, unit(s.theta2), unit(s.theta1));
        double err = truth != 0 ? std::abs(p.k_hat - truth) / truth : std::abs(p.k_hat);
        worst = std::max(worst, err);
        csv.row({s.x.x, s.x.y, s.theta1, s.theta2, truth, p.k_hat, err});
    }
    csv.close();
    c.clock.stop();
    c.diag["h"] = h;
    c.diag["max_rel_err"] = worst;
}

void run_study(Context& c)
{
    auto disc = c.main_disc();
    json tables = json::array();
    auto emit = [&](std::vector<StudyTable> const& ts) {
        for (auto const& t : ts)
        {
            write_table(c.out, t);
            tables.push_back(table_json(t));
        }
    };
    for (auto const& name : c.sc.studies)
    {
        spdlog::info("study {}", name);
        c.clock.start("study_" + name);
        if (name == "ballistic")
            emit(run_convergence_study(StudyKind::ballistic, c.sc.h, c.setup(disc)));
        else if (name == "oscillatory")
            emit(run_convergence_study(StudyKind::oscillatory, c.sc.h, c.setup(disc)));
        else if (name == "sigma")
            emit(run_convergence_study(StudyKind::sigma, c.sc.h, c.setup(disc)));
        else if (name == "kernel")
            emit(run_convergence_study(StudyKind::kernel, c.sc.h, c.setup(disc)));
        else if (name == "epsilon")
        {
            auto st = epsilon_study(c.setup(c.q_disc()), c.sc.epsilons);
            emit({make_table("epsilon", st.epsilons, st.eps_part), make_table("epsilon_raw", st.epsilons, st.raw)});
            c.diag["epsilon_floor"] = st.floor;
            c.diag["epsilon_slope"] = st.slope;
        }
        else if (name == "stability")
        {
            auto st = run_stability_study(c.setup(disc), c.sc.deltas, min_h(c.sc));
            emit(st.tables());
        }
        c.clock.stop();
    }
    c.diag["tables"] = tables;
}

void run_check(Context& c, int& code)
{
    auto disc = c.main_disc();
    c.clock.start("admissibility");
    auto rep = admissibility(c.sc.medium, c.sc.domain, disc->grids());
    c.diag["admissibility"] = {{"rho", rep.rho},
                               {"tau", rep.tau},
                               {"tau_rho", rep.tau_rho},
                               {"alpha", rep.alpha},
                               {"condition_met", to_string(rep.condition_met)},
                               {"contraction_estimate", rep.contraction_estimate}};
    Transport tr(c.sc.medium, disc, c.sc.solver);

    c.clock.start("forward");
    Solution u = tr.solve_forward(measurement_f());
    Solution v = tr.solve_adjoint(measurement_g());
    c.diag["solve"] = diagnostics_json(u.diagnostics);

    c.clock.start("green_identity");
    double pairing = boundary_pairing(tr.trace(u), tr.trace(v), disc->boundary(), disc->directions());
    double green = std::abs(pairing) / (u.field.sup_norm() * v.field.sup_norm());

    c.clock.start("duality");
    std::mt19937_64 rng(c.sc.seed);
    auto a = random_smooth_field(*disc, rng);
    auto b = random_smooth_field(*disc, rng);
    auto aa = tr.apply_A(TransportField(disc, a));
    auto ab = tr.apply_A(TransportField(disc, b));
    double dual = std::abs(field_inner(*disc, aa.grid(), b) - field_inner(*disc, a, ab.grid()))
                  / std::sqrt(field_inner(*disc, a, a) * field_inner(*disc, b, b));
    c.clock.stop();

    double h = min_h(c.sc);
    auto fh = make_f_h(c.sc.theta0, h);
    double l1 = fh.angular_l1();
    double sq = 2 * h * fh.amplitude() * fh.amplitude();

    json checks = json::array();
    bool ok = true;
    auto add = [&](std::string name, double value, double limit, bool pass) {
        checks.push_back({{"name", name}, {"value", value}, {"limit", limit}, {"pass", pass}});
        if (!pass)
            spdlog::error("check {} failed: {} (limit {})", name, value, limit);
        ok = ok && pass;
    };
    auto const& d = u.diagnostics;
    add("contraction_observed", d.contraction_observed, 1.0, d.contraction_observed < 1);
    add("tail_bound", d.tail_bound, 1e-6, d.tail_bound < 1e-6);
    add("green_identity", green, 5e-4, green <= 5e-4);
    add("duality", dual, 1e-6, dual <= 1e-6);
    add("f_h_l1", std::abs(l1 - 2 * std::sqrt(h)), 1e-12, std::abs(l1 - 2 * std::sqrt(h)) <= 1e-12);
    add("f_h_square_integral", std::abs(sq - 2), 1e-12, std::abs(sq - 2) <= 1e-12);
    c.diag["checks"] = checks;
    c.diag["contraction_observed"] = d.contraction_observed;
    if (!ok)
        code = exit_numerical;
}

spdlog::level::level_enum log_level()
{
    char const* env = std::getenv("RTE_AOT_LOG");
    std::string v = env ? env : "info";
    if (v == "error")
        return spdlog::level::err;
    if (v == "debug")
        return spdlog::level::debug;
    if (v != "info")
        spdlog::warn("RTE_AOT_LOG={} not recognised; using info", v);
    return spdlog::level::info;
}

}  // namespace

std::vector<double> random_smooth_field(Discretization const& disc, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1, 1);
    struct Wave
    {
        Vec2 k;
        int m;
        double phase, amp;
    };
    std::vector<Wave> waves;
    for (int i = 0; i < 4; ++i)
        waves.push_back({{3 * u(rng), 3 * u(rng)}, static_cast<int>(std::floor(3 * (u(rng) + 1))), 3 * u(rng), u(rng)});
    std::size_t lat = disc.lattice_size();
    std::vector<double> out(disc.field_size(), 0.0);
    for (int idx : disc.spatial().active_nodes())
    {
        Vec2 x = disc.spatial().eval_point(idx);
        for (int d = 0; d < disc.n_theta(); ++d)
        {
            double a = disc.directions().angle(d), s = 1.0;
            for (auto const& w : waves)
                s += w.amp * std::cos(dot(w.k, x) + w.m * a + w.phase);
            out[d * lat + idx] = s;
        }
    }
    return out;
}

double field_inner(Discretization const& disc, std::span<double const> a, std::span<double const> b)
{
    if (a.size() != disc.field_size() || b.size() != disc.field_size())
        throw ArgumentError("fields have the wrong size");
    std::size_t lat = disc.lattice_size();
    double s = 0;
    for (int d = 0; d < disc.n_theta(); ++d)
        for (int idx : disc.spatial().inside_nodes())
            s += a[d * lat + idx] * b[d * lat + idx];
    return s * disc.spatial().cell_area() * disc.directions().weight();
}

int run(RunOptions const& opts)
{
    if (!spdlog::get("rte-aot"))
        spdlog::set_default_logger(spdlog::stderr_color_mt("rte-aot"));
    spdlog::set_level(log_level());
    StageClock clock;
    json manifest;
    manifest["version"] = version;
    manifest["subcommand"] = opts.subcommand;
    manifest["route"] = to_string(opts.route);
    json diag = json::object();
    std::optional<fs::path> out = opts.out_dir;
    int code = exit_ok;

    auto finish = [&](int c, std::string const& error) {
        manifest["exit_code"] = c;
        if (!error.empty())
            manifest["error"] = error;
        manifest["diagnostics"] = diag;
        manifest["stages"] = clock.json();
        manifest["wall_clock_seconds"] = clock.total_seconds();
        if (out)
        {
            try
            {
                fs::create_directories(*out);
                write_json(*out / "manifest.json", manifest);
            }
            catch (std::exception const& e)
            {
                spdlog::error("{}", e.what());
                if (c == exit_ok)
                    c = exit_io;
            }
        }
        return c;
    };

    try
    {
        if (std::find(subcommands.begin(), subcommands.end(), opts.subcommand) == subcommands.end())
            throw ConfigError("unknown subcommand '" + opts.subcommand + "'");
        manifest["scenario"] = opts.scenario.string();
        manifest["scenario_sha256"] = sha256_file(opts.scenario);
        clock.start("parse");
        Scenario sc = parse_scenario(opts.scenario);
        clock.stop();
        if (!out)
            out = sc.out_dir.value_or("rte-aot-out");
        unsigned threads = opts.threads.value_or(std::max(1u, std::thread::hardware_concurrency()));
        set_thread_count(threads);
        manifest["threads"] = threads;
        try
        {
            fs::create_directories(*out);
        }
        catch (fs::filesystem_error const& e)
        {
            throw IoError(e.what());
        }
        spdlog::info("{} on {} -> {}", opts.subcommand, opts.scenario.string(), out->string());

        Context c{sc, opts, *out, clock, diag};
        if (opts.subcommand == "forward")
            run_forward(c);
        else if (opts.subcommand == "albedo")
            run_albedo(c);
        else if (opts.subcommand == "measure")
            run_measure(c);
        else if (opts.subcommand == "recover-h")
            run_recover_h(c);
        else if (opts.subcommand == "recover-sigma")
            run_recover_sigma(c);
        else if (opts.subcommand == "recover-k")
            run_recover_k(c);
        else if (opts.subcommand == "study")
            run_study(c);
        else if (opts.subcommand == "check")
            run_check(c, code);
        clock.stop();
    }
    catch (ConfigError const& e)
    {
        spdlog::error("{}", e.what());
        return finish(exit_config, e.what());
    }
    catch (InadmissibleMedium const& e)
    {
        spdlog::error("{}", e.what());
        return finish(exit_config, e.what());
    }
    catch (ArgumentError const& e)
    {
        spdlog::error("{}", e.what());
        return finish(exit_config, e.what());
    }
    catch (IoError const& e)
    {
        spdlog::error("{}", e.what());
        return finish(exit_io, e.what());
    }
    catch (Error const& e)
    {
        spdlog::error("{}", e.what());
        return finish(exit_numerical, e.what());
    }
    catch (std::bad_alloc const&)
    {
        spdlog::error("out of memory");
        return finish(exit_numerical, "out of memory");
    }
    return finish(code, code == exit_ok ? "" : "invariant check failed");
}

}  // namespace rte_aot::app

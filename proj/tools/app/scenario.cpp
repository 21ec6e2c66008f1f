#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <toml.hpp>

#include <rte_aot/errors.hpp>

namespace rte_aot::app
{
namespace
{
constexpr double pi = std::numbers::pi;

[[noreturn]] void fail(std::string const& msg) { throw ConfigError(msg); }

void reject_unknown(toml::table const& t, std::string const& where, std::set<std::string> const& allowed)
{
    for (auto&& [k, v] : t)
    {
        (void)v;
        if (!allowed.contains(std::string(k.str())))
            fail("unknown key '" + std::string(k.str()) + "' in " + where);
    }
}

toml::table const* sub_table(toml::table const& t, std::string const& key)
{
    auto const* node = t.get(key);
    if (!node)
        return nullptr;
    auto const* tab = node->as_table();
    if (!tab)
        fail("'" + key + "' must be a table");
    return tab;
}

double number(toml::node const& n, std::string const& what)
{
    if (auto v = n.value<double>())
        return *v;
    fail(what + " must be a number");
}

std::optional<double> opt_number(toml::table const& t, std::string const& key, std::string const& where)
{
    auto const* n = t.get(key);
    if (!n)
        return std::nullopt;
    return number(*n, where + "." + key);
}

std::optional<int> opt_int(toml::table const& t, std::string const& key, std::string const& where)
{
    auto const* n = t.get(key);
    if (!n)
        return std::nullopt;
    auto v = n->value<std::int64_t>();
    if (!v || !n->is_integer())
        fail(where + "." + key + " must be an integer");
    if (*v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max())
        fail(where + "." + key + " is out of range");
    return static_cast<int>(*v);
}

std::optional<std::string> opt_string(toml::table const& t, std::string const& key, std::string const& where)
{
    auto const* n = t.get(key);
    if (!n)
        return std::nullopt;
    auto v = n->value<std::string>();
    if (!v)
        fail(where + "." + key + " must be a string");
    return *v;
}

Vec2 point(toml::node const& n, std::string const& what)
{
    auto const* a = n.as_array();
    if (!a || a->size() != 2)
        fail(what + " must be a two-element array");
    return {number(*a->get(0), what), number(*a->get(1), what)};
}

std::vector<double> number_list(toml::table const& t, std::string const& key, std::string const& where)
{
    auto const* n = t.get(key);
    auto const* a = n ? n->as_array() : nullptr;
    if (!a)
        fail(where + "." + key + " must be an array of numbers");
    std::vector<double> out;
    for (auto const& e : *a)
        out.push_back(number(e, where + "." + key));
    if (out.empty())
        fail(where + "." + key + " must not be empty");
    return out;
}

std::vector<Bump> bumps(toml::table const& t, std::string const& key, std::string const& where)
{
    std::vector<Bump> out;
    auto const* n = t.get(key);
    if (!n)
        return out;
    auto const* a = n->as_array();
    if (!a)
        fail(where + "." + key + " must be an array of tables");
    for (auto const& e : *a)
    {
        auto const* b = e.as_table();
        if (!b)
            fail(where + "." + key + " entries must be tables");
        std::string w = where + "." + key;
        reject_unknown(*b, w, {"center", "amplitude", "width"});
        Bump bump;
        if (auto const* c = b->get("center"))
            bump.center = point(*c, w + ".center");
        bump.amplitude = opt_number(*b, "amplitude", w).value_or(0);
        bump.width = opt_number(*b, "width", w).value_or(0.1);
        if (!(bump.width > 0))
            fail(w + ".width must be positive");
        out.push_back(bump);
    }
    return out;
}

void parse_domain(toml::table const& t, Scenario& s)
{
    reject_unknown(t, "[domain]", {"shape", "center", "radius", "lo", "hi"});
    std::string shape = opt_string(t, "shape", "domain").value_or("disk");
    if (shape == "disk")
    {
        Vec2 c = t.get("center") ? point(*t.get("center"), "domain.center") : Vec2{0, 0};
        double r = opt_number(t, "radius", "domain").value_or(1.0);
        if (!(r > 0))
            fail("domain.radius must be positive");
        s.domain = Domain::disk(c, r);
    }
    else if (shape == "rectangle")
    {
        if (!t.get("lo") || !t.get("hi"))
            fail("a rectangle needs domain.lo and domain.hi");
        Vec2 lo = point(*t.get("lo"), "domain.lo");
        Vec2 hi = point(*t.get("hi"), "domain.hi");
        if (!(hi.x > lo.x && hi.y > lo.y))
            fail("domain.hi must exceed domain.lo in both coordinates");
        s.domain = Domain::rectangle(lo, hi);
    }
    else
        fail("domain.shape must be 'disk' or 'rectangle'");
}

void parse_medium(toml::table const& t, Scenario& s)
{
    reject_unknown(t, "[medium]", {"sigma", "sigma_bumps", "kernel", "kappa", "kappa_bumps", "g"});
    double sigma0 = opt_number(t, "sigma", "medium").value_or(0.5);
    ScalarField sigma = ScalarField::bumps(sigma0, bumps(t, "sigma_bumps", "medium"));
    if (sigma.inf() < 0)
        fail("medium.sigma must be non-negative everywhere");
    double kappa0 = opt_number(t, "kappa", "medium").value_or(0.0);
    ScalarField kappa = ScalarField::bumps(kappa0, bumps(t, "kappa_bumps", "medium"));
    if (kappa.inf() < 0)
        fail("medium.kappa must be non-negative everywhere");
    std::string kind = opt_string(t, "kernel", "medium").value_or("isotropic");
    auto g = opt_number(t, "g", "medium");
    ScatteringKernel kernel;
    if (kind == "isotropic")
        kernel = ScatteringKernel::isotropic(kappa);
    else if (kind == "henyey_greenstein")
    {
        if (!g || !(std::abs(*g) < 1))
            fail("medium.g must lie in (-1, 1) for a henyey_greenstein kernel");
        kernel = ScatteringKernel::henyey_greenstein(kappa, *g);
    }
    else if (kind == "none")
        kernel = ScatteringKernel::none();
    else
        fail("medium.kernel must be 'isotropic', 'henyey_greenstein' or 'none'");
    if (g && kind != "henyey_greenstein")
        fail("medium.g only applies to a henyey_greenstein kernel");
    s.medium = Medium(sigma, kernel);
}

void parse_grid(toml::table const& t, Scenario& s)
{
    reject_unknown(t, "[grid]", {"n_theta", "n_x", "n_b", "n_q", "n_theta_q"});
    auto& g = s.grid;
    g.n_theta = opt_int(t, "n_theta", "grid").value_or(g.n_theta);
    g.n_x = opt_int(t, "n_x", "grid").value_or(g.n_x);
    g.n_b = opt_int(t, "n_b", "grid").value_or(0);
    g.n_q = opt_int(t, "n_q", "grid").value_or(g.n_q);
    g.n_theta_q = opt_int(t, "n_theta_q", "grid").value_or(0);
}

void parse_solver(toml::table const& t, Scenario& s)
{
    reject_unknown(t, "[solver]", {"tol_series", "j_max", "max_step", "m_sub"});
    s.solver.tol_series = opt_number(t, "tol_series", "solver").value_or(1e-8);
    s.solver.j_max = opt_int(t, "j_max", "solver").value_or(60);
    s.solver.max_step = opt_number(t, "max_step", "solver").value_or(0);
    s.solver.m_sub = opt_int(t, "m_sub", "solver").value_or(16);
}

void parse_experiment(toml::table const& t, Scenario& s)
{
    reject_unknown(t,
                   "[experiment]",
                   {"epsilon",
                    "h",
                    "epsilons",
                    "deltas",
                    "theta0",
                    "theta1",
                    "fixed_point",
                    "eval_points",
                    "kernel_pairs",
                    "studies"});
    s.epsilon = opt_number(t, "epsilon", "experiment").value_or(s.epsilon);
    if (t.get("h"))
        s.h = number_list(t, "h", "experiment");
    if (t.get("epsilons"))
        s.epsilons = number_list(t, "epsilons", "experiment");
    if (t.get("deltas"))
        s.deltas = number_list(t, "deltas", "experiment");
    s.theta0 = opt_number(t, "theta0", "experiment").value_or(s.theta0);
    s.theta1 = opt_number(t, "theta1", "experiment").value_or(s.theta1);
    if (auto const* n = t.get("fixed_point"))
        s.fixed_point = point(*n, "experiment.fixed_point");
    if (auto const* n = t.get("eval_points"))
    {
        auto const* a = n->as_array();
        if (!a || a->empty())
            fail("experiment.eval_points must be a non-empty array of points");
        s.eval_points.clear();
        for (auto const& e : *a)
            s.eval_points.push_back(point(e, "experiment.eval_points"));
    }
    if (auto const* n = t.get("kernel_pairs"))
    {
        auto const* a = n->as_array();
        if (!a || a->empty())
            fail("experiment.kernel_pairs must be a non-empty array of tables");
        s.kernel_samples.clear();
        for (auto const& e : *a)
        {
            auto const* p = e.as_table();
            if (!p)
                fail("experiment.kernel_pairs entries must be tables");
            reject_unknown(*p, "experiment.kernel_pairs", {"x", "theta1", "theta2"});
            KernelSample k;
            if (auto const* x = p->get("x"))
                k.x = point(*x, "experiment.kernel_pairs.x");
            auto t1 = opt_number(*p, "theta1", "experiment.kernel_pairs");
            auto t2 = opt_number(*p, "theta2", "experiment.kernel_pairs");
            if (!t1 || !t2)
                fail("experiment.kernel_pairs entries need theta1 and theta2");
            k.theta1 = *t1;
            k.theta2 = *t2;
            s.kernel_samples.push_back(k);
        }
    }
    if (auto const* n = t.get("studies"))
    {
        auto const* a = n->as_array();
        if (!a || a->empty())
            fail("experiment.studies must be a non-empty array of names");
        s.studies.clear();
        for (auto const& e : *a)
        {
            auto v = e.value<std::string>();
            if (!v)
                fail("experiment.studies entries must be strings");
            s.studies.push_back(*v);
        }
    }
}

void validate(Scenario& s)
{
    auto const& g = s.grid;
    if (g.n_theta < 4 || g.n_theta > max_n_theta || g.n_theta % 2 != 0)
        fail("grid.n_theta must be even and within [4, 1024]");
    if (g.n_x < 4 || g.n_x > max_n_x)
        fail("grid.n_x must lie within [4, 512]");
    if (g.n_b != 0 && g.n_b < 4)
        fail("grid.n_b must be at least 4");
    if (g.n_q < 4 || g.n_q > max_n_x || g.n_q % 2 != 0)
        fail("grid.n_q must be even and within [4, 512]");
    if (g.n_theta_q != 0 && (g.n_theta_q < 4 || g.n_theta_q > max_n_theta || g.n_theta_q % 2 != 0))
        fail("grid.n_theta_q must be even and within [4, 1024]");

    if (!(s.solver.tol_series > 0))
        fail("solver.tol_series must be positive");
    if (s.solver.j_max < 1)
        fail("solver.j_max must be at least 1");
    if (!(s.solver.max_step >= 0))
        fail("solver.max_step must be non-negative");
    try
    {
        gauss_legendre(s.solver.m_sub);
    }
    catch (ArgumentError const&)
    {
        fail("solver.m_sub must be one of 2, 3, 4, 8, 16");
    }

    if (!(s.epsilon > 0 && s.epsilon <= 0.2))
        fail("experiment.epsilon must lie in (0, 0.2]");
    for (double e : s.epsilons)
        if (!(e > 0 && e <= 0.2))
            fail("experiment.epsilons entries must lie in (0, 0.2]");
    for (double h : s.h)
        if (!(h > 0 && h < pi / 4))
            fail("experiment.h entries must lie in (0, pi/4)");
    for (double d : s.deltas)
        if (!(d >= 0))
            fail("experiment.deltas entries must be non-negative");

    if (s.eval_points.empty())
        for (double y : {-0.4, 0.0, 0.4})
            for (double x : {-0.4, 0.0, 0.4})
                s.eval_points.push_back(s.domain.is_disk() ? Vec2{x, y} : 0.5 * (s.domain.lo() + s.domain.hi()) + Vec2{x, y});
    for (Vec2 p : s.eval_points)
        if (!(s.domain.inner_distance(p) > 0))
            fail("experiment.eval_points must lie inside the domain");
    if (!(s.domain.inner_distance(s.fixed_point) > 0))
        fail("experiment.fixed_point must lie inside the domain");

    if (s.kernel_samples.empty())
    {
        Vec2 c = 0.5 * (s.domain.lo() + s.domain.hi());
        for (double t2 : {pi / 3, pi / 2, 2 * pi / 3})
            s.kernel_samples.push_back({c, 0.0, t2});
    }
    double h_max = *std::max_element(s.h.begin(), s.h.end());
    for (auto const& k : s.kernel_samples)
    {
        if (!(s.domain.inner_distance(k.x) > 0))
            fail("experiment.kernel_pairs points must lie inside the domain");
        if (std::abs(angle_diff(k.theta1, k.theta2)) < kernel_angle_guard(h_max))
            fail("experiment.kernel_pairs directions must be at least 3 sqrt(h) apart for every h");
    }

    static std::set<std::string> const known{"ballistic", "oscillatory", "sigma", "kernel", "epsilon", "stability"};
    for (auto const& name : s.studies)
        if (!known.contains(name))
            fail("unknown study '" + name + "'");

    try
    {
        check_admissibility(s.medium, s.domain, build_grids(s.domain, g.n_theta, g.n_x, s.n_b()));
    }
    catch (InadmissibleMedium const& e)
    {
        fail(e.what());
    }
}

}  // namespace

int Scenario::n_b() const { return grid.n_b > 0 ? grid.n_b : 4 * grid.n_x; }

Scenario parse_scenario_text(std::string const& text, std::string const& source_name)
{
    toml::table root;
    try
    {
        root = toml::parse(text, source_name);
    }
    catch (toml::parse_error const& e)
    {
        std::ostringstream os;
        os << "TOML syntax error in " << source_name << ": " << e.description() << " (line "
           << e.source().begin.line << ")";
        fail(os.str());
    }
    reject_unknown(root, "scenario", {"name", "seed", "domain", "medium", "grid", "solver", "experiment", "output"});

    Scenario s;
    s.name = opt_string(root, "name", "scenario").value_or("");
    if (auto const* n = root.get("seed"))
    {
        auto v = n->value<std::int64_t>();
        if (!v || !n->is_integer() || *v < 0)
            fail("seed must be a non-negative integer");
        s.seed = static_cast<std::uint64_t>(*v);
    }
    if (auto const* t = sub_table(root, "domain"))
        parse_domain(*t, s);
    auto const* med = sub_table(root, "medium");
    if (!med)
        fail("scenario needs a [medium] table");
    parse_medium(*med, s);
    if (auto const* t = sub_table(root, "grid"))
        parse_grid(*t, s);
    if (auto const* t = sub_table(root, "solver"))
        parse_solver(*t, s);
    if (auto const* t = sub_table(root, "experiment"))
        parse_experiment(*t, s);
    if (auto const* t = sub_table(root, "output"))
    {
        reject_unknown(*t, "[output]", {"dir"});
        if (auto d = opt_string(*t, "dir", "output"))
            s.out_dir = *d;
    }
    validate(s);
    return s;
}

Scenario parse_scenario(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open scenario file " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_scenario_text(os.str(), path.string());
}

BoundarySource measurement_f()
{
    return BoundarySource::angular([](Vec2 t) { return 1 + 0.5 * std::cos(angle_of(t) - 0.4); });
}

BoundarySource measurement_g()
{
    return BoundarySource::boundary_function(
        [](Vec2 b, Vec2 t) { return 1 + 0.3 * std::sin(2 * angle_of(t)) + 0.2 * b.y; }, BoundarySide::outflow);
}

}  // namespace rte_aot::app

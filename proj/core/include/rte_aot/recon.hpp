#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rte_aot/functional.hpp"

namespace rte_aot
{
//! h^{-1/2} on the arc |theta - theta0| < h.
BoundarySource make_f_h(double theta0, double h, BoundarySide side = BoundarySide::inflow);

//! Oscillatory source about theta1 with stripes of width h across theta1.
//! Defaults give half width h and amplitude 1/h; a narrower arc keeps the
//! angular L1 norm at 2.
struct GhOptions
{
    std::optional<double> half_width;
    double offset = 0;
};
BoundarySource make_g_h(double theta1, double h, BoundarySide side = BoundarySide::inflow, GhOptions opts = {});

//! Smallest admissible angle between theta1 and theta2 for a given h.
double kernel_angle_guard(double h);

struct SigmaPoint
{
    Vec2 x;
    double numerator = 0;
    double denominator = 0;
    double sigma_hat = 0;
};

struct SigmaReconstruction
{
    double h = 0;
    double theta0 = 0;
    Route route = Route::oracle;
    std::vector<SigmaPoint> points;
    std::vector<Vec2> rejected;  //!< denominator below the floor
};

//! sigma(x) = -H(f_h, f_h)(x) / 2 over sqrt(h) times the albedo of f_h at the exit point.
//! The fourier route synthesises H from n_q x n_q measurements at epsilon.
SigmaReconstruction recover_sigma(Transport const& transport,
                                  double theta0,
                                  double h,
                                  std::span<Vec2 const> points,
                                  Route route = Route::oracle,
                                  double epsilon = 0.05);

struct KernelSample
{
    Vec2 x;
    double theta1 = 0;  //!< incoming direction angle
    double theta2 = 0;  //!< outgoing direction angle
};

enum class KernelFamily
{
    coherent,  //!< arc h^2 with the stripe centred on the ray through x
    literal    //!< arc h, stripes anchored at the origin
};

struct KernelPoint
{
    KernelSample sample;
    double h_value = 0;
    double depth = 0;
    double k_hat = 0;
};

struct KernelReconstruction
{
    double h = 0;
    KernelFamily family = KernelFamily::coherent;
    std::vector<KernelPoint> points;
};

//! k(x, theta2, theta1) = |H(g^{theta1}, g^{theta2}) exp(D+ + D-)| / 4, with the
//! optical depths taken from the known sigma.
KernelReconstruction recover_k(Transport const& transport,
                               ScalarField const& sigma_known,
                               std::span<KernelSample const> samples,
                               double h,
                               KernelFamily family = KernelFamily::coherent);

struct StudyRow
{
    double param = 0;
    double error = 0;
    double ratio = 0;  //!< previous error over this error; nan on the first row
    double order = 0;  //!< log(ratio) / log(previous param / param)
};

struct StudyTable
{
    std::string name;
    std::vector<StudyRow> rows;
};

StudyTable make_table(std::string name, std::span<double const> params, std::span<double const> errors);

enum class StudyKind
{
    ballistic,
    oscillatory,
    sigma,
    kernel,
    epsilon
};

std::string to_string(StudyKind k);

//! Everything a study needs besides the parameter list.
struct StudySetup
{
    Medium medium;
    DiscretizationPtr disc;
    SolverOptions options;
    double theta0 = 0;  //!< f_h direction
    double theta1 = 0;  //!< g_h direction for the oscillatory study
    Vec2 fixed_point;   //!< x for fixed-point angular norms
    std::vector<Vec2> eval_points;
    std::vector<KernelSample> kernel_samples;
    //! smooth sources for measurement studies
    std::optional<BoundarySource> f;
    std::optional<BoundarySource> g;
};

struct EpsilonStudy
{
    std::vector<double> epsilons;
    std::vector<double> raw;      //!< |H_fourier - H_oracle| / |H_oracle| in L2(X)
    double floor = 0;             //!< same for the extrapolated eps -> 0 field
    std::vector<double> eps_part; //!< |H_fourier(eps) - H_0| / |H_oracle|
    double slope = 0;             //!< log-log slope of eps_part
};

//! Fourier recovery at n_q = grid size for each epsilon; the eps -> 0 field is
//! the per-node least-squares intercept of H(eps) = a + b eps.
EpsilonStudy epsilon_study(StudySetup const& setup, std::span<double const> epsilons);

//! One table per measured quantity; at least three parameter values.
std::vector<StudyTable> run_convergence_study(StudyKind kind, std::span<double const> params, StudySetup const& setup);

struct StabilityRow
{
    double delta = 0;
    double sigma_diff = 0;  //!< sup over eval points of |sigma_hat_1 - sigma_hat_2|
    double h_diff = 0;      //!< sup over eval points of |H_1 - H_2|
    double kernel_diff = 0; //!< sup over kernel samples of |k_hat_1 - k_hat_2|
    double kernel_h_diff = 0;
};

struct StabilityStudy
{
    double h = 0;
    std::vector<StabilityRow> rows;

    std::vector<StudyTable> tables() const;
};

//! sigma_2 = sigma_1 + delta bump (and kappa likewise for the kernel rows)
//! at a fixed h; H and the reconstructions are compared at the eval points.
StabilityStudy run_stability_study(StudySetup const& setup, std::span<double const> deltas, double h);

//! The perturbation used by the stability study.
Bump stability_bump(double delta);

}  // namespace rte_aot

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blowup/model.hpp"
#include "blowup/special.hpp"

// Explicit finite-difference solver for radially symmetric semilinear wave
// equations u_tt - u_rr - ((n-1)/r) u_r = F(u, u_t) with compactly supported
// data, blow-up detection, and lifespan extraction.
namespace blowup::solver {

// Cell-centered grid: r_j = (j + 1/2) h, so the coordinate singularity at
// r = 0 is never sampled; the origin face weight r^{n-1} vanishes instead.
struct RadialGrid {
    double h = 0.0;
    int cells = 0;

    double r_center(int j) const noexcept { return (j + 0.5) * h; }
    double r_face(int j) const noexcept { return j * h; }
    double r_max() const noexcept { return cells * h; }

    // Grid reaching r = t_final + 2, enough to hold the support cone
    // |x| <= t + 1 through t_final.
    static RadialGrid for_horizon(double t_final, double h);
};

struct SolutionState {
    double t = 0.0;
    std::vector<double> u; // field samples at cell centers
    std::vector<double> v; // u_t samples at cell centers
};

struct InitialData {
    std::function<double(double)> f_profile; // u(0, .) = epsilon * f
    std::function<double(double)> g_profile; // u_t(0, .) = epsilon * g
    double epsilon = 1.0;
    bool nonneg = false; // requires sampled profiles >= 0
};

struct ProblemSpec {
    int n = 2; // n >= 2; n = 1 runs the plain 1-D operator (test mode)
    std::optional<model::NonlinearitySpec> nonlinearity; // nullopt = linear
    InitialData data;
};

// The smooth bump exp(1 - 1/(1-r^2)) on r < 1, 0 outside.
double default_g(double r);

// Samples epsilon * f, epsilon * g onto the grid and validates support
// (vanishing for r > 1) and, when requested, nonnegativity.
SolutionState initialize_state(const ProblemSpec& problem, const RadialGrid& grid);

// One classical RK4 step of the first-order system u_t = v,
// v_t = L_h u + F(u, v), where L_h is the conservative flux form of the
// radial Laplacian r^{1-n} (r^{n-1} u_r)_r with a zero flux weight at the
// origin face and a homogeneous Dirichlet ghost at r_max. Returns false when
// the updated state contains non-finite values (blow-up overshoot or
// instability); the state is updated regardless so the caller sees it.
class Stepper {
public:
    Stepper(const ProblemSpec& problem, const RadialGrid& grid);

    bool step(SolutionState& state, double dt);
    const RadialGrid& grid() const noexcept { return grid_; }

private:
    void rhs(const std::vector<double>& u, const std::vector<double>& v,
             std::vector<double>& du, std::vector<double>& dv) const;

    RadialGrid grid_;
    int n_;
    std::optional<model::NonlinearitySpec> nonlinearity_;
    std::vector<double> flux_plus_, flux_minus_, inv_weight_;
    // RK4 scratch
    std::vector<double> ku1_, kv1_, ku2_, kv2_, ku3_, kv3_, ku4_, kv4_, ut_, vt_;
};

// Discrete energy (1/2) int (v^2 + u_r^2) r^{n-1} dr with face-centered
// gradients; exactly conserved by the semi-discrete linear flow.
double discrete_energy(const SolutionState& state, const RadialGrid& grid, int n);

enum class RunStatus { blew_up, reached_t_max, unstable };

std::string to_string(RunStatus s);

struct LifespanRecord {
    double T_num = 0.0;
    double peak_r = 0.0;
    double refinement_ratio = 0.0; // |T(h) - T(h/2)| / T(h/2) when blew_up
    RunStatus status = RunStatus::reached_t_max;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> u, v;
};

struct RunOptions {
    double cfl = 0.45;
    double blow_threshold = 1e6; // >= 1e4
    double t_max = 10.0;
    int target_samples = 400;
    int target_snapshots = 64;
    // Optional psi1-weighted series for the test-function monitors.
    const special::Phi1Evaluator* phi = nullptr;
    double holder_p = 0.0; // records int psi1^{p'} dx when > 1
};

// Everything the monitors consume: time series of the proof functionals plus
// periodic field snapshots.
struct RunRecord {
    int n = 2;
    double epsilon = 1.0;
    double h = 0.0;
    double holder_p = 0.0; // p used for the psi1^{p'} series, 0 when off
    RunStatus status = RunStatus::reached_t_max;
    double T_num = 0.0;     // time at blow-up threshold crossing (or end time)
    double T_num_hi = 0.0;  // time at 10x threshold (threshold-sensitivity check)
    double peak_r = 0.0;

    std::vector<double> times;
    std::vector<double> max_abs_u;
    std::vector<double> mass;        // int u dx
    std::vector<double> source_mass; // int F(u, u_t) dx  ( = F''(t) )
    std::vector<model::NonlinearityTerm> terms;  // the nonlinearity of the run
    std::vector<std::vector<double>> term_mass;  // per-term integrals
    std::vector<double> weighted_velocity;      // int psi1 u_t dx (when phi set)
    std::vector<double> psi_lp;                 // int psi1^{p'} dx (when enabled)
    std::vector<double> min_u;                  // instantaneous min of u
    std::vector<double> energy;                 // discrete energy

    std::vector<Snapshot> snapshots;

    double support_excess = 0.0; // worst |u|+|v| beyond the cone, relative
    double energy_drift_per_time = 0.0; // linear-run conservation diagnostic
};

// Marches until sup|u| >= blow_threshold (blew_up), t >= t_max
// (reached_t_max), or the support cone is violated / the state degenerates
// (unstable). On blew_up the run is repeated at h/2 to fill
// refinement_ratio. record / record_fine, when given, receive the full
// series of the primary and refined runs.
LifespanRecord solve_lifespan(const ProblemSpec& problem, const RadialGrid& grid,
                              const RunOptions& options, RunRecord* record = nullptr,
                              RunRecord* record_fine = nullptr);

// Integrates to t_end and returns the state (linear-oracle comparisons).
SolutionState run_to(const ProblemSpec& problem, const RadialGrid& grid, double t_end,
                     double cfl = 0.45);

// Minimum of u over grid and time up to 0.9 * T_num on a Theorem-style run
// (nonnegative data, nonnegative nonlinearity terms). Contract: the result
// is above -10 h^2.
double positivity_check(const ProblemSpec& problem, const RadialGrid& grid,
                        const RunOptions& options);

// Self-convergence order from runs at h, h/2, h/4 compared at t_probe in the
// weighted discrete L2 norm. Rejects degenerate data and t_probe within 10%
// of the estimated blow-up time.
double convergence_order(const ProblemSpec& problem, const RadialGrid& grid, double t_probe,
                         const RunOptions& options);

} // namespace blowup::solver

#pragma once

#include <string>
#include <vector>

#include "blowup/solver.hpp"
#include "blowup/special.hpp"

// The proof functionals evaluated on solver output, monitors for every
// functional inequality driving the blow-up argument, and the
// characteristic-coordinate Picard oracle for the exterior region r > t.
namespace blowup::functionals {

// int u dx = |S^{n-1}| sum_j u_j r_j^{n-1} h.
double mass_functional(const solver::SolutionState& state, const solver::RadialGrid& grid,
                       int n);

// int psi1(|x|, t) u_t dx with psi1 = phi1 e^{-t}.
double weighted_velocity(const solver::SolutionState& state, const solver::RadialGrid& grid,
                         int n, const special::Phi1Evaluator& phi);

// Every monitor asserts an inequality of the form lhs >= rhs sample-wise;
// fitted_constant is the empirical constant (min of lhs when rhs == 0).
struct MonitorReport {
    std::string name;
    std::vector<double> times;
    std::vector<double> lhs;
    std::vector<double> rhs;
    double min_margin = 0.0;      // min(lhs - rhs)
    double fitted_constant = 0.0; // min(lhs) for lower-bound monitors
};

// Pointwise lower bound near the light cone: min over the band
// {t >= 1/2, 1/4 <= r - t <= 3/4} of u sqrt(r)/eps and u_t sqrt(r)/eps,
// from field snapshots up to 0.9 T_num.
MonitorReport monitor_cone_pointwise(const solver::RunRecord& rec);

// Mass growth F(t) >= const * eps^eps_power (1+t)^t_power for t >= 1:
// lhs = F(t) / (eps^eps_power (1+t)^t_power).
MonitorReport monitor_mass_growth(const solver::RunRecord& rec, double eps_power,
                                  double t_power);

// Comparison-inequality ratio F''(t) (1+t)^alpha / F(t)^beta, with F''
// evaluated through the integrated equation (the recorded source integral),
// not by differencing.
MonitorReport monitor_ode_ratio(const solver::RunRecord& rec, double alpha, double beta);

// Velocity Lp lower bound: lhs = (int |u_t|^p dx) (1+t)^{(n-1)(p-2)/2} / eps^p.
MonitorReport monitor_velocity_lp(const solver::RunRecord& rec, double p, int n);

// Weighted velocity positivity: lhs = (int psi1 u_t dx) / eps.
MonitorReport monitor_weighted_velocity(const solver::RunRecord& rec);

// Sample-wise Holder chain: lhs = (int |u_t|^p)^{1/p} (int psi1^{p'})^{1/p'},
// rhs = int psi1 u_t dx; exact for the discrete quadrature sums.
MonitorReport monitor_holder_chain(const solver::RunRecord& rec, double p);

// Max over uniform sample triples (t <= window_end) of the relative defect
// |D2_t mass - source_mass| / max-scale; the integrated equation makes the
// two sides identical up to time-sampling error.
double identity_residual(const solver::RunRecord& rec, double window_end);

// --- exterior Picard oracle -------------------------------------------------

struct PicardOptions {
    double t_end = 0.5;       // <= 1 (contraction range with eps <= 1)
    double dxi = 1.0 / 512.0; // characteristic lattice spacing; 1/dxi integral
    int max_iterations = 60;
    double tol = 1e-8;            // sup-norm fixed-point tolerance
    int iterations_override = 0;  // > 0: run exactly this many iterations
    bool start_from_zero = true;
};

// Fixed point of the exterior integral equation for w = r^{1/2} u on the
// characteristic lattice xi = r - t, eta = r + t (the backward triangle
// becomes an axis-aligned staircase there). The iteration transports the
// full nonlinearity F(u, u_t) of the problem.
class PicardSolution {
public:
    PicardSolution(const solver::ProblemSpec& problem, const PicardOptions& options);

    int iterations() const noexcept { return iterations_; }
    const std::vector<double>& sup_diffs() const noexcept { return sup_diffs_; }
    double t_end() const noexcept { return t_end_; }

    // Lattice accessors (i: xi index, m: eta index).
    double w_at(int i, int m) const { return w_[idx(i, m)]; }
    double linear_at(int i, int m) const { return lin_[idx(i, m)]; }
    int xi_count() const noexcept { return ni_ + 1; }
    int eta_count() const noexcept { return nm_ + 1; }
    double dxi() const noexcept { return d_; }

    // Bilinear evaluation; zero for xi >= 1 (outside the data's domain of
    // influence). Requires 0 <= t <= t_end and r > t.
    double w(double xi, double eta) const;
    double u(double t, double r) const;
    double linear_term(double xi, double eta) const;

private:
    std::size_t idx(int i, int m) const { return std::size_t(i) * (nm_ + 1) + m; }
    double eval(const std::vector<double>& grid_vals, double xi, double eta) const;

    double t_end_, d_, epsilon_;
    int ni_, nm_, iterations_ = 0;
    std::vector<double> w_, z_, lin_, lin_z_;
    std::vector<double> sup_diffs_;
};

PicardSolution dalembert_picard(const solver::ProblemSpec& problem,
                                const PicardOptions& options);

} // namespace blowup::functionals

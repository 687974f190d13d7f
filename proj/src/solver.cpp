#include "blowup/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blowup::solver {

RadialGrid RadialGrid::for_horizon(double t_final, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("RadialGrid: h must be > 0");
    if (!(t_final >= 0.0)) throw std::invalid_argument("RadialGrid: t_final must be >= 0");
    const int cells = static_cast<int>(std::ceil((t_final + 2.0) / h));
    return RadialGrid{h, cells};
}

double default_g(double r) {
    if (r >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

SolutionState initialize_state(const ProblemSpec& problem, const RadialGrid& grid) {
    if (grid.cells < 8) throw std::invalid_argument("initialize_state: grid too small");
    if (!(problem.data.epsilon > 0.0))
        throw std::invalid_argument("initialize_state: epsilon must be > 0");

    SolutionState s;
    s.t = 0.0;
    s.u.assign(grid.cells, 0.0);
    s.v.assign(grid.cells, 0.0);
    const double eps = problem.data.epsilon;
    for (int j = 0; j < grid.cells; ++j) {
        const double r = grid.r_center(j);
        const double f = problem.data.f_profile ? problem.data.f_profile(r) : 0.0;
        const double g = problem.data.g_profile ? problem.data.g_profile(r) : 0.0;
        if (r > 1.0 && (f != 0.0 || g != 0.0))
            throw std::invalid_argument("initialize_state: data must vanish for r > 1");
        if (problem.data.nonneg && (f < 0.0 || g < 0.0))
            throw std::invalid_argument("initialize_state: data flagged nonneg but negative");
        s.u[j] = eps * f;
        s.v[j] = eps * g;
    }
    return s;
}

Stepper::Stepper(const ProblemSpec& problem, const RadialGrid& grid)
    : grid_(grid), n_(problem.n), nonlinearity_(problem.nonlinearity) {
    if (n_ < 1) throw std::invalid_argument("Stepper: dimension must be >= 1");
    const int J = grid_.cells;
    flux_plus_.resize(J);
    flux_minus_.resize(J);
    inv_weight_.resize(J);
    for (int j = 0; j < J; ++j) {
        const double e = double(n_ - 1);
        flux_plus_[j] = std::pow(grid_.r_face(j + 1), e);
        flux_minus_[j] = j == 0 ? 0.0 : std::pow(grid_.r_face(j), e);
        inv_weight_[j] = 1.0 / (std::pow(grid_.r_center(j), e) * grid_.h * grid_.h);
    }
    for (auto* buf : {&ku1_, &kv1_, &ku2_, &kv2_, &ku3_, &kv3_, &ku4_, &kv4_, &ut_, &vt_})
        buf->assign(J, 0.0);
}

void Stepper::rhs(const std::vector<double>& u, const std::vector<double>& v,
                  std::vector<double>& du, std::vector<double>& dv) const {
    const int J = grid_.cells;
    // Laplacian in flux form; origin face carries zero weight, outer ghost
    // is homogeneous Dirichlet (the support cone never reaches it).
    dv[0] = inv_weight_[0] * flux_plus_[0] * (u[1] - u[0]);
    for (int j = 1; j + 1 < J; ++j)
        dv[j] = inv_weight_[j] *
                (flux_plus_[j] * (u[j + 1] - u[j]) - flux_minus_[j] * (u[j] - u[j - 1]));
    dv[J - 1] = inv_weight_[J - 1] *
                (-flux_plus_[J - 1] * u[J - 1] - flux_minus_[J - 1] * (u[J - 1] - u[J - 2]));

    if (nonlinearity_) {
        const auto& F = *nonlinearity_;
        for (int j = 0; j < J; ++j) dv[j] += F(u[j], v[j]);
    }
    for (int j = 0; j < J; ++j) du[j] = v[j];
}

bool Stepper::step(SolutionState& state, double dt) {
    const int J = grid_.cells;
    auto& u = state.u;
    auto& v = state.v;

    rhs(u, v, ku1_, kv1_);
    for (int j = 0; j < J; ++j) {
        ut_[j] = u[j] + 0.5 * dt * ku1_[j];
        vt_[j] = v[j] + 0.5 * dt * kv1_[j];
    }
    rhs(ut_, vt_, ku2_, kv2_);
    for (int j = 0; j < J; ++j) {
        ut_[j] = u[j] + 0.5 * dt * ku2_[j];
        vt_[j] = v[j] + 0.5 * dt * kv2_[j];
    }
    rhs(ut_, vt_, ku3_, kv3_);
    for (int j = 0; j < J; ++j) {
        ut_[j] = u[j] + dt * ku3_[j];
        vt_[j] = v[j] + dt * kv3_[j];
    }
    rhs(ut_, vt_, ku4_, kv4_);

    bool finite = true;
    const double w = dt / 6.0;
    for (int j = 0; j < J; ++j) {
        u[j] += w * (ku1_[j] + 2.0 * ku2_[j] + 2.0 * ku3_[j] + ku4_[j]);
        v[j] += w * (kv1_[j] + 2.0 * kv2_[j] + 2.0 * kv3_[j] + kv4_[j]);
        finite = finite && std::isfinite(u[j]) && std::isfinite(v[j]);
    }
    state.t += dt;
    return finite;
}

double discrete_energy(const SolutionState& state, const RadialGrid& grid, int n) {
    const int J = grid.cells;
    const double e = double(n - 1);
    double kinetic = 0.0, gradient = 0.0;
    for (int j = 0; j < J; ++j)
        kinetic += state.v[j] * state.v[j] * std::pow(grid.r_center(j), e);
    for (int j = 1; j < J; ++j) {
        const double du = (state.u[j] - state.u[j - 1]) / grid.h;
        gradient += du * du * std::pow(grid.r_face(j), e);
    }
    // Outer face against the Dirichlet ghost.
    const double du_out = (0.0 - state.u[J - 1]) / grid.h;
    gradient += du_out * du_out * std::pow(grid.r_face(J), e);
    return 0.5 * grid.h * (kinetic + gradient);
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::blew_up: return "blew_up";
        case RunStatus::reached_t_max: return "reached_t_max";
        case RunStatus::unstable: return "unstable";
    }
    return "?";
}

namespace {

struct MarchOutcome {
    RunStatus status = RunStatus::reached_t_max;
    double T_num = 0.0;
    double T_num_hi = 0.0;
    double peak_r = 0.0;
};

// Full diagnostic march on one grid.
MarchOutcome march(const ProblemSpec& problem, const RadialGrid& grid,
                   const RunOptions& opt, RunRecord* rec) {
    if (!(opt.blow_threshold >= 1e4))
        throw std::invalid_argument("solve_lifespan: blow_threshold must be >= 1e4");
    if (!(opt.t_max > 0.0)) throw std::invalid_argument("solve_lifespan: t_max must be > 0");
    if (grid.r_max() < opt.t_max + 1.0)
        throw std::invalid_argument("solve_lifespan: grid does not contain the support cone");

    Stepper stepper(problem, grid);
    SolutionState state = initialize_state(problem, grid);
    const int J = grid.cells;
    const double dt = opt.cfl * grid.h;
    const long total_steps = static_cast<long>(std::ceil(opt.t_max / dt)) + 1;
    const long sample_stride = std::max<long>(1, total_steps / std::max(1, opt.target_samples));
    const long snap_stride = std::max<long>(1, total_steps / std::max(1, opt.target_snapshots));

    const double sphere = special::unit_sphere_area(std::max(problem.n, 2));
    std::vector<double> phi_cells;
    if (rec && opt.phi) {
        phi_cells.resize(J);
        for (int j = 0; j < J; ++j) phi_cells[j] = opt.phi->phi1(grid.r_center(j));
    }
    const std::size_t n_terms = problem.nonlinearity ? problem.nonlinearity->term_count() : 0;

    if (rec) {
        rec->n = problem.n;
        rec->epsilon = problem.data.epsilon;
        rec->h = grid.h;
        rec->holder_p = opt.phi && opt.holder_p > 1.0 ? opt.holder_p : 0.0;
        rec->terms = problem.nonlinearity ? problem.nonlinearity->terms()
                                          : std::vector<model::NonlinearityTerm>{};
        rec->term_mass.assign(n_terms, {});
        rec->support_excess = 0.0;
    }

    double energy0 = -1.0, energy_drift = 0.0;

    auto sample = [&](const SolutionState& s) {
        if (!rec) return;
        const double e = double(problem.n - 1);
        double mass = 0.0, source = 0.0, mn = s.u[0], wvel = 0.0, psi_lp = 0.0, mx = 0.0;
        std::vector<double> terms(n_terms, 0.0);
        const double cone = s.t + 1.0;
        for (int j = 0; j < J; ++j) {
            const double w = std::pow(grid.r_center(j), e) * grid.h * sphere;
            mass += s.u[j] * w;
            mn = std::min(mn, s.u[j]);
            mx = std::max(mx, std::fabs(s.u[j]));
            if (problem.nonlinearity) {
                for (std::size_t ti = 0; ti < n_terms; ++ti)
                    terms[ti] += problem.nonlinearity->term_value(ti, s.u[j], s.v[j]) * w;
            }
            if (!phi_cells.empty()) {
                const double psi = phi_cells[j] * std::exp(-s.t);
                wvel += psi * s.v[j] * w;
                if (opt.holder_p > 1.0 && grid.r_center(j) <= cone) {
                    const double pprime = opt.holder_p / (opt.holder_p - 1.0);
                    psi_lp += std::pow(psi, pprime) * w;
                }
            }
        }
        for (const double tv : terms) source += tv;
        rec->times.push_back(s.t);
        rec->max_abs_u.push_back(mx);
        rec->mass.push_back(mass);
        rec->source_mass.push_back(source);
        for (std::size_t ti = 0; ti < n_terms; ++ti) rec->term_mass[ti].push_back(terms[ti]);
        if (!phi_cells.empty()) {
            rec->weighted_velocity.push_back(wvel);
            if (opt.holder_p > 1.0) rec->psi_lp.push_back(psi_lp);
        }
        rec->min_u.push_back(mn);
        const double energy = discrete_energy(s, grid, problem.n);
        rec->energy.push_back(energy);
        if (energy0 < 0.0) energy0 = energy;
        else if (energy0 > 0.0 && s.t >= 0.5)
            energy_drift = std::max(energy_drift, std::fabs(energy - energy0) / (energy0 * s.t));
    };
    auto snapshot = [&](const SolutionState& s) {
        if (!rec) return;
        rec->snapshots.push_back({s.t, s.u, s.v});
    };

    sample(state);
    snapshot(state);

    MarchOutcome out;
    bool crossed = false;
    double prev_max = 0.0;
    for (int j = 0; j < J; ++j) prev_max = std::max(prev_max, std::fabs(state.u[j]));

    for (long istep = 1;; ++istep) {
        const double dt_step = std::min(dt, opt.t_max - state.t);
        const double t_prev = state.t;
        const bool finite = stepper.step(state, dt_step);

        double max_u = 0.0;
        int arg_max = 0;
        for (int j = 0; j < J; ++j) {
            const double a = std::fabs(state.u[j]);
            if (a > max_u) {
                max_u = a;
                arg_max = j;
            }
        }

        if (!finite) {
            if (crossed) {
                out.status = RunStatus::blew_up;
                if (out.T_num_hi == 0.0) out.T_num_hi = t_prev;
            } else if (prev_max >= 1e3) {
                // The sup norm escaped to infinity between steps.
                out.status = RunStatus::blew_up;
                out.T_num = t_prev;
                out.T_num_hi = t_prev;
                out.peak_r = grid.r_center(arg_max);
            } else {
                out.status = RunStatus::unstable;
                out.T_num = t_prev;
            }
            break;
        }

        // Finite speed of propagation: the cone |x| <= t + 1 plus a 2h margin.
        // Healthy runs carry dispersive precursors of the scheme's own error
        // scale just beyond the cone (Airy tail of the error wave front), so
        // the instability gate sits at O(h^2) above the roundoff floor;
        // parasitic growth from a CFL violation blows through it immediately.
        const double support_tol =
            (1e-12 + 50.0 * grid.h * grid.h) * std::max(1.0, max_u);
        const double cone_edge = state.t + 1.0 + 2.0 * grid.h;
        double worst = 0.0;
        for (int j = J - 1; j >= 0; --j) {
            if (grid.r_center(j) <= cone_edge) break;
            worst = std::max(worst, std::fabs(state.u[j]) + std::fabs(state.v[j]));
        }
        if (rec)
            rec->support_excess =
                std::max(rec->support_excess, worst / std::max(1.0, max_u));
        if (worst > support_tol) {
            out.status = RunStatus::unstable;
            out.T_num = state.t;
            sample(state);
            break;
        }

        if (!crossed && max_u >= opt.blow_threshold) {
            crossed = true;
            out.T_num = state.t;
            out.peak_r = grid.r_center(arg_max);
        }
        if (crossed && out.T_num_hi == 0.0 && max_u >= 10.0 * opt.blow_threshold)
            out.T_num_hi = state.t;

        const bool done_hi = crossed && out.T_num_hi != 0.0;
        const bool time_up = state.t >= opt.t_max - 1e-12;
        if (istep % sample_stride == 0 || done_hi || time_up) sample(state);
        if (istep % snap_stride == 0) snapshot(state);

        if (done_hi) {
            out.status = RunStatus::blew_up;
            break;
        }
        if (time_up) {
            if (crossed) {
                out.status = RunStatus::blew_up;
                if (out.T_num_hi == 0.0) out.T_num_hi = state.t;
            } else {
                out.status = RunStatus::reached_t_max;
                out.T_num = state.t;
                int am = 0;
                for (int j = 0; j < J; ++j)
                    if (std::fabs(state.u[j]) > std::fabs(state.u[am])) am = j;
                out.peak_r = grid.r_center(am);
            }
            break;
        }
        prev_max = max_u;
    }

    if (rec) {
        rec->status = out.status;
        rec->T_num = out.T_num;
        rec->T_num_hi = out.T_num_hi;
        rec->peak_r = out.peak_r;
        rec->energy_drift_per_time = energy_drift;
    }
    return out;
}

} // namespace

LifespanRecord solve_lifespan(const ProblemSpec& problem, const RadialGrid& grid,
                              const RunOptions& options, RunRecord* record,
                              RunRecord* record_fine) {
    const MarchOutcome coarse = march(problem, grid, options, record);

    LifespanRecord rec;
    rec.status = coarse.status;
    rec.T_num = coarse.T_num;
    rec.peak_r = coarse.peak_r;

    if (coarse.status == RunStatus::blew_up) {
        const RadialGrid fine{grid.h * 0.5, grid.cells * 2};
        const MarchOutcome refined = march(problem, fine, options, record_fine);
        if (refined.status == RunStatus::blew_up && refined.T_num > 0.0)
            rec.refinement_ratio = std::fabs(coarse.T_num - refined.T_num) / refined.T_num;
        else
            rec.refinement_ratio = std::numeric_limits<double>::infinity();
    }
    return rec;
}

SolutionState run_to(const ProblemSpec& problem, const RadialGrid& grid, double t_end,
                     double cfl) {
    Stepper stepper(problem, grid);
    SolutionState state = initialize_state(problem, grid);
    const double dt = cfl * grid.h;
    while (state.t < t_end - 1e-12) {
        const double dt_step = std::min(dt, t_end - state.t);
        if (!stepper.step(state, dt_step))
            throw std::runtime_error("run_to: non-finite state at t=" + std::to_string(state.t));
    }
    return state;
}

double positivity_check(const ProblemSpec& problem, const RadialGrid& grid,
                        const RunOptions& options) {
    if (!problem.data.nonneg)
        throw std::invalid_argument("positivity_check: data must be flagged nonnegative");
    if (!problem.nonlinearity || !problem.nonlinearity->nonnegative_on_nonneg())
        throw std::invalid_argument(
            "positivity_check: nonlinearity must map nonnegative states to nonnegative values");

    RunRecord rec;
    (void)solve_lifespan(problem, grid, options, &rec);
    const double horizon =
        rec.status == RunStatus::blew_up ? 0.9 * rec.T_num : options.t_max;

    double mn = 0.0;
    for (std::size_t i = 0; i < rec.times.size(); ++i)
        if (rec.times[i] <= horizon) mn = std::min(mn, rec.min_u[i]);
    return mn;
}

namespace {

// Average fine-grid cell pairs down to the coarse cell layout.
std::vector<double> restrict_to_coarse(const std::vector<double>& fine) {
    std::vector<double> coarse(fine.size() / 2);
    for (std::size_t j = 0; j < coarse.size(); ++j)
        coarse[j] = 0.5 * (fine[2 * j] + fine[2 * j + 1]);
    return coarse;
}

double weighted_l2(const std::vector<double>& a, const std::vector<double>& b,
                   const RadialGrid& grid, int n) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d * std::pow(grid.r_center(int(j)), double(n - 1)) * grid.h;
    }
    return std::sqrt(s);
}

} // namespace

double convergence_order(const ProblemSpec& problem, const RadialGrid& grid, double t_probe,
                         const RunOptions& options) {
    if (!(t_probe > 0.0)) throw std::invalid_argument("convergence_order: t_probe must be > 0");

    // Probe the coarse run first: reject blow-up within 10% of t_probe and
    // over-threshold amplitudes at the probe time.
    {
        RunOptions probe = options;
        probe.t_max = 1.12 * t_probe;
        RunRecord rec;
        const MarchOutcome o = march(problem, grid, probe, &rec);
        if (o.status == RunStatus::blew_up && o.T_num <= 1.1 * t_probe)
            throw std::invalid_argument("convergence_order: t_probe within 10% of blow-up");
        if (o.status == RunStatus::unstable)
            throw std::runtime_error("convergence_order: coarse run unstable");
        double max_at_probe = 0.0;
        for (std::size_t i = 0; i < rec.times.size(); ++i)
            if (rec.times[i] <= t_probe) max_at_probe = rec.max_abs_u[i];
        if (max_at_probe > 0.1 * options.blow_threshold)
            throw std::invalid_argument("convergence_order: amplitude too close to threshold");
    }

    const RadialGrid g2{grid.h * 0.5, grid.cells * 2};
    const RadialGrid g4{grid.h * 0.25, grid.cells * 4};
    const SolutionState s1 = run_to(problem, grid, t_probe, options.cfl);
    const SolutionState s2 = run_to(problem, g2, t_probe, options.cfl);
    const SolutionState s4 = run_to(problem, g4, t_probe, options.cfl);

    const std::vector<double> u2 = restrict_to_coarse(s2.u);
    const std::vector<double> u4 = restrict_to_coarse(restrict_to_coarse(s4.u));

    const double d1 = weighted_l2(s1.u, u2, grid, problem.n);
    const double d2 = weighted_l2(u2, u4, grid, problem.n);
    double scale = 0.0;
    for (const double x : s1.u) scale = std::max(scale, std::fabs(x));
    if (d1 < 1e-13 * std::max(1.0, scale) || d2 <= 0.0)
        throw std::invalid_argument("convergence_order: degenerate (zero) solution");
    return std::log2(d1 / d2);
}

} // namespace blowup::solver

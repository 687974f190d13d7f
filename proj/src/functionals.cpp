#include "blowup/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blowup::functionals {

double mass_functional(const solver::SolutionState& state, const solver::RadialGrid& grid,
                       int n) {
    const double sphere = special::unit_sphere_area(n);
    const double e = double(n - 1);
    double sum = 0.0;
    for (int j = 0; j < grid.cells; ++j)
        sum += state.u[j] * std::pow(grid.r_center(j), e);
    return sphere * grid.h * sum;
}

double weighted_velocity(const solver::SolutionState& state, const solver::RadialGrid& grid,
                         int n, const special::Phi1Evaluator& phi) {
    const double sphere = special::unit_sphere_area(n);
    const double e = double(n - 1);
    const double decay = std::exp(-state.t);
    double sum = 0.0;
    for (int j = 0; j < grid.cells; ++j)
        sum += phi.phi1(grid.r_center(j)) * decay * state.v[j] *
               std::pow(grid.r_center(j), e);
    return sphere * grid.h * sum;
}

namespace {

double horizon_of(const solver::RunRecord& rec) {
    if (rec.status == solver::RunStatus::blew_up) return 0.9 * rec.T_num;
    return rec.times.empty() ? 0.0 : rec.times.back();
}

MonitorReport finalize(MonitorReport rep) {
    if (rep.lhs.empty()) throw std::invalid_argument(rep.name + ": no samples in window");
    double margin = rep.lhs[0] - rep.rhs[0];
    double fitted = rep.lhs[0];
    for (std::size_t i = 0; i < rep.lhs.size(); ++i) {
        margin = std::min(margin, rep.lhs[i] - rep.rhs[i]);
        fitted = std::min(fitted, rep.lhs[i]);
    }
    rep.min_margin = margin;
    rep.fitted_constant = fitted;
    return rep;
}

// Index of the |u_t|^p term (u exponent 0) in the recorded nonlinearity.
std::size_t velocity_term_index(const solver::RunRecord& rec, double p) {
    for (std::size_t i = 0; i < rec.terms.size(); ++i)
        if (rec.terms[i].u_exponent == 0.0 && rec.terms[i].ut_exponent == p &&
            rec.terms[i].coefficient > 0.0)
            return i;
    throw std::invalid_argument("run has no |u_t|^p nonlinearity term");
}

} // namespace

MonitorReport monitor_cone_pointwise(const solver::RunRecord& rec) {
    if (rec.n != 2)
        throw std::invalid_argument("monitor_cone_pointwise: defined for n = 2 runs");
    const double horizon = horizon_of(rec);

    MonitorReport rep;
    rep.name = "cone_pointwise";
    for (const auto& snap : rec.snapshots) {
        if (snap.t < 0.5 || snap.t > horizon) continue;
        double band_min = std::numeric_limits<double>::infinity();
        bool any = false;
        for (std::size_t j = 0; j < snap.u.size(); ++j) {
            const double r = (j + 0.5) * rec.h;
            const double offset = r - snap.t;
            if (offset < 0.25 || offset > 0.75) continue;
            const double scale = std::sqrt(r) / rec.epsilon;
            band_min = std::min({band_min, snap.u[j] * scale, snap.v[j] * scale});
            any = true;
        }
        if (!any) continue;
        rep.times.push_back(snap.t);
        rep.lhs.push_back(band_min);
        rep.rhs.push_back(0.0);
    }
    if (rep.lhs.empty())
        throw std::invalid_argument("monitor_cone_pointwise: band empty (run too short)");
    return finalize(std::move(rep));
}

MonitorReport monitor_mass_growth(const solver::RunRecord& rec, double eps_power,
                                  double t_power) {
    const double horizon = horizon_of(rec);
    MonitorReport rep;
    rep.name = "mass_growth";
    const double eps_scale = std::pow(rec.epsilon, eps_power);
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const double t = rec.times[i];
        if (t < 1.0 || t > horizon) continue;
        rep.times.push_back(t);
        rep.lhs.push_back(rec.mass[i] / (eps_scale * std::pow(1.0 + t, t_power)));
        rep.rhs.push_back(0.0);
    }
    return finalize(std::move(rep));
}

MonitorReport monitor_ode_ratio(const solver::RunRecord& rec, double alpha, double beta) {
    const double horizon = horizon_of(rec);
    MonitorReport rep;
    rep.name = "ode_ratio";
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const double t = rec.times[i];
        if (t < 1.0 || t > horizon) continue;
        if (!(rec.mass[i] > 0.0))
            throw std::invalid_argument("monitor_ode_ratio: mass not positive (degenerate run)");
        rep.times.push_back(t);
        rep.lhs.push_back(rec.source_mass[i] * std::pow(1.0 + t, alpha) /
                          std::pow(rec.mass[i], beta));
        rep.rhs.push_back(0.0);
    }
    return finalize(std::move(rep));
}

MonitorReport monitor_velocity_lp(const solver::RunRecord& rec, double p, int n) {
    const std::size_t ti = velocity_term_index(rec, p);
    const double coeff = rec.terms[ti].coefficient;
    const double horizon = horizon_of(rec);
    const double expo = 0.5 * (n - 1) * (p - 2.0);
    const double eps_scale = std::pow(rec.epsilon, p);

    MonitorReport rep;
    rep.name = "velocity_lp";
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const double t = rec.times[i];
        if (t > horizon) continue;
        const double integral = rec.term_mass[ti][i] / coeff;
        rep.times.push_back(t);
        rep.lhs.push_back(integral * std::pow(1.0 + t, expo) / eps_scale);
        rep.rhs.push_back(0.0);
    }
    return finalize(std::move(rep));
}

MonitorReport monitor_weighted_velocity(const solver::RunRecord& rec) {
    if (rec.weighted_velocity.empty())
        throw std::invalid_argument(
            "monitor_weighted_velocity: run recorded no psi1-weighted series");
    const double horizon = horizon_of(rec);
    MonitorReport rep;
    rep.name = "weighted_velocity";
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        if (rec.times[i] > horizon) continue;
        rep.times.push_back(rec.times[i]);
        rep.lhs.push_back(rec.weighted_velocity[i] / rec.epsilon);
        rep.rhs.push_back(0.0);
    }
    return finalize(std::move(rep));
}

MonitorReport monitor_holder_chain(const solver::RunRecord& rec, double p) {
    if (rec.weighted_velocity.empty() || rec.psi_lp.empty())
        throw std::invalid_argument("monitor_holder_chain: run recorded no psi1 series");
    const std::size_t ti = velocity_term_index(rec, p);
    const double coeff = rec.terms[ti].coefficient;
    const double pprime = p / (p - 1.0);
    const double horizon = horizon_of(rec);

    MonitorReport rep;
    rep.name = "holder_chain";
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        if (rec.times[i] > horizon) continue;
        const double ut_p = rec.term_mass[ti][i] / coeff;
        rep.times.push_back(rec.times[i]);
        rep.lhs.push_back(std::pow(ut_p, 1.0 / p) * std::pow(rec.psi_lp[i], 1.0 / pprime));
        rep.rhs.push_back(rec.weighted_velocity[i]);
    }
    return finalize(std::move(rep));
}

double identity_residual(const solver::RunRecord& rec, double window_end) {
    double scale = 0.0;
    for (std::size_t i = 0; i < rec.times.size(); ++i)
        if (rec.times[i] <= window_end)
            scale = std::max(scale, std::fabs(rec.source_mass[i]));
    if (scale == 0.0) throw std::invalid_argument("identity_residual: degenerate run");

    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < rec.times.size(); ++i) {
        if (rec.times[i + 1] > window_end) break;
        const double d1 = rec.times[i] - rec.times[i - 1];
        const double d2 = rec.times[i + 1] - rec.times[i];
        if (std::fabs(d1 - d2) > 1e-9 * d1) continue; // skip non-uniform triples
        const double second =
            (rec.mass[i + 1] - 2.0 * rec.mass[i] + rec.mass[i - 1]) / (d1 * d2);
        worst = std::max(worst, std::fabs(second - rec.source_mass[i]) / scale);
    }
    return worst;
}

// --- exterior Picard oracle -------------------------------------------------

PicardSolution::PicardSolution(const solver::ProblemSpec& problem,
                               const PicardOptions& options) {
    if (problem.n != 2)
        throw std::invalid_argument("dalembert_picard: exterior reduction is the n = 2 form");
    if (!(options.t_end > 0.0 && options.t_end <= 1.0))
        throw std::invalid_argument("dalembert_picard: t_end must lie in (0, 1]");
    if (!(problem.data.epsilon > 0.0 && problem.data.epsilon <= 1.0))
        throw std::invalid_argument("dalembert_picard: contraction requires eps <= 1");
    if (problem.data.f_profile)
        throw std::invalid_argument("dalembert_picard: assumes zero displacement data");
    if (!problem.data.g_profile)
        throw std::invalid_argument("dalembert_picard: needs velocity data");

    t_end_ = options.t_end;
    epsilon_ = problem.data.epsilon;
    ni_ = std::max(32, int(std::lround(1.0 / options.dxi)));
    d_ = 1.0 / ni_;
    const int band = int(std::lround(2.0 * t_end_ / d_));
    nm_ = ni_ + band;

    const std::size_t total = std::size_t(ni_ + 1) * (nm_ + 1);
    w_.assign(total, 0.0);
    z_.assign(total, 0.0);
    lin_.assign(total, 0.0);
    lin_z_.assign(total, 0.0);

    // G(s) = (1/2) sqrt(s) g(s) tabulated at substep d/16 with a cumulative
    // trapezoid for int_0^x G.
    const int sub = 16;
    const double ds = d_ / sub;
    const int gn = ni_ * sub;
    std::vector<double> gval(gn + 1), gcum(gn + 1, 0.0);
    for (int k = 0; k <= gn; ++k) {
        const double s = k * ds;
        gval[k] = s >= 1.0 ? 0.0 : 0.5 * std::sqrt(s) * problem.data.g_profile(s);
    }
    for (int k = 1; k <= gn; ++k) gcum[k] = gcum[k - 1] + 0.5 * ds * (gval[k - 1] + gval[k]);

    auto G_at = [&](int lattice_index) {
        const int k = std::min(lattice_index * sub, gn);
        return gval[k];
    };
    auto Gcum_at = [&](int lattice_index) {
        const int k = std::min(lattice_index * sub, gn);
        return gcum[k];
    };

    for (int i = 0; i <= ni_; ++i) {
        const int m_hi = std::min(nm_, i + band);
        for (int m = i; m <= m_hi; ++m) {
            lin_[idx(i, m)] = epsilon_ * (Gcum_at(m) - Gcum_at(i));
            lin_z_[idx(i, m)] = epsilon_ * (G_at(m) + G_at(i));
        }
    }

    // Picard iteration. A = w / lambda^2 carries the 2-D mass kernel,
    // B = sqrt(lambda) F(u, u_t) the nonlinearity; both integrate over the
    // staircase {xi <= xi' <= eta' <= eta} with the 1/2 Jacobian of
    // characteristic coordinates already folded into the 1/16, 1/4 factors.
    std::vector<double> A(total, 0.0), B(total, 0.0), colA(total, 0.0), colB(total, 0.0);
    std::vector<double> w_next(total, 0.0), z_next(total, 0.0);

    if (!options.start_from_zero) {
        w_ = lin_;
        z_ = lin_z_;
    }

    const int iter_target =
        options.iterations_override > 0 ? options.iterations_override : options.max_iterations;

    for (int it = 0; it < iter_target; ++it) {
        for (int i = 0; i <= ni_; ++i) {
            const int m_hi = std::min(nm_, i + band);
            for (int m = i; m <= m_hi; ++m) {
                const double lambda = 0.5 * (i + m) * d_;
                const std::size_t id = idx(i, m);
                if (lambda <= 0.0) {
                    A[id] = B[id] = 0.0;
                    continue;
                }
                A[id] = w_[id] / (lambda * lambda);
                if (problem.nonlinearity) {
                    const double sq = std::sqrt(lambda);
                    B[id] = sq * (*problem.nonlinearity)(w_[id] / sq, z_[id] / sq);
                } else {
                    B[id] = 0.0;
                }
            }
        }

        // colX(i, m) = int_{xi_i}^{min(eta_m, 1)} X(xi', eta_m) dxi'.
        for (int m = 0; m <= nm_; ++m) {
            const int top = std::min(m, ni_);
            colA[idx(top, m)] = 0.0;
            colB[idx(top, m)] = 0.0;
            for (int i = top - 1; i >= std::max(0, m - band); --i) {
                colA[idx(i, m)] =
                    colA[idx(i + 1, m)] + 0.5 * d_ * (A[idx(i, m)] + A[idx(i + 1, m)]);
                colB[idx(i, m)] =
                    colB[idx(i + 1, m)] + 0.5 * d_ * (B[idx(i, m)] + B[idx(i + 1, m)]);
            }
        }

        double sup_diff = 0.0;
        for (int i = 0; i <= ni_; ++i) {
            const int m_hi = std::min(nm_, i + band);
            double SA = 0.0, SB = 0.0, rowA = 0.0, rowB = 0.0;
            for (int m = i; m <= m_hi; ++m) {
                if (m > i) {
                    SA += 0.5 * d_ * (colA[idx(i, m - 1)] + colA[idx(i, m)]);
                    SB += 0.5 * d_ * (colB[idx(i, m - 1)] + colB[idx(i, m)]);
                    rowA += 0.5 * d_ * (A[idx(i, m - 1)] + A[idx(i, m)]);
                    rowB += 0.5 * d_ * (B[idx(i, m - 1)] + B[idx(i, m)]);
                }
                const std::size_t id = idx(i, m);
                w_next[id] = lin_[id] + SA / 16.0 + SB / 4.0;
                z_next[id] = lin_z_[id] + (colA[id] + rowA) / 16.0 + (colB[id] + rowB) / 4.0;
                sup_diff = std::max(sup_diff, std::fabs(w_next[id] - w_[id]));
            }
        }
        w_.swap(w_next);
        z_.swap(z_next);
        ++iterations_;
        sup_diffs_.push_back(sup_diff);

        if (options.iterations_override > 0) continue;
        if (sup_diff < options.tol) return;
        const std::size_t k = sup_diffs_.size();
        if (k >= 2 && sup_diffs_[k - 1] >= sup_diffs_[k - 2] && sup_diffs_[k - 1] > options.tol)
            throw std::runtime_error(
                "dalembert_picard: iteration not contracting (t_end too large)");
    }
    if (options.iterations_override == 0)
        throw std::runtime_error("dalembert_picard: no convergence within max_iterations");
}

double PicardSolution::eval(const std::vector<double>& grid_vals, double xi, double eta) const {
    if (xi >= 1.0) return 0.0;
    if (xi < 0.0 || eta < xi || eta - xi > 2.0 * t_end_ + 1e-12)
        throw std::invalid_argument("PicardSolution: point outside the exterior lattice");
    const double fi = xi / d_;
    const double fm = eta / d_;
    const int i0 = std::min(int(fi), ni_ - 1);
    const int m0 = std::min(int(fm), nm_ - 1);
    const double ax = fi - i0, am = fm - m0;
    auto at = [&](int i, int m) { return grid_vals[idx(i, m)]; };
    return (1 - ax) * (1 - am) * at(i0, m0) + ax * (1 - am) * at(i0 + 1, m0) +
           (1 - ax) * am * at(i0, m0 + 1) + ax * am * at(i0 + 1, m0 + 1);
}

double PicardSolution::w(double xi, double eta) const { return eval(w_, xi, eta); }

double PicardSolution::linear_term(double xi, double eta) const { return eval(lin_, xi, eta); }

double PicardSolution::u(double t, double r) const {
    if (!(r > t)) throw std::invalid_argument("PicardSolution: defined on r > t");
    return w(r - t, r + t) / std::sqrt(r);
}

PicardSolution dalembert_picard(const solver::ProblemSpec& problem,
                                const PicardOptions& options) {
    return PicardSolution(problem, options);
}

} // namespace blowup::functionals

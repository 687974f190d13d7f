#include "blowup/odecmp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blowup::odecmp {

void OdeProblem::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("OdeProblem: delta must be > 0");
    if (!(k > 0.0)) throw std::invalid_argument("OdeProblem: k must be > 0");
    if (!(a >= 1.0)) throw std::invalid_argument("OdeProblem: a must be >= 1");
    if (!(beta > 1.0)) throw std::invalid_argument("OdeProblem: beta must be > 1");
    if (!((beta - 1.0) * a > alpha - 2.0))
        throw std::invalid_argument("OdeProblem: needs (beta-1)a > alpha-2");
    if (!(F0 >= delta)) throw std::invalid_argument("OdeProblem: needs F0 >= delta");
    if (!(F0prime >= 0.0)) throw std::invalid_argument("OdeProblem: needs F0prime >= 0");
}

namespace {

// Dormand-Prince 4(5) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct State {
    double w;
    double wp;
};

struct Integration {
    bool hit = false;
    double blow_time = 0.0;
    double final_F = 0.0;
    double min_excess = 0.0;
    long steps = 0;
};

// Single adaptive integration in s = log(1+t).
Integration integrate(const OdeProblem& p, double threshold, double rel_tol, double t_max,
                      double h_init) {
    const double s_max = std::log1p(t_max);
    const double atol = 1e-250;

    auto rhs = [&](double s, const State& y) -> State {
        const double F = p.delta * std::exp(p.a * s) + y.w;
        return {std::exp(s) * y.wp, p.k * std::exp((1.0 - p.alpha) * s) * std::pow(F, p.beta)};
    };

    auto floor_value = [&](double s) { return p.delta * std::exp(p.a * s); };

    Integration out;
    double s = 0.0;
    State y{p.F0 - p.delta, p.F0prime - p.a * p.delta};
    out.min_excess = y.w;
    out.final_F = p.F0;
    double h = h_init;

    State k1 = rhs(s, y);
    while (s < s_max) {
        h = std::min(h, s_max - s);

        const State k2 = rhs(s + c2 * h, {y.w + h * a21 * k1.w, y.wp + h * a21 * k1.wp});
        const State k3 = rhs(s + c3 * h, {y.w + h * (a31 * k1.w + a32 * k2.w),
                                          y.wp + h * (a31 * k1.wp + a32 * k2.wp)});
        const State k4 =
            rhs(s + c4 * h, {y.w + h * (a41 * k1.w + a42 * k2.w + a43 * k3.w),
                             y.wp + h * (a41 * k1.wp + a42 * k2.wp + a43 * k3.wp)});
        const State k5 =
            rhs(s + c5 * h, {y.w + h * (a51 * k1.w + a52 * k2.w + a53 * k3.w + a54 * k4.w),
                             y.wp + h * (a51 * k1.wp + a52 * k2.wp + a53 * k3.wp + a54 * k4.wp)});
        const State k6 = rhs(
            s + h, {y.w + h * (a61 * k1.w + a62 * k2.w + a63 * k3.w + a64 * k4.w + a65 * k5.w),
                    y.wp + h * (a61 * k1.wp + a62 * k2.wp + a63 * k3.wp + a64 * k4.wp +
                                a65 * k5.wp)});
        const State ynew{y.w + h * (b1 * k1.w + b3 * k3.w + b4 * k4.w + b5 * k5.w + b6 * k6.w),
                         y.wp + h * (b1 * k1.wp + b3 * k3.wp + b4 * k4.wp + b5 * k5.wp +
                                     b6 * k6.wp)};
        const State k7 = rhs(s + h, ynew);

        const double err_w =
            h * (e1 * k1.w + e3 * k3.w + e4 * k4.w + e5 * k5.w + e6 * k6.w + e7 * k7.w);
        const double err_wp =
            h * (e1 * k1.wp + e3 * k3.wp + e4 * k4.wp + e5 * k5.wp + e6 * k6.wp + e7 * k7.wp);
        const double scale_w = atol + rel_tol * std::max(std::fabs(y.w), std::fabs(ynew.w));
        const double scale_wp = atol + rel_tol * std::max(std::fabs(y.wp), std::fabs(ynew.wp));
        const double err = std::sqrt(0.5 * ((err_w / scale_w) * (err_w / scale_w) +
                                            (err_wp / scale_wp) * (err_wp / scale_wp)));

        const bool finite = std::isfinite(ynew.w) && std::isfinite(ynew.wp) &&
                            std::isfinite(err);

        if (finite && err <= 1.0) {
            s += h;
            y = ynew;
            k1 = k7; // FSAL
            ++out.steps;
            out.min_excess = std::min(out.min_excess, y.w);

            const double t = std::expm1(s);
            const double F = floor_value(s) + y.w;
            const double Fp = p.a * p.delta * std::exp((p.a - 1.0) * s) + y.wp;
            out.final_F = F;
            if (F >= threshold && Fp > 0.0) {
                // Local power-law tail: F ~ (T-t)^{-2/(beta-1)} gives
                // T - t = 2F/((beta-1)F').
                const double tail = 2.0 * F / ((p.beta - 1.0) * Fp);
                if (tail <= rel_tol * std::max(1.0, t)) {
                    out.hit = true;
                    out.blow_time = t + tail;
                    return out;
                }
            }
        }

        double factor = 5.0;
        if (finite && err > 0.0) factor = 0.9 * std::pow(err, -0.2);
        if (!finite) factor = 0.1;
        h *= std::clamp(factor, 0.1, 5.0);

        if (h < std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(s)) * 4.0) {
            // Step collapse at the vertical asymptote: s cannot be advanced
            // any closer to the singularity in double precision.
            const double t = std::expm1(s);
            const double F = floor_value(s) + y.w;
            const double Fp = p.a * p.delta * std::exp((p.a - 1.0) * s) + y.wp;
            out.final_F = F;
            if (F >= threshold && Fp > 0.0) {
                out.hit = true;
                out.blow_time = t + 2.0 * F / ((p.beta - 1.0) * Fp);
            }
            return out;
        }
    }
    return out;
}

} // namespace

BlowupResult integrate_blowup(const OdeProblem& prob, double threshold, double rel_tol,
                              double t_max) {
    prob.validate();
    if (!(threshold >= 1e6)) throw std::invalid_argument("integrate_blowup: threshold must be >= 1e6");
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw std::invalid_argument("integrate_blowup: rel_tol must be in (0, 1)");

    const double h0 = 1e-6;
    const Integration primary = integrate(prob, threshold, rel_tol, t_max, h0);

    BlowupResult res;
    res.steps = primary.steps;
    res.final_F = primary.final_F;
    res.min_excess = primary.min_excess;
    if (!primary.hit) {
        res.outcome = OdeOutcome::no_blowup;
        return res;
    }
    res.outcome = OdeOutcome::blew_up;
    res.blow_time = primary.blow_time;

    const Integration check = integrate(prob, threshold, rel_tol * 0.1, t_max, h0 * 0.5);
    res.certified = check.hit &&
                    std::fabs(primary.blow_time - check.blow_time) <
                        0.01 * std::fabs(check.blow_time);
    return res;
}

double lemma_exponent(double a, double alpha, double beta) {
    const double denom = (beta - 1.0) * a - alpha + 2.0;
    if (!(beta > 1.0)) throw std::invalid_argument("lemma_exponent: beta must be > 1");
    if (!(denom > 0.0)) throw std::domain_error("lemma_exponent: (beta-1)a - alpha + 2 <= 0");
    return (beta - 1.0) / denom;
}

std::vector<std::pair<double, BlowupResult>> delta_sweep(const OdeProblem& tmpl,
                                                         const std::vector<double>& deltas,
                                                         double threshold, double rel_tol) {
    if (deltas.size() < 4)
        throw std::invalid_argument("delta_sweep: need at least 4 deltas for a fit");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw std::invalid_argument("delta_sweep: deltas must be > 0");
        if (i > 0 && !(deltas[i] < deltas[i - 1]))
            throw std::invalid_argument("delta_sweep: deltas must be strictly decreasing");
    }

    std::vector<std::pair<double, BlowupResult>> out;
    out.reserve(deltas.size());
    for (const double d : deltas) {
        OdeProblem p = tmpl;
        p.delta = d;
        p.F0 = d;
        p.F0prime = tmpl.a * d;
        BlowupResult r = integrate_blowup(p, threshold, rel_tol);
        if (r.outcome != OdeOutcome::blew_up)
            throw std::runtime_error("delta_sweep: no blow-up observed for delta=" +
                                     std::to_string(d));
        if (!r.certified)
            throw std::runtime_error("delta_sweep: uncertified blow-up for delta=" +
                                     std::to_string(d));
        out.emplace_back(d, r);
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i].second.blow_time > out[i - 1].second.blow_time))
            throw std::runtime_error("delta_sweep: blow_time not decreasing in delta");
    return out;
}

} // namespace blowup::odecmp

#pragma once

#include <utility>
#include <vector>

// Blow-up integration for the comparison inequality F'' >= k (1+t)^{-alpha}
// F^beta under the standing growth hypothesis F >= delta (1+t)^a, and the
// closed-form lifespan exponent it implies.
namespace blowup::odecmp {

struct OdeProblem {
    double delta = 1.0;   // > 0
    double k = 1.0;       // > 0
    double a = 1.0;       // >= 1
    double alpha = 0.0;
    double beta = 2.0;    // > 1, with (beta-1)a > alpha-2
    double F0 = 1.0;      // >= delta
    double F0prime = 0.0; // >= 0

    // Throws std::invalid_argument when the hypotheses fail.
    void validate() const;
};

enum class OdeOutcome { blew_up, no_blowup };

struct BlowupResult {
    OdeOutcome outcome = OdeOutcome::no_blowup;
    double blow_time = 0.0;
    bool certified = false;
    long steps = 0;
    double final_F = 0.0;
    // min over the trajectory of F(t) - delta (1+t)^a; >= 0 means the growth
    // hypothesis held along the whole run, not just at t = 0.
    double min_excess = 0.0;
};

// Integrates F(t) = delta (1+t)^a + w(t), w'' = k (1+t)^{-alpha} F^beta,
// w(0) = F0 - delta, w'(0) = F0prime - a delta, with an embedded
// Dormand-Prince 4(5) pair stepping in s = log(1+t). The decomposition keeps
// the growth hypothesis active as the ODE state approaches the singularity;
// integrating the bare equality ODE from minimal data does not blow up at
// all once beta < alpha - 1 (the source along linear growth is integrable).
//
// Declares blow-up at the first accepted time where F >= threshold and the
// local asymptotic tail 2F/((beta-1)F') has shrunk below rel_tol*max(1,t);
// blow_time includes that tail, so it approximates the singularity time
// itself. A fixed sup-threshold alone is crossed by the polynomial floor
// delta (1+t)^a long before the singularity for small delta, which would
// measure the floor exponent instead of the lemma scaling.
//
// certified is set by rerunning at rel_tol/10 with a halved initial step and
// requiring agreement within 1%.
BlowupResult integrate_blowup(const OdeProblem& prob, double threshold, double rel_tol,
                              double t_max = 1e15);

// (beta-1) / ((beta-1)a - alpha + 2); throws when the denominator is <= 0.
double lemma_exponent(double a, double alpha, double beta);

// One certified integrate_blowup per delta, instantiated with F0 = delta,
// F0prime = a*delta. Requires >= 4 strictly decreasing positive deltas;
// asserts blow_time strictly increasing along the sweep.
std::vector<std::pair<double, BlowupResult>> delta_sweep(const OdeProblem& tmpl,
                                                         const std::vector<double>& deltas,
                                                         double threshold, double rel_tol);

} // namespace blowup::odecmp

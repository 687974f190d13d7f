#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "blowup/model.hpp"
#include "blowup/odecmp.hpp"

using namespace blowup::odecmp;

namespace {

double loglog_slope(const std::vector<std::pair<double, BlowupResult>>& runs) {
    const int n = int(runs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [d, r] : runs) {
        const double x = std::log(d), y = std::log(r.blow_time);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (sxy - sx * sy / n) / (sxx - sx * sx / n);
}

} // namespace

TEST_CASE("problem validation enforces the standing hypotheses") {
    OdeProblem bad{1.0, 1.0, 1.0, 6.0, 2.0, 1.0, 1.0}; // (beta-1)a = 1 <= alpha-2 = 4
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS((OdeProblem{1.0, 1.0, 1.5, 6.0, 4.0, 0.5, 1.0}.validate()),
                    std::invalid_argument); // F0 < delta
    CHECK_THROWS_AS((OdeProblem{0.0, 1.0, 1.5, 6.0, 4.0, 1.0, 1.0}.validate()),
                    std::invalid_argument);
    OdeProblem good{1.0, 1.0, 1.5, 6.0, 4.0, 1.0, 1.5};
    CHECK_NOTHROW(good.validate());
}

TEST_CASE("closed-form oracle: F'' = F^2 from (6, 12) blows up at t = 1") {
    // F(t) = 6/(1-t)^2 solves F'' = F^2 with F(0) = 6, F'(0) = 12.
    OdeProblem prob{1.0, 1.0, 1.0, 0.0, 2.0, 6.0, 12.0};
    const auto res = integrate_blowup(prob, 1e12, 1e-5);
    REQUIRE(res.outcome == OdeOutcome::blew_up);
    CHECK(res.certified);
    CHECK(std::fabs(res.blow_time - 1.0) <= 1e-5);
    CHECK(res.final_F >= 1e12);
    CHECK(res.steps > 0);

    const auto tight = integrate_blowup(prob, 1e12, 1e-9);
    CHECK(std::fabs(tight.blow_time - 1.0) <= 1e-7);
}

TEST_CASE("reference problem blow time frozen against the rel_tol 1e-12 oracle") {
    // delta = k = 1, a = 3/2, alpha = 6, beta = 4, F0 = 1, F0' = 3/2.
    OdeProblem prob{1.0, 1.0, 1.5, 6.0, 4.0, 1.0, 1.5};
    const double reference = 3.4748435543765; // self-refinement at rel_tol 1e-12
    const auto res = integrate_blowup(prob, 1e6, 1e-9);
    REQUIRE(res.outcome == OdeOutcome::blew_up);
    CHECK(res.certified);
    CHECK(res.blow_time == doctest::Approx(reference).epsilon(1e-6));
}

TEST_CASE("no blow-up within t_max reported explicitly") {
    OdeProblem prob{0.01, 1.0, 1.5, 6.0, 4.0, 0.01, 0.015};
    const auto res = integrate_blowup(prob, 1e6, 1e-8, /*t_max=*/10.0);
    CHECK(res.outcome == OdeOutcome::no_blowup);
    CHECK(res.final_F < 1e6);
}

TEST_CASE("lemma exponent closed form and composition") {
    CHECK(blowup::odecmp::lemma_exponent(1.5, 6.0, 4.0) == doctest::Approx(6.0).epsilon(1e-15));
    // delta = eps^3 turns the delta exponent 6 into the eps exponent 18.
    CHECK(3.0 * blowup::odecmp::lemma_exponent(1.5, 6.0, 4.0) ==
          doctest::Approx(18.0).epsilon(1e-15));
    CHECK_THROWS_AS(blowup::odecmp::lemma_exponent(1.0, 6.0, 2.0), std::domain_error);
}

TEST_CASE("lemma parameters reproduce the combined-nonlinearity exponent") {
    for (const auto& [n, p, q] : std::vector<std::tuple<int, double, double>>{
             {2, 3.0, 4.0}, {3, 2.1, 2.5}, {2, 2.5, 3.0}, {4, 1.8, 2.1}}) {
        const double a = 2.0 - 0.5 * (n - 1) * (p - 2.0);
        const double alpha = n * (q - 1.0);
        const double expo = p * blowup::odecmp::lemma_exponent(a, alpha, q);
        CHECK(expo == doctest::Approx(blowup::model::predicted_exponent(n, p, q)).epsilon(1e-12));
    }
}

TEST_CASE("delta sweep recovers the lemma scaling for (3/2, 6, 4)") {
    OdeProblem tmpl{1.0, 1.0, 1.5, 6.0, 4.0, 1.0, 1.5};
    const std::vector<double> deltas{0.1, 0.0631, 0.0398, 0.0251, 0.0158, 0.01};
    const auto runs = delta_sweep(tmpl, deltas, 1e6, 1e-9);
    REQUIRE(runs.size() == deltas.size());
    for (const auto& [d, r] : runs) {
        CHECK(r.certified);
        CHECK(r.min_excess >= 0.0); // growth hypothesis held along the trajectory
    }
    const double slope = loglog_slope(runs);
    CHECK(slope >= -6.6);
    CHECK(slope <= -5.4);
}

TEST_CASE("delta sweep scaling sanity for (1, 0, 2)") {
    OdeProblem tmpl{1.0, 1.0, 1.0, 0.0, 2.0, 1.0, 1.0};
    std::vector<double> deltas;
    for (int i = 0; i < 6; ++i) deltas.push_back(1e-4 * std::pow(10.0, -i / 5.0));
    const auto runs = delta_sweep(tmpl, deltas, 1e6, 1e-9);
    const double target = -1.0 / 3.0;
    const double slope = loglog_slope(runs);
    CHECK(std::fabs(slope - target) <= 0.1 * std::fabs(target));
}

TEST_CASE("blow time decreases in delta, k, and F0") {
    OdeProblem base{0.5, 1.0, 1.5, 6.0, 4.0, 0.5, 0.75};
    const auto T = [&](OdeProblem p) {
        const auto r = integrate_blowup(p, 1e6, 1e-8);
        REQUIRE(r.outcome == OdeOutcome::blew_up);
        return r.blow_time;
    };
    const double t0 = T(base);

    OdeProblem bigger_delta = base;
    bigger_delta.delta = 0.6;
    bigger_delta.F0 = 0.6;
    bigger_delta.F0prime = 0.9;
    CHECK(T(bigger_delta) < t0);

    OdeProblem bigger_k = base;
    bigger_k.k = 2.0;
    CHECK(T(bigger_k) < t0);

    OdeProblem bigger_F0 = base;
    bigger_F0.F0 = 1.0;
    CHECK(T(bigger_F0) < t0);
}

TEST_CASE("delta sweep input validation") {
    OdeProblem tmpl{1.0, 1.0, 1.5, 6.0, 4.0, 1.0, 1.5};
    CHECK_THROWS_AS(delta_sweep(tmpl, {0.1}, 1e6, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(delta_sweep(tmpl, {0.1, 0.2, 0.05, 0.01}, 1e6, 1e-8),
                    std::invalid_argument);
    CHECK_THROWS_AS(delta_sweep(tmpl, {0.1, 0.05, -0.02, 0.01}, 1e6, 1e-8),
                    std::invalid_argument);
}

TEST_CASE("integrate_blowup validates threshold and tolerance") {
    OdeProblem prob{1.0, 1.0, 1.5, 6.0, 4.0, 1.0, 1.5};
    CHECK_THROWS_AS(integrate_blowup(prob, 1e5, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(integrate_blowup(prob, 1e6, 0.0), std::invalid_argument);
}

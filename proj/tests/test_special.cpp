#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "blowup/special.hpp"

using namespace blowup::special;
using std::numbers::pi;

namespace {

// Series oracle for the planar case: 2 pi sum_m (r/2)^{2m} / (m!)^2.
double phi1_series_n2(double r) {
    double term = 1.0, sum = 1.0;
    const double x = 0.25 * r * r;
    for (int m = 1; m < 400; ++m) {
        term *= x / (double(m) * m);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return 2.0 * pi * sum;
}

double phi1_closed_n3(double r) { return r == 0.0 ? 4.0 * pi : 4.0 * pi * std::sinh(r) / r; }

} // namespace

TEST_CASE("gauss_legendre sanity") {
    const auto q = gauss_legendre(64);
    double wsum = 0.0, x2 = 0.0, x6 = 0.0;
    for (int i = 0; i < 64; ++i) {
        wsum += q.weights[i];
        x2 += q.weights[i] * q.nodes[i] * q.nodes[i];
        x6 += q.weights[i] * std::pow(q.nodes[i], 6.0);
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(x2 == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK(x6 == doctest::Approx(2.0 / 7).epsilon(1e-13));
}

TEST_CASE("unit sphere areas") {
    CHECK(unit_sphere_area(2) == doctest::Approx(2 * pi).epsilon(1e-15));
    CHECK(unit_sphere_area(3) == doctest::Approx(4 * pi).epsilon(1e-15));
    CHECK(unit_sphere_area(4) == doctest::Approx(2 * pi * pi).epsilon(1e-14));
}

TEST_CASE("phi1 at r = 0 is the sphere area") {
    CHECK(Phi1Evaluator(2).phi1(0.0) == doctest::Approx(2 * pi).epsilon(1e-14));
    CHECK(Phi1Evaluator(3).phi1(0.0) == doctest::Approx(4 * pi).epsilon(1e-14));
    CHECK(Phi1Evaluator(5).phi1(0.0) ==
          doctest::Approx(unit_sphere_area(5)).epsilon(1e-13));
}

TEST_CASE("phi1 matches the closed forms to 1e-10 relative") {
    Phi1Evaluator e2(2), e3(3);
    for (double r : {0.1, 1.0, 5.0, 10.0, 20.0}) {
        CHECK(e2.phi1(r) == doctest::Approx(phi1_series_n2(r)).epsilon(1e-10));
        CHECK(e3.phi1(r) == doctest::Approx(phi1_closed_n3(r)).epsilon(1e-10));
    }
}

TEST_CASE("node doubling changes phi1 by < 1e-12 relative for r <= 20") {
    for (int n : {2, 3, 4, 5}) {
        Phi1Evaluator coarse(n, 256), fine(n, 512);
        for (double r = 0.0; r <= 20.0; r += 2.5) {
            const double a = coarse.phi1(r), b = fine.phi1(r);
            CHECK(std::fabs(a - b) <= 1e-12 * std::fabs(b));
        }
    }
}

TEST_CASE("phi1 positive and strictly increasing") {
    for (int n : {2, 3, 4}) {
        Phi1Evaluator ev(n);
        double prev = ev.phi1(0.0);
        CHECK(prev > 0.0);
        for (double r = 0.05; r <= 30.0; r += 0.05) {
            const double cur = ev.phi1(r);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("phi1 rejects negative radius; constructor validates") {
    Phi1Evaluator ev(2);
    CHECK_THROWS_AS(ev.phi1(-0.5), std::invalid_argument);
    CHECK_THROWS_AS(Phi1Evaluator(1), std::invalid_argument);
    CHECK_THROWS_AS(Phi1Evaluator(2, 63), std::invalid_argument);
    CHECK_THROWS_AS(Phi1Evaluator(2, 30), std::invalid_argument);
}

TEST_CASE("psi1 factorization and closed form") {
    Phi1Evaluator e2(2), e3(3);
    CHECK(e2.psi1(0.0, 0.0) == doctest::Approx(2 * pi).epsilon(1e-14));
    for (double r : {0.0, 1.3, 6.0})
        for (double t : {0.0, 0.7, 2.0})
            CHECK(e2.psi1(r, t + 1.0) ==
                  doctest::Approx(e2.psi1(r, t) * std::exp(-1.0)).epsilon(1e-14));
    CHECK(e3.psi1(1.0, 2.0) ==
          doctest::Approx(4 * pi * std::sinh(1.0) * std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("growth bound ratio bounded with no divergence trend") {
    SUBCASE("n = 2 over [0, 50]") {
        Phi1Evaluator ev(2);
        const auto rep = ev.check_growth_bound(50.0, 1024);
        CHECK(std::isfinite(rep.max_ratio));
        CHECK(rep.monotone_ok);
        const double r25 = ev.phi1(25.0) * std::exp(-25.0) * std::pow(26.0, 0.5);
        const double r50 = ev.phi1(50.0) * std::exp(-50.0) * std::pow(51.0, 0.5);
        CHECK(r50 / r25 <= 1.05);
    }
    SUBCASE("n = 3 ratio tends to 2 pi") {
        Phi1Evaluator ev(3);
        const auto rep = ev.check_growth_bound(50.0, 1024);
        CHECK(rep.monotone_ok);
        CHECK(rep.max_ratio >= 2 * pi);
        CHECK(rep.ratio_at_r_max == doctest::Approx(2 * pi).epsilon(0.05));
    }
    SUBCASE("r_max = 0 rejected") {
        CHECK_THROWS_AS(Phi1Evaluator(2).check_growth_bound(0.0), std::invalid_argument);
    }
}

TEST_CASE("eigen relation residual is O(h^2)") {
    SUBCASE("n = 3 at r = 2") {
        Phi1Evaluator ev(3);
        const double res = ev.eigen_residual(2.0, 1e-3);
        CHECK(res <= 1e-4 * ev.phi1(2.0));
        const double res2 = ev.eigen_residual(2.0, 2e-3);
        CHECK(res2 / res == doctest::Approx(4.0).epsilon(0.2)); // order-2 Richardson ratio
    }
    SUBCASE("n = 2 at r = 1") {
        Phi1Evaluator ev(2);
        const double res = ev.eigen_residual(1.0, 2e-3);
        const double res2 = ev.eigen_residual(1.0, 4e-3);
        CHECK(res <= 1e-3 * ev.phi1(1.0));
        CHECK(res2 / res == doctest::Approx(4.0).epsilon(0.2));
    }
    SUBCASE("r <= h rejected") {
        CHECK_THROWS_AS(Phi1Evaluator(2).eigen_residual(1e-3, 2e-3), std::invalid_argument);
    }
}

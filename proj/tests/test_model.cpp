#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "blowup/model.hpp"

using namespace blowup::model;

TEST_CASE("critical_p0 closed form") {
    CHECK(critical_p0(2) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(critical_p0(3) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(critical_p0(5) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK_THROWS_AS(critical_p0(1), std::invalid_argument);
}

TEST_CASE("strauss_gamma values and roots") {
    // gamma(n, 4/(n-1)+1) = 8/(n-1)
    for (int n = 2; n <= 8; ++n) {
        const double q = 4.0 / (n - 1) + 1.0;
        CHECK(strauss_gamma(n, q) == doctest::Approx(8.0 / (n - 1)).epsilon(1e-12));
    }
    CHECK(strauss_gamma(2, strauss_q0(2)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(strauss_gamma(3, 1.0) == doctest::Approx(-4.0).epsilon(1e-15));
}

TEST_CASE("strauss_q0 closed form and root property") {
    CHECK(strauss_q0(2) == doctest::Approx((3.0 + std::sqrt(17.0)) / 2).epsilon(1e-15));
    CHECK(strauss_q0(3) == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-15));
    for (int n = 2; n <= 12; ++n) {
        const double q0 = strauss_q0(n);
        CHECK(std::fabs(strauss_gamma(n, q0)) <= 1e-12 * (n * q0 * q0 + n * q0 + 2));
    }
}

TEST_CASE("admissible region") {
    CHECK(admissible({2, 3.0, 4.0}) == Admissibility::admissible);
    CHECK(admissible({2, 5.0, 2.0}) == Admissibility::p_out_of_range); // p > 2n/(n-1) = 4
    CHECK(admissible({3, 2.1, 2.5}) == Admissibility::admissible);
    // boundary cases stay strict
    CHECK(admissible({2, 2.0, 2.0}) == Admissibility::p_out_of_range); // p = max(1, 2/(n-1))
    CHECK(admissible({2, 4.0, 2.0}) == Admissibility::admissible);     // p = 2n/(n-1) allowed
    CHECK(admissible({2, 3.0, 5.0}) == Admissibility::q_out_of_range); // q = 4/((n-1)p-2)+1
    CHECK(admissible({3, 2.0, 3.0}) == Admissibility::q_out_of_range); // q = 2n/(n-2) bound
    CHECK(admissible({2, 3.0, 1.0}) == Admissibility::q_out_of_range);
}

TEST_CASE("predicted_exponent") {
    CHECK(predicted_exponent(2, 3.0, 4.0) == 18.0); // exact
    CHECK(predicted_exponent(3, 2.0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(predicted_exponent(2, 4.0, 6.0), std::domain_error);
}

TEST_CASE("admissible implies positive exponent denominator") {
    std::mt19937 rng(20240811u);
    std::uniform_real_distribution<double> up(1.0, 5.0), uq(1.0, 7.0);
    std::uniform_int_distribution<int> un(2, 6);
    int admissible_seen = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        const int n = un(rng);
        const double p = up(rng), q = uq(rng);
        if (admissible({n, p, q}) != Admissibility::admissible) continue;
        ++admissible_seen;
        const double denom = 2 * q + 2 - (n - 1) * p * (q - 1);
        CHECK(denom > 0.0);
    }
    CHECK(admissible_seen > 100);
}

TEST_CASE("witness above both critical exponents") {
    for (int n : {2, 3, 4}) {
        const double p = critical_p0(n) + 1e-3;
        const double q = 4.0 / ((n - 1) * p - 2.0) + 1.0 - 1e-3;
        CHECK(p > critical_p0(n));
        CHECK(q > strauss_q0(n));
        CHECK(admissible({n, p, q}) == Admissibility::admissible);
    }
}

TEST_CASE("nonlinearity spec evaluation") {
    const auto mixed = NonlinearitySpec::u_ut2_plus_u4();
    CHECK(mixed(0.0, 0.0) == 0.0);
    CHECK(mixed(2.0, 3.0) == doctest::Approx(2 * 9 + 16).epsilon(1e-15));
    CHECK(mixed(-2.0, 3.0) == doctest::Approx(-18 + 16).epsilon(1e-15));

    const auto pq = NonlinearitySpec::abs_ut_p_plus_abs_u_q(3.0, 4.0);
    CHECK(pq(-2.0, -3.0) == doctest::Approx(27 + 16).epsilon(1e-15));
    CHECK(pq.nonnegative_on_nonneg());

    CHECK_THROWS_AS(NonlinearitySpec({}), std::invalid_argument);
    CHECK_THROWS_AS(NonlinearitySpec({{1.0, 0.5, 0.5, true, true}}), std::invalid_argument);
    CHECK_THROWS_AS(NonlinearitySpec({{1.0, -1.0, 3.0, true, true}}), std::invalid_argument);
}

TEST_CASE("lifespan catalog: all twelve cells") {
    using K = LifespanOrder::Kind;
    // n = 2 column by column
    CHECK(lifespan_lower_bound(2, 1) == LifespanOrder{K::log_corrected, 0.0});
    CHECK(lifespan_lower_bound(2, 1, {CatalogFlag::mean_free_data}) ==
          LifespanOrder{K::power_law, -1.0});
    CHECK(lifespan_lower_bound(2, 1, {CatalogFlag::no_u2}) == LifespanOrder{K::power_law, -2.0});
    CHECK(lifespan_lower_bound(2, 2) == LifespanOrder{K::power_law, -6.0});
    CHECK(lifespan_lower_bound(2, 2, {CatalogFlag::no_u3}) ==
          LifespanOrder{K::power_law, -18.0});
    CHECK(lifespan_lower_bound(2, 2, {CatalogFlag::no_u3_u4}) ==
          LifespanOrder{K::exp_power, -2.0});
    CHECK(lifespan_lower_bound(2, 3).kind == K::infinite);
    // n = 3
    CHECK(lifespan_lower_bound(3, 1) == LifespanOrder{K::power_law, -2.0});
    CHECK(lifespan_lower_bound(3, 1, {CatalogFlag::no_u2}) == LifespanOrder{K::exp_power, -1.0});
    CHECK(lifespan_lower_bound(3, 2).kind == K::infinite);
    CHECK(lifespan_lower_bound(3, 3).kind == K::infinite);
    // n = 4
    CHECK(lifespan_lower_bound(4, 1) == LifespanOrder{K::exp_power, -2.0});
    CHECK(lifespan_lower_bound(4, 1, {CatalogFlag::no_u2}).kind == K::infinite);
    CHECK(lifespan_lower_bound(4, 2).kind == K::infinite);
    CHECK(lifespan_lower_bound(4, 3).kind == K::infinite);
    // n >= 5 row
    CHECK(lifespan_lower_bound(5, 1).kind == K::infinite);
    CHECK(lifespan_lower_bound(7, 1).kind == K::infinite);
    CHECK(lifespan_lower_bound(5, 2).kind == K::infinite);
    CHECK(lifespan_lower_bound(5, 3).kind == K::infinite);
    // alpha >= 3 collapses
    CHECK(lifespan_lower_bound(2, 7).kind == K::infinite);
}

TEST_CASE("lifespan catalog rejects unknown flag combinations") {
    CHECK_THROWS_AS(lifespan_lower_bound(2, 2, {CatalogFlag::mean_free_data}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        lifespan_lower_bound(2, 1, {CatalogFlag::no_u2, CatalogFlag::mean_free_data}),
        std::invalid_argument);
    CHECK_THROWS_AS(lifespan_lower_bound(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(lifespan_lower_bound(2, 0), std::invalid_argument);
}

TEST_CASE("catalog flag string round trip") {
    for (auto f : {CatalogFlag::mean_free_data, CatalogFlag::no_u2, CatalogFlag::no_u3,
                   CatalogFlag::no_u3_u4})
        CHECK(catalog_flag_from_string(to_string(f)) == f);
    CHECK_THROWS_AS(catalog_flag_from_string("bogus"), std::invalid_argument);
}

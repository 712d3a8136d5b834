#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bv/catalog.hpp"
#include "bv/decompose.hpp"
#include "bv/mollify.hpp"
#include "bv/variation.hpp"
#include "oracles.hpp"

using namespace bv;

TEST_CASE("integral means of simple shapes") {
    SECTION("constants are fixed points") {
        auto f = catalog_get("const", {{"c", 3.5}});
        auto m = integral_mean(f, {0.2, 0.1});
        CHECK(m.domain.a == f.domain.a);
        CHECK(m.domain.b == Catch::Approx(f.domain.b - 0.2).margin(1e-15));
        for (double x : {0.0, 0.31, 0.5, 0.8})
            CHECK(evaluate(m, x) == Catch::Approx(3.5).margin(1e-12));
        CHECK(mean_variation(f, {0.2, 0.1}, {0.0, 0.8}) == Catch::Approx(0.0).margin(1e-12));
    }

    SECTION("lines shift by half the window") {
        auto f = catalog_get("linear", {{"m", 2.0}});
        MeanParams p{0.2, 0.1};
        auto m = integral_mean(f, p);
        std::mt19937 rng(91);
        std::uniform_real_distribution<double> u(0.0, 0.8);
        for (int i = 0; i < 200; ++i) {
            double x = u(rng);
            CHECK(evaluate(m, x) == Catch::Approx(2.0 * x + p.h).margin(1e-10));
        }
        CHECK(mean_variation(f, p, {0.1, 0.7}) == Catch::Approx(2.0 * 0.6).margin(1e-9));
    }

    SECTION("means converge uniformly for continuous input") {
        auto f = catalog_get("sin");
        double prev_sup = std::numeric_limits<double>::infinity();
        for (double h : {0.1, 0.01, 0.001}) {
            auto m = integral_mean(f, {0.25, h});
            double sup = 0.0;
            for (int i = 0; i <= 500; ++i) {
                double x = m.domain.a + m.domain.length() * i / 500.0;
                sup = std::max(sup, std::abs(evaluate(m, x) - evaluate(f, x)));
            }
            CHECK(sup <= h + 1e-9);
            CHECK(sup < prev_sup);
            prev_sup = sup;
        }
    }

    SECTION("means are Lipschitz with constant controlled by the window") {
        auto f = catalog_get("cantor");
        MeanParams p{0.1, 0.05};
        auto m = integral_mean(f, p);
        double lip = 2.0 / p.h; // 2 sup|f| / h with sup|f| = 1
        std::mt19937 rng(92);
        std::uniform_real_distribution<double> u(m.domain.a, m.domain.b);
        for (int i = 0; i < 300; ++i) {
            double x = u(rng), y = u(rng);
            CHECK(std::abs(evaluate(m, y) - evaluate(m, x)) <= lip * std::abs(y - x) + 1e-9);
        }
    }

    SECTION("means are absolutely continuous even when the input is singular") {
        CHECK(classify_ac(integral_mean(catalog_get("sin"), {0.25, 0.05})) ==
              ACVerdict::AbsolutelyContinuous);
        CHECK(classify_ac(integral_mean(catalog_get("cantor"), {0.1, 0.02})) ==
              ACVerdict::AbsolutelyContinuous);
    }
}

TEST_CASE("mean variation sweeps recover the variation on subintervals") {
    SECTION("smooth case") {
        auto f = catalog_get("sin");
        Interval sub{0.0, 2.0 * kPi - 0.25};
        auto sweep = variation_via_means(f, {}, sub);
        REQUIRE(sweep.entries.size() == 6);
        double full = total_variation_exact(f);
        for (const auto& [h, v] : sweep.entries) {
            CHECK(v <= full + 1e-9);
            CHECK(h > 0.0);
        }
        double want = variation_function(f, sub.b);
        CHECK(want == Catch::Approx(4.0 - std::sin(0.25)).margin(1e-12));
        CHECK(sweep.limit == Catch::Approx(want).margin(2e-2));
    }

    SECTION("singular monotone case") {
        auto f = catalog_get("cantor");
        Interval sub{0.0, 0.9};
        auto sweep = variation_via_means(f, {}, sub);
        for (const auto& [h, v] : sweep.entries) CHECK(v <= 1.0 + 1e-9);
        // the staircase climbs to 4/5 by 0.9
        CHECK(sweep.limit == Catch::Approx(0.8).margin(2e-2));
    }

    SECTION("integrable oscillation") {
        auto f = catalog_get("x2_sin_inv", {{"eps", 1e-3}});
        Interval sub{0.0, 0.9};
        auto sweep = variation_via_means(f, {0.032, 0.016, 0.008, 0.004, 0.002}, sub);
        for (std::size_t i = 1; i < sweep.entries.size(); ++i)
            CHECK(sweep.entries[i].second >= sweep.entries[i - 1].second - 1e-9);
        CHECK(sweep.limit == Catch::Approx(variation_function(f, 0.9)).margin(5e-3));
    }

    SECTION("explicit schedules are used verbatim") {
        auto f = catalog_get("sin");
        auto sweep = variation_via_means(f, {0.1, 0.05}, {0.0, 2.0 * kPi - 0.25});
        REQUIRE(sweep.entries.size() == 2);
        CHECK(sweep.entries[0].first == 0.1);
        CHECK(sweep.entries[1].first == 0.05);
        CHECK(sweep.limit == sweep.entries[1].second);
    }
}

TEST_CASE("mean construction rejects what it cannot smooth") {
    CHECK_THROWS_AS(integral_mean(catalog_get("heaviside", {{"c", 0.5}}), {0.2, 0.1}),
                    DiscontinuousInput);
    CHECK_THROWS_AS(integral_mean(catalog_get("spikes", {{"c", 0.5}, {"K", 3}}), {0.2, 0.1}),
                    DiscontinuousInput);
    CHECK_THROWS_AS(integral_mean(catalog_get("x_sin_inv"), {0.2, 0.1}), NotBV);

    auto sine = catalog_get("sin");
    CHECK_THROWS_AS(integral_mean(sine, {0.1, 0.1}), BadParameter);   // h == delta
    CHECK_THROWS_AS(integral_mean(sine, {0.1, -0.01}), BadParameter); // negative h
    CHECK_THROWS_AS(integral_mean(sine, {7.0, 0.1}), BadParameter);   // delta spans the domain
    CHECK_THROWS_AS(mean_variation(sine, {0.25, 0.1}, {0.0, 2.0 * kPi}), DomainError);
    CHECK_THROWS_AS(variation_via_means(sine, {}, {0.0, 2.0 * kPi}), DomainError);
    CHECK_THROWS_AS(variation_via_means(sine, {0.5}, {0.0, 2.0 * kPi - 0.25}), BadParameter);
}

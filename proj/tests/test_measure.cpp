#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bv/catalog.hpp"
#include "bv/decompose.hpp"
#include "bv/measure.hpp"
#include "bv/variation.hpp"
#include "oracles.hpp"

using namespace bv;

namespace {

FunctionRep zero_on(const Interval& dom) {
    return make_step(dom, {dom.a, dom.b}, {0.0}, {0.0, 0.0});
}

FunctionRep one_on(const Interval& dom) {
    return make_piecewise_monotone(dom, {dom.a, dom.b}, [](double) { return 1.0; });
}

double sup_abs(const FunctionRep& f) {
    double s = 0.0;
    for (int i = 0; i <= 2000; ++i)
        s = std::max(s, std::abs(evaluate(f, f.domain.a + f.domain.length() * i / 2000.0)));
    return s;
}

} // namespace

TEST_CASE("derivative measures of the standard shapes") {
    SECTION("a jump becomes a single atom") {
        auto mu = derivative_measure(catalog_get("heaviside", {{"c", 0.3}}));
        REQUIRE(mu.atoms.size() == 1);
        CHECK(mu.atoms[0].first == 0.3);
        CHECK(mu.atoms[0].second == 1.0);
        CHECK(mu.singular.empty());
        CHECK(measure_total_variation(mu) == 1.0);
    }

    SECTION("a ramp has density only") {
        auto ramp = make_piecewise_monotone(
            {0.0, 2.0}, {0.0, 1.0, 2.0}, [](double x) { return x < 1.0 ? x : 1.0; },
            [](double x) { return x < 1.0 ? 1.0 : 0.0; });
        auto mu = derivative_measure(ramp);
        CHECK(mu.atoms.empty());
        CHECK(mu.singular.empty());
        CHECK(measure_total_variation(mu) == Catch::Approx(1.0).margin(1e-9));
        CHECK(cdf(mu, 0.5) == Catch::Approx(0.5).margin(1e-12));
        CHECK(cdf(mu, 1.5) == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("the staircase is one singular component of mass one") {
        auto mu = derivative_measure(catalog_get("cantor"));
        CHECK(mu.atoms.empty());
        REQUIRE(mu.singular.size() == 1);
        CHECK(mu.singular[0].kind == "cantor");
        CHECK(mu.singular[0].mass == Catch::Approx(1.0).margin(1e-12));
        CHECK(measure_total_variation(mu) == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("point spikes carry no mass at all") {
        auto mu = derivative_measure(catalog_get("spikes", {{"c", 0.5}, {"K", 6}}));
        CHECK(mu.atoms.empty());
        CHECK(mu.singular.empty());
        CHECK(measure_total_variation(mu) == 0.0);
    }

    SECTION("oscillation with unbounded variation is refused") {
        CHECK_THROWS_AS(derivative_measure(catalog_get("x_sin_inv")), NotBV);
    }

    SECTION("hand-assembled atomic measure") {
        FiniteSignedMeasure mu{Interval(0.0, 1.0), zero_on({0.0, 1.0}), {{0.3, 2.0}, {0.7, -3.0}},
                               {}};
        CHECK(measure_total_variation(mu) == 5.0);
        CHECK(cdf(mu, 0.3) == 0.0); // atoms enter strictly below x
        CHECK(cdf(mu, 0.5) == 2.0);
        CHECK(cdf(mu, 0.95) == -1.0);
        CHECK_THROWS_AS(cdf(mu, 0.0), DomainError);
        CHECK_THROWS_AS(cdf(mu, 1.0), DomainError);
    }
}

TEST_CASE("measure variation against function variation") {
    struct Case {
        const char* name;
        std::map<std::string, double> params;
        double tol;
    };
    const Case cases[] = {
        {"sin", {}, 1e-8},
        {"linear", {{"m", 2.0}}, 1e-9},
        {"abs", {}, 1e-9},
        {"power", {{"n", 2}}, 1e-9},
        {"xn_family", {{"n", 5}}, 1e-9},
        {"heaviside", {{"c", 0.3}}, 1e-12},
        {"cantor", {}, 1e-12},
        {"x2_sin_inv", {}, 1e-6},
    };
    for (const auto& c : cases) {
        auto f = catalog_get(c.name, c.params);
        auto mu = derivative_measure(f);
        auto jd = detect_jump_data(f);
        double want =
            total_variation_exact(f) - std::abs(jd.start_jump) - std::abs(jd.end_jump);
        INFO(c.name);
        CHECK(measure_total_variation(mu) == Catch::Approx(want).margin(c.tol));
    }

    SECTION("sampled grids agree to their resolution") {
        auto g = to_grid(catalog_get("sin"), 512);
        auto mu = derivative_measure(g);
        CHECK(measure_total_variation(mu) ==
              Catch::Approx(total_variation_exact(g)).margin(1e-3));
    }
}

TEST_CASE("the cdf rebuilds the function from its derivative measure") {
    std::vector<FunctionRep> reps;
    reps.push_back(catalog_get("sin"));
    reps.push_back(catalog_get("heaviside", {{"c", 0.3}}));
    reps.push_back(catalog_get("cantor"));
    reps.push_back(catalog_get("x2_sin_inv", {{"eps", 1e-4}}));
    reps.push_back(to_grid(catalog_get("sin"), 256));
    reps.push_back(make_step({0.0, 1.0}, {0.0, 0.5, 1.0}, {1.0, 3.0}, {1.0, 3.0, 3.0}));

    std::mt19937 rng(101);
    for (const auto& f : reps) {
        auto mu = derivative_measure(f);
        double fa = evaluate(f, f.domain.a);
        std::uniform_real_distribution<double> u(f.domain.a, f.domain.b);
        int checked = 0;
        while (checked < 500) {
            double x = u(rng);
            if (!(x > f.domain.a && x < f.domain.b)) continue;
            bool at_jump = false;
            for (const auto& [loc, w] : mu.atoms) at_jump |= x == loc;
            if (at_jump) continue;
            INFO(f.name << " at " << x);
            CHECK(cdf(mu, x) == Catch::Approx(evaluate(f, x) - fa).margin(1e-8));
            ++checked;
        }
    }

    SECTION("cantor cdf matches the closed-form staircase") {
        auto mu = derivative_measure(catalog_get("cantor", {{"level", 40}}));
        std::mt19937 r2(102);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 200; ++i) {
            double x = u(r2);
            if (!(x > 0.0 && x < 1.0)) continue;
            CHECK(cdf(mu, x) == Catch::Approx(oracle::cantor_limit(x)).margin(1e-8));
        }
        CHECK(cdf(mu, 1.0 / 3.0) == Catch::Approx(0.5).margin(1e-8));
    }
}

TEST_CASE("stieltjes integration through the measure") {
    SECTION("polynomial against polynomial") {
        auto f = catalog_get("linear", {{"m", 1.0}});
        CHECK(stieltjes(f, f) == Catch::Approx(0.5).margin(1e-10));
    }

    SECTION("constant integrand telescopes to the endpoint difference") {
        std::vector<FunctionRep> gs;
        gs.push_back(catalog_get("sin"));
        gs.push_back(catalog_get("heaviside", {{"c", 0.6}}));
        gs.push_back(catalog_get("cantor"));
        gs.push_back(catalog_get("abs"));
        gs.push_back(make_step({0.0, 1.0}, {0.0, 0.5, 1.0}, {1.0, 3.0}, {2.0, 9.0, 3.0}));
        for (const auto& g : gs) {
            double want = evaluate(g, g.domain.b) - evaluate(g, g.domain.a);
            CHECK(stieltjes(one_on(g.domain), g) == Catch::Approx(want).margin(1e-8));
        }
        auto osc = catalog_get("x2_sin_inv");
        double want = evaluate(osc, 1.0) - evaluate(osc, 0.0);
        CHECK(stieltjes(one_on(osc.domain), osc) == Catch::Approx(want).margin(1e-4));
    }

    SECTION("a jump samples the integrand") {
        auto f = catalog_get("xn_family", {{"n", 3}});
        auto g = catalog_get("heaviside", {{"c", 0.4}});
        double direct = oracle::rs_sum([](double x) { return x * x * x; },
                                       [](double x) { return x < 0.4 ? 0.0 : 1.0; }, 0.0, 1.0,
                                       1 << 14);
        CHECK(stieltjes(f, g) == Catch::Approx(0.4 * 0.4 * 0.4).margin(1e-12));
        CHECK(stieltjes(f, g) == Catch::Approx(direct).margin(1e-3));
    }

    SECTION("integration against the cantor measure") {
        auto f = catalog_get("linear", {{"m", 1.0}});
        auto g = catalog_get("cantor");
        double got = stieltjes(f, g, 14);
        CHECK(got == Catch::Approx(0.5).margin(1e-4));
        double direct = oracle::rs_sum([](double x) { return x; }, oracle::cantor_limit, 0.0, 1.0,
                                       1 << 12);
        CHECK(got == Catch::Approx(direct).margin(1e-3));
    }

    SECTION("integration by parts on smooth pairs") {
        struct Pair {
            FunctionRep f, g;
        };
        std::vector<Pair> pairs;
        pairs.push_back({catalog_get("linear", {{"m", 2.0}, {"c", 0.5}}),
                         catalog_get("xn_family", {{"n", 3}})});
        pairs.push_back({catalog_get("sin"), catalog_get("sin_n", {{"n", 2}})});
        pairs.push_back({catalog_get("xn_family", {{"n", 2}}), catalog_get("linear", {{"m", -1.0}})});
        for (const auto& [f, g] : pairs) {
            double lhs = stieltjes(f, g) + stieltjes(g, f);
            double rhs = evaluate(f, f.domain.b) * evaluate(g, g.domain.b) -
                         evaluate(f, f.domain.a) * evaluate(g, g.domain.a);
            CHECK(lhs == Catch::Approx(rhs).margin(1e-8));
        }
    }

    SECTION("duality bound") {
        std::vector<FunctionRep> fs;
        fs.push_back(catalog_get("linear", {{"m", 1.0}}));
        fs.push_back(catalog_get("xn_family", {{"n", 4}}));
        fs.push_back(catalog_get("cantor"));
        std::vector<FunctionRep> gs;
        gs.push_back(catalog_get("heaviside", {{"c", 0.25}}));
        gs.push_back(catalog_get("linear", {{"m", -2.0}, {"c", 1.0}}));
        gs.push_back(catalog_get("cantor"));
        gs.push_back(make_step({0.0, 1.0}, {0.0, 0.5, 1.0}, {1.0, 3.0}, {2.0, 9.0, 3.0}));
        for (const auto& f : fs)
            for (const auto& g : gs) {
                double val = std::abs(stieltjes(f, g));
                CHECK(val <= sup_abs(f) * total_variation_exact(g) + 1e-9);
            }
    }

    SECTION("rejections") {
        auto cont = catalog_get("linear", {{"m", 1.0}});
        CHECK_THROWS_AS(stieltjes(catalog_get("heaviside", {{"c", 0.5}}), cont),
                        DiscontinuousIntegrand);
        CHECK_THROWS_AS(stieltjes(catalog_get("spikes", {{"c", 0.5}, {"K", 2}}), cont),
                        DiscontinuousIntegrand);
        auto unit = one_on({0.0, 1.0});
        CHECK_THROWS_AS(stieltjes(unit, catalog_get("x_sin_inv")), NotBV);
        CHECK_THROWS_AS(stieltjes(catalog_get("sin"), catalog_get("cantor")), DomainError);
        CHECK_THROWS_AS(stieltjes(cont, cont, 99), BadParameter);
    }
}

TEST_CASE("normalization to the zero-at-left right-continuous representative") {
    SECTION("already normalized inputs are recognized") {
        auto h = normalize_nbv(catalog_get("heaviside", {{"c", 0.4}}));
        CHECK(h.already_normalized);
        auto c = normalize_nbv(catalog_get("cantor"));
        CHECK(c.already_normalized);
        auto s = normalize_nbv(catalog_get("sin"));
        CHECK(s.already_normalized);
        for (double x : {0.7, 2.0, 4.5})
            CHECK(evaluate(s.rep, x) == Catch::Approx(std::sin(x)).margin(1e-12));
    }

    SECTION("constants collapse to zero") {
        auto n = normalize_nbv(catalog_get("const", {{"c", 5.0}}));
        CHECK_FALSE(n.already_normalized);
        CHECK(evaluate(n.rep, 0.0) == 0.0);
        CHECK(evaluate(n.rep, 0.62) == 0.0);
        CHECK(total_variation_exact(n.rep) == 0.0);
        CHECK(functional_norm(catalog_get("const", {{"c", 5.0}})) == 0.0);
    }

    SECTION("left-continuous jumps snap to the right limit") {
        auto g = make_step({0.0, 1.0}, {0.0, 0.4, 1.0}, {0.0, 1.0}, {0.0, 0.0, 1.0});
        auto n = normalize_nbv(g);
        CHECK_FALSE(n.already_normalized);
        CHECK(evaluate(n.rep, 0.4) == 1.0);
        CHECK(evaluate(n.rep, 0.0) == 0.0);
        CHECK(evaluate(n.rep, 1.0) == 1.0);
        CHECK(total_variation_exact(n.rep) == 1.0);
    }

    SECTION("removable point values do not change the norm") {
        auto clean = catalog_get("heaviside", {{"c", 0.4}});
        auto odd = make_step({0.0, 1.0}, {0.0, 0.4, 1.0}, {0.0, 1.0}, {0.0, 2.0, 1.0});
        CHECK(total_variation_exact(odd) == 3.0); // the stray value is costly pointwise
        CHECK(functional_norm(odd) == 1.0);       // but invisible to the functional
        CHECK(functional_norm(clean) == 1.0);
        CHECK(functional_norm(odd) == functional_norm(clean));
    }

    SECTION("spikes normalize away entirely") {
        auto g = catalog_get("spikes", {{"c", 0.5}, {"K", 8}});
        auto n = normalize_nbv(g);
        CHECK_FALSE(n.already_normalized);
        CHECK(total_variation_exact(n.rep) == 0.0);
        CHECK(functional_norm(g) == 0.0);
        CHECK(total_variation_exact(g) > 1.9);
    }

    SECTION("the normalized variation never exceeds the original") {
        std::vector<FunctionRep> gs;
        gs.push_back(catalog_get("sin"));
        gs.push_back(catalog_get("abs"));
        gs.push_back(catalog_get("cantor"));
        gs.push_back(catalog_get("heaviside", {{"c", 0.2}}));
        gs.push_back(catalog_get("spikes", {{"c", 0.3}, {"K", 5}}));
        gs.push_back(catalog_get("x2_sin_inv"));
        gs.push_back(make_step({0.0, 1.0}, {0.0, 0.5, 1.0}, {1.0, 3.0}, {2.0, 9.0, 3.0}));
        gs.push_back(to_grid(catalog_get("sin"), 64));
        for (const auto& g : gs) {
            double tg = total_variation_exact(g);
            double tn = total_variation_exact(normalize_nbv(g).rep);
            INFO(g.name);
            CHECK(tn <= tg + 1e-12);
            CHECK(functional_norm(g) == Catch::Approx(tn).margin(1e-12));
        }
    }

    SECTION("normalized reps satisfy both conventions structurally") {
        std::vector<FunctionRep> gs;
        gs.push_back(catalog_get("sin"));
        gs.push_back(make_step({0.0, 1.0}, {0.0, 0.5, 1.0}, {1.0, 3.0}, {2.0, 9.0, 3.0}));
        gs.push_back(catalog_get("spikes", {{"c", 0.5}, {"K", 3}}));
        for (const auto& g : gs) {
            auto n = normalize_nbv(g);
            CHECK(evaluate(n.rep, n.rep.domain.a) == 0.0);
            auto jd = detect_jump_data(n.rep);
            for (const auto& j : jd.jumps) CHECK(j.value == j.right);
            double shift = evaluate(g, g.domain.b) - evaluate(g, g.domain.a);
            CHECK(evaluate(n.rep, n.rep.domain.b) == Catch::Approx(shift).margin(1e-12));
        }
    }

    SECTION("equivalent inputs integrate identically") {
        std::vector<FunctionRep> fs;
        fs.push_back(catalog_get("linear", {{"m", 1.0}}));
        fs.push_back(catalog_get("xn_family", {{"n", 2}}));
        fs.push_back(catalog_get("xn_family", {{"n", 7}}));
        fs.push_back(catalog_get("cantor"));
        std::vector<FunctionRep> gs;
        gs.push_back(catalog_get("heaviside", {{"c", 0.3}}));
        gs.push_back(make_step({0.0, 1.0}, {0.0, 0.4, 1.0}, {0.0, 1.0}, {0.0, 0.0, 1.0}));
        gs.push_back(make_step({0.0, 1.0}, {0.0, 0.5, 1.0}, {1.0, 3.0}, {2.0, 9.0, 3.0}));
        gs.push_back(catalog_get("cantor"));
        gs.push_back(catalog_get("linear", {{"m", -3.0}, {"c", 2.0}}));
        int pairs = 0;
        for (const auto& f : fs)
            for (const auto& g : gs) {
                auto n = normalize_nbv(g);
                CHECK(stieltjes(f, g) == Catch::Approx(stieltjes(f, n.rep)).margin(1e-8));
                ++pairs;
            }
        CHECK(pairs == 20);
        CHECK_THROWS_AS(normalize_nbv(make_black_box({0.0, 1.0}, [](double x) { return x; })),
                        UnsupportedRep);
        CHECK_THROWS_AS(normalize_nbv(catalog_get("x_sin_inv")), NotBV);
    }
}

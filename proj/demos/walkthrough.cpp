#include <cstdio>

#include "bv/cli.hpp"

// A short tour: measure a few functions, split one into its parts, count
// level crossings, and integrate against a singular distribution.

using namespace bv;

int main() {
    std::printf("== total variation ==\n");
    for (const char* name : {"sin", "cantor", "x2_sin_inv"}) {
        auto f = catalog_get(name);
        std::printf("  %-12s T = %-20.12g", name, total_variation_exact(f));
        auto r = total_variation_refine(f, 12);
        std::printf(" refine(12) = %.12g [%s]\n", r.value, verdict_name(r.verdict));
    }

    // x sin(1/x) has no finite variation; give the refiner a budget and
    // watch it blow through.
    auto rough = catalog_get("x_sin_inv");
    auto r = total_variation_refine(rough, 12, 10.0);
    std::printf("  %-12s lower bounds pass %.4g at depth %d [%s]\n\n", rough.name.c_str(),
                r.value, r.depth, verdict_name(r.verdict));

    std::printf("== decomposition ==\n");
    auto spec = nlohmann::json::parse(R"({
        "from": 0,
        "piecewise": [
            {"to": 1,   "fn": "poly", "coeffs": [0, 1]},
            {"to": 2,   "fn": "poly", "coeffs": [3, -1]}
        ]})");
    auto f = parse_function_spec(spec);
    std::printf("  ramp with a jump: T = %.12g\n", total_variation_exact(f));
    for (const auto& j : detect_jumps(f))
        std::printf("  jump at x = %g: %g -> %g\n", j.x, j.left, j.right);
    auto parts = three_part_decompose(f);
    std::printf("  parts at x = 1.5: ac %.4f + jumps %.4f + singular %.4f = %.4f\n",
                evaluate(parts.ac, 1.5), evaluate(parts.saltus, 1.5),
                evaluate(parts.continuous_singular, 1.5), evaluate(f, 1.5));
    std::printf("  classification: %s\n\n", ac_verdict_name(classify_ac(f)));

    std::printf("== level counts ==\n");
    auto wave = catalog_get("sin");
    std::printf("  N(sin, 0.5) = %g, N(sin, 0) = %g\n", indicatrix_exact(wave, 0.5),
                indicatrix_exact(wave, 0.0));
    std::printf("  integral of the count function, by depth:");
    for (const auto& e : banach_integral_sequence(wave, {2, 4, 8, 12}))
        std::printf("  %d: %.6f", e.depth, e.integral);
    std::printf("\n\n");

    std::printf("== integration against the staircase ==\n");
    auto stairs = catalog_get("cantor");
    for (int n : {1, 2}) {
        auto xn = catalog_get("xn_family", {{"n", n}});
        std::printf("  int x^%d dTheta = %.9f\n", n, stieltjes(xn, stairs));
    }
    std::printf("  (first and second moments of a measure that has no density)\n\n");

    std::printf("== selection from a bounded family ==\n");
    FamilySpec powers{[](int n) { return catalog_get("xn_family", {{"n", n}}); }, 1.0};
    auto sel = helly_select(powers, 48, 17);
    std::printf("  kept %zu of 48 members; limit variation %.12g\n", sel.indices.size(),
                total_variation_exact(sel.limit));
    const auto& vals = std::get<GridFunction>(sel.limit.rep).values;
    std::printf("  limit grid: f(0) = %g, f(1/2) = %g, f(1) = %g\n", vals.front(),
                vals[vals.size() / 2], vals.back());
    return 0;
}

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bv/decompose.hpp"
#include "bv/quadrature.hpp"
#include "bv/variation.hpp"

namespace bv {

// One purely singular component of a measure: continuous CDF, no density.
struct SingularComponent {
    std::string kind;                      // "cantor" for the staircase, "grid" for numeric parts
    double mass = 0.0;                     // total variation it carries
    std::function<double(double)> cdf;     // accumulated mass of ]a, x[
};

// A finite signed measure on the open interval, split into an absolutely
// continuous part (density), a purely atomic part and singular components.
// Endpoint jumps of a generating function are deliberately not atoms: the
// measure lives on ]a, b[.
struct FiniteSignedMeasure {
    Interval domain;
    FunctionRep ac_density;                          // zero step when absent
    std::vector<std::pair<double, double>> atoms;    // (location, weight != 0), sorted
    std::vector<SingularComponent> singular;

    double ac_mass = 0.0;                            // integral of |density|
    std::function<double(double)> ac_prefix;         // int_a^x density, exact per construction
};

namespace detail {

// Exact integral of |d| for a piecewise-linear density on a uniform grid.
inline double abs_integral_linear(const Interval& dom, const std::vector<double>& vs) {
    if (vs.size() < 2) return 0.0;
    double h = dom.length() / static_cast<double>(vs.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
        double u = vs[i], v = vs[i + 1];
        if (u * v >= 0.0)
            total += 0.5 * h * std::abs(u + v);
        else
            total += 0.5 * h * (u * u + v * v) / (std::abs(u) + std::abs(v));
    }
    return total;
}

} // namespace detail

// Measure representation of the derivative: density from the absolutely
// continuous part, one atom per jump with weight f(x+) - f(x-), and singular
// components for whatever continuous mass is left. Removable point defects
// (spikes, odd knot values) carry no mass, and neither do endpoint jumps.
inline FiniteSignedMeasure derivative_measure(const FunctionRep& f) {
    if (has_divergent_tail(f)) throw NotBV("derivative_measure: unbounded variation");

    FiniteSignedMeasure mu{f.domain, detail::zero_rep(f.domain), {}, {}};
    mu.ac_prefix = [](double) { return 0.0; };

    auto jumps = detect_jump_data(f);
    for (const auto& j : jumps.jumps) {
        double w = j.right - j.left;
        if (w != 0.0) mu.atoms.push_back({j.x, w});
    }

    if (std::holds_alternative<PiecewiseMonotone>(f.rep)) {
        auto parts = three_part_decompose(f);
        mu.ac_density = derivative_ae(f);
        mu.ac_mass = integral_abs_derivative(f);
        auto ac = std::make_shared<FunctionRep>(std::move(parts.ac));
        double base = evaluate(*ac, ac->domain.a);
        mu.ac_prefix = [ac, base](double x) { return evaluate(*ac, x) - base; };
    } else if (std::holds_alternative<GridFunction>(f.rep)) {
        auto parts = three_part_decompose(f);
        mu.ac_density = derivative_ae(f);
        const auto& d = std::get<GridFunction>(mu.ac_density.rep);
        mu.ac_mass = detail::abs_integral_linear(mu.ac_density.domain, d.values);
        auto ac = std::make_shared<FunctionRep>(std::move(parts.ac));
        double base = evaluate(*ac, ac->domain.a);
        mu.ac_prefix = [ac, base](double x) { return evaluate(*ac, x) - base; };
        auto cs = std::make_shared<FunctionRep>(std::move(parts.continuous_singular));
        double csm = total_variation_exact(*cs);
        if (csm > 1e-15) {
            double cs0 = evaluate(*cs, cs->domain.a);
            mu.singular.push_back(
                {"grid", csm, [cs, cs0](double x) { return evaluate(*cs, x) - cs0; }});
        }
    } else if (std::holds_alternative<CantorRep>(f.rep)) {
        auto base = std::make_shared<FunctionRep>(f);
        double f0 = evaluate(*base, f.domain.a);
        mu.singular.push_back({"cantor", total_variation_exact(f),
                               [base, f0](double x) { return evaluate(*base, x) - f0; }});
    }
    // step and spike reps contribute atoms only
    return mu;
}

inline double measure_total_variation(const FiniteSignedMeasure& mu) {
    double total = mu.ac_mass;
    for (const auto& [x, w] : mu.atoms) total += std::abs(w);
    for (const auto& s : mu.singular) total += s.mass;
    return total;
}

// mu(]a, x[). Atoms enter strictly below x, so this is left-continuous in x.
inline double cdf(const FiniteSignedMeasure& mu, double x) {
    if (!(x > mu.domain.a && x < mu.domain.b))
        throw DomainError("cdf: point must lie strictly inside the interval");
    double total = mu.ac_prefix ? mu.ac_prefix(x) : 0.0;
    for (const auto& [loc, w] : mu.atoms)
        if (loc < x) total += w;
    for (const auto& s : mu.singular) total += s.cdf(x);
    return total;
}

// Riemann-Stieltjes integral of a continuous f against dg, assembled from the
// derivative measure of g plus the two endpoint jump terms that the
// open-interval measure leaves out.
inline double stieltjes(const FunctionRep& f, const FunctionRep& g, int depth = 12) {
    if (depth < 0 || depth > 26) throw BadParameter("stieltjes: depth must lie in [0, 26]");
    if (f.domain.a != g.domain.a || f.domain.b != g.domain.b)
        throw DomainError("stieltjes: integrand and integrator live on different intervals");
    if (!std::holds_alternative<BlackBox>(f.rep)) {
        auto fd = detect_jump_data(f);
        if (!fd.jumps.empty() || fd.start_jump != 0.0 || fd.end_jump != 0.0)
            throw DiscontinuousIntegrand("stieltjes: integrand must be continuous");
    }

    FiniteSignedMeasure mu = derivative_measure(g);
    auto gd = detect_jump_data(g);

    double total = evaluate(f, g.domain.a) * gd.start_jump +
                   evaluate(f, g.domain.b) * gd.end_jump;

    if (!detail::is_zero_step(mu.ac_density)) {
        auto splits = breakpoints(f);
        auto gb = breakpoints(g);
        splits.insert(splits.end(), gb.begin(), gb.end());
        const FunctionRep& den = mu.ac_density;
        total += integrate_with_splits(
            [&f, &den](double x) { return evaluate(f, x) * evaluate(den, x); }, g.domain.a,
            g.domain.b, std::move(splits));
    }

    for (const auto& [x, w] : mu.atoms) total += evaluate(f, x) * w;

    const long cells = 1L << depth;
    for (const auto& s : mu.singular) {
        double sum = 0.0;
        double len = g.domain.length();
        double prev_x = g.domain.a;
        double prev_c = 0.0; // the CDF accumulates from zero at the left end
        for (long i = 1; i <= cells; ++i) {
            double x = i == cells
                           ? g.domain.b
                           : g.domain.a + len * (static_cast<double>(i) / static_cast<double>(cells));
            double c = s.cdf(x);
            sum += evaluate(f, 0.5 * (prev_x + x)) * (c - prev_c);
            prev_x = x;
            prev_c = c;
        }
        total += sum;
    }
    return total;
}

// The normalized representative of g's equivalence class: zero at a,
// right-continuous at every interior breakpoint, same one-sided limits.
struct NormalizedBV {
    FunctionRep rep;
    bool already_normalized = false;
};

inline NormalizedBV normalize_nbv(const FunctionRep& g) {
    if (has_divergent_tail(g)) throw NotBV("normalize_nbv: unbounded variation");
    const double ga = evaluate(g, g.domain.a);
    const double gb = evaluate(g, g.domain.b);

    if (const auto* pm = std::get_if<PiecewiseMonotone>(&g.rep)) {
        bool same = ga == 0.0;
        PiecewiseMonotone out = *pm;
        auto base = std::make_shared<FunctionRep>(g);
        out.fn = [base, ga](double x) { return evaluate(*base, x) - ga; };
        for (std::size_t i = 0; i < out.at_knot.size(); ++i) {
            auto& t = out.at_knot[i];
            if (i == 0) {
                t.left = t.value = 0.0;
                t.right -= ga;
            } else if (i + 1 == out.at_knot.size()) {
                t.left -= ga;
                t.value = gb - ga;
                t.right = t.value;
            } else {
                same = same && t.value == t.right;
                t.left -= ga;
                t.value = t.right = t.right - ga;
            }
        }
        return {FunctionRep{g.domain, std::move(out), g.name + "*", g.params}, same};
    }
    if (const auto* st = std::get_if<StepFunction>(&g.rep)) {
        bool same = ga == 0.0;
        StepFunction out = *st;
        for (double& p : out.plateau) p -= ga;
        for (std::size_t i = 0; i < out.knots.size(); ++i) {
            if (i == 0) {
                out.at_knot[0] = 0.0;
            } else if (i + 1 == out.knots.size()) {
                out.at_knot[i] = gb - ga;
            } else {
                same = same && st->at_knot[i] == st->plateau[i];
                out.at_knot[i] = out.plateau[i];
            }
        }
        return {FunctionRep{g.domain, std::move(out), g.name + "*", g.params}, same};
    }
    if (const auto* ps = std::get_if<PointSpikes>(&g.rep)) {
        // right limits erase every spike; only the endpoint values survive
        StepFunction out;
        out.knots = {g.domain.a, g.domain.b};
        out.plateau = {-ga};
        out.at_knot = {0.0, gb - ga};
        return {FunctionRep{g.domain, std::move(out), g.name + "*", g.params},
                ps->spikes.empty() && ga == 0.0};
    }
    if (const auto* gr = std::get_if<GridFunction>(&g.rep)) {
        GridFunction out = *gr;
        for (double& v : out.values) v -= ga;
        return {FunctionRep{g.domain, std::move(out), g.name + "*", g.params}, ga == 0.0};
    }
    if (std::holds_alternative<CantorRep>(g.rep)) return {g, true};
    throw UnsupportedRep("normalize_nbv: opaque evaluators have no stored breakpoint values");
}

// Dual norm of the integration functional f -> int f dg on the continuous
// functions: the variation of the normalized representative.
inline double functional_norm(const FunctionRep& g) {
    return total_variation_exact(normalize_nbv(g).rep);
}

} // namespace bv

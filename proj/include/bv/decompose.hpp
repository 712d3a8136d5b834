#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "bv/function_rep.hpp"
#include "bv/quadrature.hpp"
#include "bv/variation.hpp"

namespace bv {

struct JumpRecord {
    double x;
    double left;
    double value;
    double right;
};

// Interior jumps plus the two endpoint defects f(a+) - f(a) and f(b) - f(b-).
struct SaltusData {
    std::vector<JumpRecord> jumps;
    double start_jump = 0.0;
    double end_jump = 0.0;
};

enum class ACVerdict { AbsolutelyContinuous, SingularPartPresent, NotOfBoundedVariation };

struct ThreeParts {
    FunctionRep ac;                  // running integral of the a.e. derivative
    FunctionRep continuous_singular; // what remains after removing jumps and the AC part
    FunctionRep saltus;              // accumulated jumps
};

struct DiniQuad {
    double upper_right; // limsup of right difference quotients
    double lower_right;
    double upper_left;
    double lower_left;
    bool reliable;      // false when only a raw quotient scan backs the values
};

inline SaltusData detect_jump_data(const FunctionRep& f) {
    SaltusData out;
    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep)) {
        const std::size_t m = pm->knots.size() - 1;
        out.start_jump = pm->at_knot.front().right - pm->at_knot.front().value;
        out.end_jump = pm->at_knot.back().value - pm->at_knot.back().left;
        for (std::size_t i = 1; i < m; ++i)
            if (pm->at_knot[i].has_jump())
                out.jumps.push_back({pm->knots[i], pm->at_knot[i].left, pm->at_knot[i].value,
                                     pm->at_knot[i].right});
        return out;
    }
    if (const auto* st = std::get_if<StepFunction>(&f.rep)) {
        const std::size_t m = st->knots.size() - 1;
        out.start_jump = st->plateau.front() - st->at_knot.front();
        out.end_jump = st->at_knot.back() - st->plateau.back();
        for (std::size_t i = 1; i < m; ++i) {
            double l = st->plateau[i - 1], v = st->at_knot[i], r = st->plateau[i];
            if (l != v || v != r) out.jumps.push_back({st->knots[i], l, v, r});
        }
        return out;
    }
    if (const auto* ps = std::get_if<PointSpikes>(&f.rep)) {
        for (const auto& sp : ps->spikes) {
            if (sp.first == f.domain.a) out.start_jump = -sp.second;
            else if (sp.first == f.domain.b) out.end_jump = sp.second;
            else out.jumps.push_back({sp.first, 0.0, sp.second, 0.0});
        }
        return out;
    }
    if (std::holds_alternative<GridFunction>(f.rep) || std::holds_alternative<CantorRep>(f.rep))
        return out;
    throw UnsupportedRep("detect_jumps: opaque evaluator carries no jump structure");
}

inline std::vector<JumpRecord> detect_jumps(const FunctionRep& f) {
    return detect_jump_data(f).jumps;
}

// The pure-jump component: zero at a, accumulating f(t+) - f(t-) across each
// interior jump (split at the jump point itself per the stored value) plus
// the endpoint defects. Exactly representable as a step function.
inline FunctionRep saltus_function(const FunctionRep& f) {
    SaltusData data = detect_jump_data(f);
    std::vector<double> knots = {f.domain.a};
    for (const auto& j : data.jumps) knots.push_back(j.x);
    knots.push_back(f.domain.b);

    std::vector<double> plateau;
    std::vector<double> at_knot;
    at_knot.push_back(0.0);
    double level = data.start_jump;
    for (const auto& j : data.jumps) {
        plateau.push_back(level);
        at_knot.push_back(level + (j.value - j.left));
        level += j.right - j.left;
    }
    plateau.push_back(level);
    at_knot.push_back(level + data.end_jump);
    return make_step(f.domain, std::move(knots), std::move(plateau), std::move(at_knot));
}

namespace detail {

inline FunctionRep const_rep(const Interval& dom, double c) {
    return make_step(dom, {dom.a, dom.b}, {c}, {c, c});
}

inline FunctionRep zero_rep(const Interval& dom) { return const_rep(dom, 0.0); }

inline bool is_zero_step(const FunctionRep& f) {
    const auto* st = std::get_if<StepFunction>(&f.rep);
    if (!st) return false;
    for (double v : st->plateau)
        if (v != 0.0) return false;
    for (double v : st->at_knot)
        if (v != 0.0) return false;
    return true;
}

} // namespace detail

// Pointwise a.e. derivative in a form suited to integration: the stored
// analytic derivative for piecewise reps, finite differences for grids, zero
// for steps, spikes and the staircase.
inline FunctionRep derivative_ae(const FunctionRep& f) {
    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep)) {
        if (!pm->dfn)
            throw UnsupportedRep("derivative_ae: piecewise rep carries no analytic derivative");
        return make_black_box(f.domain, pm->dfn, nullptr, nullptr, pm->knots);
    }
    if (std::holds_alternative<StepFunction>(f.rep) || std::holds_alternative<PointSpikes>(f.rep) ||
        std::holds_alternative<CantorRep>(f.rep))
        return detail::zero_rep(f.domain);
    if (const auto* g = std::get_if<GridFunction>(&f.rep)) {
        const std::size_t n = g->values.size() - 1;
        const double h = f.domain.length() / static_cast<double>(n);
        GridFunction d;
        d.values.resize(n + 1);
        d.values[0] = (g->values[1] - g->values[0]) / h;
        d.values[n] = (g->values[n] - g->values[n - 1]) / h;
        for (std::size_t i = 1; i < n; ++i)
            d.values[i] = (g->values[i + 1] - g->values[i - 1]) / (2.0 * h);
        return FunctionRep{f.domain, std::move(d), "", {}};
    }
    const auto* bb = std::get_if<BlackBox>(&f.rep);
    if (bb && bb->deriv_right)
        return make_black_box(f.domain, bb->deriv_right, nullptr, nullptr, bb->hints);
    throw UnsupportedRep("derivative_ae: no derivative information available");
}

// f = F + f_cs + s_f pointwise, with F = f(a) plus the running integral of
// the a.e. derivative and s_f the accumulated jumps (both extra parts vanish
// at a). Piecewise-smooth reps integrate their derivative exactly across each
// piece (each piece is C^1, hence absolutely continuous), so F keeps the full
// piecewise structure and f_cs collapses to zero; the staircase sits entirely
// in f_cs.
inline ThreeParts three_part_decompose(const FunctionRep& f) {
    if (has_divergent_tail(f))
        throw NotBV("three_part_decompose: not of bounded variation");

    FunctionRep s = saltus_function(f);
    const double fa = evaluate(f, f.domain.a);

    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep)) {
        if (!pm->dfn)
            throw UnsupportedRep("three_part_decompose: piecewise rep carries no derivative");
        auto base = std::make_shared<const FunctionRep>(f);
        auto saltus = std::make_shared<const FunctionRep>(s);
        PiecewiseMonotone F;
        F.knots = pm->knots;
        F.fn = [base, saltus](double x) { return evaluate(*base, x) - evaluate(*saltus, x); };
        F.dfn = pm->dfn;
        F.direction = pm->direction;
        F.tail = pm->tail;
        F.at_knot.reserve(pm->knots.size());
        for (std::size_t i = 0; i < pm->knots.size(); ++i) {
            double v = pm->at_knot[i].value - evaluate(s, pm->knots[i]);
            // the left/right limits of F coincide with its value: removing the
            // saltus exactly cancels each stored jump
            F.at_knot.push_back({v, v, v});
        }
        FunctionRep ac{f.domain, std::move(F), "", {}};
        return {std::move(ac), detail::zero_rep(f.domain), std::move(s)};
    }
    if (std::holds_alternative<StepFunction>(f.rep) || std::holds_alternative<PointSpikes>(f.rep)) {
        // pure jump structure: f - f(a) is exactly the saltus
        return {detail::const_rep(f.domain, fa), detail::zero_rep(f.domain), std::move(s)};
    }
    if (std::holds_alternative<CantorRep>(f.rep)) {
        return {detail::const_rep(f.domain, fa), f, std::move(s)};
    }
    if (const auto* g = std::get_if<GridFunction>(&f.rep)) {
        // trapezoid prefix of the finite-difference derivative
        FunctionRep d = derivative_ae(f);
        const auto& dv = std::get<GridFunction>(d.rep).values;
        const double h = f.domain.length() / static_cast<double>(dv.size() - 1);
        GridFunction F;
        F.values.resize(dv.size());
        F.values[0] = fa;
        for (std::size_t i = 1; i < dv.size(); ++i)
            F.values[i] = F.values[i - 1] + 0.5 * (dv[i - 1] + dv[i]) * h;
        GridFunction cs;
        cs.values.resize(dv.size());
        for (std::size_t i = 0; i < cs.values.size(); ++i)
            cs.values[i] = g->values[i] - F.values[i];
        FunctionRep ac{f.domain, std::move(F), "", {}};
        return {std::move(ac), FunctionRep{f.domain, std::move(cs), "", {}}, std::move(s)};
    }
    throw UnsupportedRep("three_part_decompose: opaque evaluator is not decomposable");
}

// Integral of |f'| over the whole interval, using whatever derivative
// information the rep carries. Per piece the stored derivative keeps one
// sign, so integrating it and taking absolute values piecewise is exact.
inline double integral_abs_derivative(const FunctionRep& f, double tol = 1e-10) {
    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep)) {
        if (!pm->dfn)
            throw UnsupportedRep("integral_abs_derivative: no analytic derivative stored");
        double total = 0.0;
        QuadratureOptions opts;
        opts.max_evals = 40000;
        for (std::size_t i = 0; i + 1 < pm->knots.size(); ++i) {
            if (pm->tail && i == 0) {
                // unresolved oscillation tail: count its net increment, the
                // same truncation the exact variation applies to this piece
                total += std::abs(pm->at_knot[1].left - pm->at_knot[0].right);
                continue;
            }
            opts.tol = tol * std::max(1e-3, (pm->knots[i + 1] - pm->knots[i]) / f.domain.length());
            total += std::abs(adaptive_simpson(pm->dfn, pm->knots[i], pm->knots[i + 1], opts));
        }
        return total;
    }
    if (std::holds_alternative<StepFunction>(f.rep) || std::holds_alternative<PointSpikes>(f.rep) ||
        std::holds_alternative<CantorRep>(f.rep))
        return 0.0;
    if (const auto* g = std::get_if<GridFunction>(&f.rep)) {
        double s = 0.0;
        for (std::size_t i = 1; i < g->values.size(); ++i) s += std::abs(g->values[i] - g->values[i - 1]);
        return s;
    }
    const auto* bb = std::get_if<BlackBox>(&f.rep);
    if (bb && bb->abs_deriv_integral) return bb->abs_deriv_integral(f.domain.a, f.domain.b);
    if (bb && bb->deriv_right) {
        QuadratureOptions opts;
        opts.tol = tol;
        return integrate_abs(bb->deriv_right, f.domain.a, f.domain.b, bb->hints, opts);
    }
    throw UnsupportedRep("integral_abs_derivative: no derivative information available");
}

// Absolute continuity test: compare the total variation against the integral
// of |f'|; equality (to a relative tolerance) characterizes AC.
inline ACVerdict classify_ac(const FunctionRep& f, double rel_tol = 1e-6) {
    if (has_divergent_tail(f)) return ACVerdict::NotOfBoundedVariation;
    double t;
    if (is_exact_capable(f)) {
        t = detail::stored_variation(f);
    } else {
        auto report = total_variation_refine(f, 16);
        if (report.verdict != VariationReport::Verdict::Converged)
            throw QuadratureFailure("classify_ac: variation estimate did not settle");
        t = report.value;
    }
    double integral = integral_abs_derivative(f);
    double slack = rel_tol * std::max(1.0, std::abs(t));
    return integral >= t - slack ? ACVerdict::AbsolutelyContinuous
                                 : ACVerdict::SingularPartPresent;
}

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// max/min of one-sided difference quotients over a geometric h-schedule;
// h stops near 6e-10 so rounding in f(x+h)-f(x) stays below the settle test
inline void quotient_scan(const FunctionRep& f, double x, double dir, double& upper, double& lower,
                          bool& any, double& tail_spread) {
    upper = -kInf;
    lower = kInf;
    any = false;
    std::vector<double> tail;
    const double fx = evaluate(f, x);
    for (int j = 0; j <= 24; ++j) {
        double h = 1e-2 * std::ldexp(1.0, -j);
        double xs = x + dir * h;
        if (xs < f.domain.a || xs > f.domain.b) continue;
        double q = (evaluate(f, xs) - fx) / (dir * h);
        upper = std::max(upper, q);
        lower = std::min(lower, q);
        any = true;
        if (j > 16) tail.push_back(q);
    }
    tail_spread = kInf;
    if (tail.size() >= 4)
        tail_spread = *std::max_element(tail.begin(), tail.end()) -
                      *std::min_element(tail.begin(), tail.end());
}

} // namespace detail

// The four Dini derivatives at x. Structural cases (stored derivatives,
// plateaus, jumps) are exact; otherwise a difference-quotient scan over
// h = 1e-2 * 2^-j, j <= 24 estimates the limits, flagged as unreliable
// unless the deepest quotients have already settled.
inline DiniQuad dini(const FunctionRep& f, double x) {
    f.domain.require(x, "dini");
    const bool at_a = x == f.domain.a;
    const bool at_b = x == f.domain.b;

    auto from_jump = [&](double right_gap, double left_gap,
                         double dr, double dl) -> DiniQuad {
        double ur, lr, ul, ll;
        if (at_b) ur = lr = detail::kNaN;
        else if (right_gap != 0.0) ur = lr = right_gap > 0 ? detail::kInf : -detail::kInf;
        else ur = lr = dr;
        if (at_a) ul = ll = detail::kNaN;
        else if (left_gap != 0.0) ul = ll = left_gap > 0 ? detail::kInf : -detail::kInf;
        else ul = ll = dl;
        return {ur, lr, ul, ll, true};
    };

    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep); pm && pm->dfn && !pm->tail) {
        std::size_t k = detail::exact_knot(pm->knots, x);
        const double nudge = 1e-9 * f.domain.length();
        if (k < pm->knots.size()) {
            const auto& t = pm->at_knot[k];
            return from_jump(t.right - t.value, t.value - t.left,
                             pm->dfn(std::min(x + nudge, f.domain.b)),
                             pm->dfn(std::max(x - nudge, f.domain.a)));
        }
        double d = pm->dfn(x);
        return {d, d, d, d, true};
    }
    if (const auto* st = std::get_if<StepFunction>(&f.rep)) {
        std::size_t k = detail::exact_knot(st->knots, x);
        if (k < st->knots.size()) {
            double l = k == 0 ? st->at_knot[0] : st->plateau[k - 1];
            double r = k + 1 == st->knots.size() ? st->at_knot.back() : st->plateau[k];
            double v = st->at_knot[k];
            return from_jump(r - v, v - l, 0.0, 0.0);
        }
        return {0.0, 0.0, 0.0, 0.0, true};
    }
    if (const auto* ps = std::get_if<PointSpikes>(&f.rep)) {
        for (const auto& sp : ps->spikes)
            if (sp.first == x) return from_jump(-sp.second, sp.second, 0.0, 0.0);
        return {0.0, 0.0, 0.0, 0.0, true};
    }
    if (const auto* bb = std::get_if<BlackBox>(&f.rep); bb && bb->deriv_right && bb->deriv_left) {
        double dr = at_b ? detail::kNaN : bb->deriv_right(x);
        double dl = at_a ? detail::kNaN : bb->deriv_left(x);
        return {dr, dr, dl, dl, true};
    }

    DiniQuad out{detail::kNaN, detail::kNaN, detail::kNaN, detail::kNaN, false};
    double spread_r = 0.0, spread_l = 0.0;
    bool any = false;
    if (!at_b) {
        detail::quotient_scan(f, x, 1.0, out.upper_right, out.lower_right, any, spread_r);
        if (!any) out.upper_right = out.lower_right = detail::kNaN;
    }
    if (!at_a) {
        detail::quotient_scan(f, x, -1.0, out.upper_left, out.lower_left, any, spread_l);
        if (!any) out.upper_left = out.lower_left = detail::kNaN;
    }
    double scale = std::max(1.0, std::abs(evaluate(f, x)));
    out.reliable = std::max(spread_r, spread_l) <= 1e-5 * scale;
    return out;
}

} // namespace bv

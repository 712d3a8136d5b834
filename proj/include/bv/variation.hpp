#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "bv/function_rep.hpp"

namespace bv {

struct Partition {
    std::vector<double> points;

    explicit Partition(std::vector<double> pts) : points(std::move(pts)) {
        if (points.size() < 2) throw BadParameter("Partition: need at least two points");
        for (std::size_t i = 1; i < points.size(); ++i)
            if (!(points[i - 1] < points[i]))
                throw BadParameter("Partition: points must be strictly increasing");
    }

    static Partition uniform(const Interval& dom, int n) {
        if (n < 1) throw BadParameter("Partition::uniform: need at least one cell");
        std::vector<double> pts;
        pts.reserve(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i)
            pts.push_back(i == n ? dom.b
                                 : dom.a + dom.length() * (static_cast<double>(i) / n));
        return Partition(std::move(pts));
    }

    double mesh() const {
        double m = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i) m = std::max(m, points[i] - points[i - 1]);
        return m;
    }
};

struct VariationReport {
    enum class Verdict { Converged, ExceededBound, Inconclusive };
    Verdict verdict = Verdict::Inconclusive;
    double value = 0.0;                 // converged value, or the last certified lower bound
    double bound = std::numeric_limits<double>::infinity();
    int depth = 0;                      // depth at which the verdict fired
    std::vector<double> lower_bounds;   // one certified lower bound per depth
};

// Stopping rule shared by the refining estimators.
inline bool refine_settled(double prev, double cur) {
    return std::abs(cur - prev) <= std::max(1e-9, 1e-6 * std::abs(cur));
}

namespace detail {

inline void require_spanning(const FunctionRep& f, const Partition& p, const char* who) {
    if (p.points.front() != f.domain.a || p.points.back() != f.domain.b)
        throw PartitionMismatch(std::string(who) + ": partition must span the domain exactly");
}

// Sum of stored-piece increments and knot jumps; for a lazy tail the
// unresolved piece contributes only its endpoint increment (truncation view).
inline double stored_variation(const FunctionRep& f) {
    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep)) {
        double s = 0.0;
        for (std::size_t i = 0; i < pm->knots.size(); ++i) {
            const auto& t = pm->at_knot[i];
            if (i > 0) s += std::abs(t.value - t.left);
            if (i + 1 < pm->knots.size()) {
                s += std::abs(t.right - t.value);
                s += std::abs(pm->at_knot[i + 1].left - t.right);
            }
        }
        return s;
    }
    if (const auto* st = std::get_if<StepFunction>(&f.rep)) {
        double s = 0.0;
        for (std::size_t i = 0; i < st->knots.size(); ++i) {
            if (i > 0) s += std::abs(st->at_knot[i] - st->plateau[i - 1]);
            if (i < st->plateau.size()) s += std::abs(st->plateau[i] - st->at_knot[i]);
        }
        return s;
    }
    if (const auto* ps = std::get_if<PointSpikes>(&f.rep)) {
        double s = 0.0;
        for (const auto& sp : ps->spikes) s += 2.0 * std::abs(sp.second);
        return s;
    }
    if (const auto* g = std::get_if<GridFunction>(&f.rep)) {
        double s = 0.0;
        for (std::size_t i = 1; i < g->values.size(); ++i)
            s += std::abs(g->values[i] - g->values[i - 1]);
        return s;
    }
    if (std::holds_alternative<CantorRep>(f.rep)) return 1.0;
    throw UnsupportedRep("total_variation_exact: opaque evaluator has no exact variation");
}

} // namespace detail

// Compares variation gathered over two successive 64x windows above the
// materialization cutoff: a logarithmically divergent tail keeps adding the
// same amount per window, an integrable one shrinks it by ~64x.
inline bool has_divergent_tail(const FunctionRep& f) {
    const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep);
    if (!pm || !pm->tail) return false;
    const double t1 = pm->knots[1];
    double inner = 0.0, outer = 0.0;
    for (std::size_t i = 1; i + 1 < pm->knots.size(); ++i) {
        double x = pm->knots[i];
        double step = std::abs(pm->at_knot[i + 1].value - pm->at_knot[i].value);
        if (x < t1 * 64.0) inner += step;
        else if (x < t1 * 4096.0) outer += step;
    }
    return inner > 0.5 * outer;
}

inline double variation_on_partition(const FunctionRep& f, const Partition& p) {
    detail::require_spanning(f, p, "variation_on_partition");
    double s = 0.0;
    double prev = evaluate(f, p.points.front());
    for (std::size_t i = 1; i < p.points.size(); ++i) {
        double cur = evaluate(f, p.points[i]);
        s += std::abs(cur - prev);
        prev = cur;
    }
    return s;
}

inline double total_variation_exact(const FunctionRep& f) {
    if (has_divergent_tail(f))
        throw NotBV("total_variation_exact: variation diverges toward the left endpoint");
    return detail::stored_variation(f);
}

// Variation over the dyadic partition of depth `d` with structural
// breakpoints merged in; lazy tails are streamed down to the dyadic scale.
namespace detail {

struct DyadicVariation {
    double sum = 0.0;
    bool tail_resolved = true; // false when the stream cap cut the tail short
};

inline DyadicVariation merged_dyadic_variation(const FunctionRep& f, int d,
                                               long stream_cap = 4000000) {
    const double a = f.domain.a, len = f.domain.length();
    const long n = 1L << d;
    std::vector<double> knots = breakpoints(f);
    std::sort(knots.begin(), knots.end()); // black-box hints arrive unordered
    std::vector<double> streamed;
    bool tail_resolved = true;
    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep)) {
        double scale = len * std::pow(0.25, d);
        tail_resolved = stream_tail_points(*pm, f.domain.a + scale, stream_cap, streamed);
        std::reverse(streamed.begin(), streamed.end());
    }
    // three-way ascending merge: dyadic nodes, stored knots, streamed points
    std::size_t ik = 0, is = 0;
    long id = 0;
    double s = 0.0;
    bool have_prev = false;
    double prev = 0.0;
    auto consume = [&](double x) {
        double cur = evaluate(f, x);
        if (have_prev) s += std::abs(cur - prev);
        prev = cur;
        have_prev = true;
    };
    double next_dyadic = a;
    while (id <= n || ik < knots.size() || is < streamed.size()) {
        double candidate = std::numeric_limits<double>::infinity();
        int which = -1;
        if (id <= n && next_dyadic < candidate) { candidate = next_dyadic; which = 0; }
        if (ik < knots.size() && knots[ik] < candidate) { candidate = knots[ik]; which = 1; }
        if (is < streamed.size() && streamed[is] < candidate) { candidate = streamed[is]; which = 2; }
        if (which == 0) {
            ++id;
            next_dyadic = id == n ? f.domain.b : a + len * (static_cast<double>(id) / n);
        } else if (which == 1) {
            ++ik;
        } else {
            ++is;
        }
        consume(candidate);
    }
    return {s, tail_resolved};
}

} // namespace detail

inline VariationReport total_variation_refine(const FunctionRep& f, int max_depth = 16,
                                              double bound = std::numeric_limits<double>::infinity()) {
    if (max_depth < 1) throw BadParameter("total_variation_refine: max_depth must be positive");

    // A lazy tail must actually have been streamed before two successive
    // bounds can witness convergence; otherwise every depth sees the same
    // materialized knots and the increment is trivially zero.
    int first_comparable = 2;
    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep); pm && pm->tail) {
        double cut = (pm->knots[1] - f.domain.a) / f.domain.length();
        first_comparable = std::max(2, static_cast<int>(std::ceil(std::log(cut) / std::log(0.25))) + 1);
    }

    VariationReport report;
    report.bound = bound;
    for (int d = 1; d <= max_depth; ++d) {
        auto [s, resolved] = detail::merged_dyadic_variation(f, d);
        report.lower_bounds.push_back(s);
        report.depth = d;
        if (s > bound) {
            report.verdict = VariationReport::Verdict::ExceededBound;
            report.value = s;
            return report;
        }
        if (d >= first_comparable && resolved && refine_settled(report.lower_bounds[d - 2], s)) {
            report.verdict = VariationReport::Verdict::Converged;
            report.value = s;
            return report;
        }
    }
    report.verdict = VariationReport::Verdict::Inconclusive;
    report.value = report.lower_bounds.back();
    return report;
}

inline double oscillation_variation(const FunctionRep& f, const Partition& p) {
    detail::require_spanning(f, p, "oscillation_variation");
    double s = 0.0;
    for (std::size_t i = 1; i < p.points.size(); ++i) {
        auto [lo, hi] = cell_minmax(f, p.points[i - 1], p.points[i]);
        s += hi - lo;
    }
    return s;
}

// Positive and negative variation over the whole interval, from the closed
// formulas 2T+ = T + (f(b) - f(a)) and 2T- = T - (f(b) - f(a)).
inline std::pair<double, double> pos_neg_variation(const FunctionRep& f) {
    double t = total_variation_exact(f);
    double delta = evaluate(f, f.domain.b) - evaluate(f, f.domain.a);
    return {0.5 * (t + delta), 0.5 * (t - delta)};
}

inline double variation_function(const FunctionRep& f, double x) {
    f.domain.require(x, "variation_function");
    if (has_divergent_tail(f))
        throw NotBV("variation_function: variation diverges toward the left endpoint");
    if (x == f.domain.a) return 0.0;
    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep)) {
        double s = 0.0;
        for (std::size_t i = 0;; ++i) {
            const auto& t = pm->at_knot[i];
            s += std::abs(t.right - t.value);
            if (x < pm->knots[i + 1]) {
                s += std::abs(pm->fn(x) - t.right);
                return s;
            }
            const auto& u = pm->at_knot[i + 1];
            s += std::abs(u.left - t.right);
            s += std::abs(u.value - u.left);
            if (x == pm->knots[i + 1]) return s;
        }
    }
    if (const auto* st = std::get_if<StepFunction>(&f.rep)) {
        double s = 0.0;
        for (std::size_t i = 0;; ++i) {
            s += std::abs(st->plateau[i] - st->at_knot[i]);
            if (x < st->knots[i + 1]) return s;
            s += std::abs(st->at_knot[i + 1] - st->plateau[i]);
            if (x == st->knots[i + 1]) return s;
        }
    }
    if (const auto* ps = std::get_if<PointSpikes>(&f.rep)) {
        double s = 0.0;
        for (const auto& sp : ps->spikes) {
            if (sp.first < x) s += 2.0 * std::abs(sp.second);
            else if (sp.first == x) s += std::abs(sp.second);
            else break;
        }
        return s;
    }
    if (const auto* g = std::get_if<GridFunction>(&f.rep)) {
        const std::size_t n = g->values.size() - 1;
        const double h = f.domain.length() / static_cast<double>(n);
        double s = 0.0;
        std::size_t i = 1;
        for (; i <= n; ++i) {
            double node = f.domain.a + h * static_cast<double>(i);
            if (node > x) break;
            s += std::abs(g->values[i] - g->values[i - 1]);
        }
        if (i <= n) s += std::abs(evaluate(f, x) - g->values[i - 1]);
        return s;
    }
    if (std::holds_alternative<CantorRep>(f.rep))
        return cantor_exact((x - f.domain.a) / f.domain.length());
    throw UnsupportedRep("variation_function: opaque evaluator has no exact variation");
}

// Writes f as the difference of the two canonical nondecreasing parts
// p = (T_f[a,x] + f(x))/2 and q = (T_f[a,x] - f(x))/2, so p - q = f.
inline std::pair<FunctionRep, FunctionRep> jordan_decompose(const FunctionRep& f) {
    if (has_divergent_tail(f)) throw NotBV("jordan_decompose: not of bounded variation");
    auto shared = std::make_shared<const FunctionRep>(f);
    auto hints = breakpoints(f);
    auto part = [shared](double sign) {
        return [shared, sign](double x) {
            return 0.5 * (variation_function(*shared, x) + sign * evaluate(*shared, x));
        };
    };
    FunctionRep pos = make_black_box(f.domain, part(1.0), nullptr, nullptr, hints);
    FunctionRep neg = make_black_box(f.domain, part(-1.0), nullptr, nullptr, hints);
    return {std::move(pos), std::move(neg)};
}

// Pointwise scaling c*f with the representation structure preserved.
inline FunctionRep scale_rep(const FunctionRep& f, double c) {
    FunctionRep out = f;
    out.name.clear();
    out.params.clear();
    if (auto* pm = std::get_if<PiecewiseMonotone>(&out.rep)) {
        for (auto& t : pm->at_knot) t = {c * t.left, c * t.value, c * t.right};
        if (c < 0.0)
            for (auto& d : pm->direction)
                d = d == Direction::Increasing ? Direction::Decreasing
                                               : d == Direction::Decreasing ? Direction::Increasing : d;
        if (c == 0.0) std::fill(pm->direction.begin(), pm->direction.end(), Direction::Constant);
        auto base = pm->fn;
        pm->fn = [base, c](double x) { return c * base(x); };
        if (pm->dfn) {
            auto dbase = pm->dfn;
            pm->dfn = [dbase, c](double x) { return c * dbase(x); };
        }
        return out;
    }
    if (auto* st = std::get_if<StepFunction>(&out.rep)) {
        for (auto& v : st->plateau) v *= c;
        for (auto& v : st->at_knot) v *= c;
        return out;
    }
    if (auto* ps = std::get_if<PointSpikes>(&out.rep)) {
        if (c == 0.0) ps->spikes.clear();
        else
            for (auto& sp : ps->spikes) sp.second *= c;
        return out;
    }
    if (auto* g = std::get_if<GridFunction>(&out.rep)) {
        for (auto& v : g->values) v *= c;
        return out;
    }
    if (std::holds_alternative<CantorRep>(out.rep)) {
        const double a = f.domain.a, len = f.domain.length();
        PiecewiseMonotone pm;
        pm.knots = {f.domain.a, f.domain.b};
        pm.fn = [a, len, c](double x) { return c * cantor_exact((x - a) / len); };
        pm.dfn = [](double) { return 0.0; };
        pm.at_knot = {{0.0, 0.0, 0.0}, {c, c, c}};
        pm.direction = {c > 0.0 ? Direction::Increasing
                                : c < 0.0 ? Direction::Decreasing : Direction::Constant};
        out.rep = std::move(pm);
        return out;
    }
    auto* bb = std::get_if<BlackBox>(&out.rep);
    auto base = bb->fn;
    bb->fn = [base, c](double x) { return c * base(x); };
    if (bb->deriv_right) {
        auto d = bb->deriv_right;
        bb->deriv_right = [d, c](double x) { return c * d(x); };
    }
    if (bb->deriv_left) {
        auto d = bb->deriv_left;
        bb->deriv_left = [d, c](double x) { return c * d(x); };
    }
    if (bb->abs_deriv_integral) {
        auto ad = bb->abs_deriv_integral;
        double ac = std::abs(c);
        bb->abs_deriv_integral = [ad, ac](double u, double v) { return ac * ad(u, v); };
    }
    return out;
}

} // namespace bv

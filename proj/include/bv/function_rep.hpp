#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bv/cantor.hpp"
#include "bv/errors.hpp"
#include "bv/interval.hpp"

namespace bv {

enum class Direction : int { Decreasing = -1, Constant = 0, Increasing = 1 };

// One-sided limits and the value itself at a breakpoint. For the left domain
// endpoint `left` equals `value`, and symmetrically at the right endpoint.
struct BreakpointTriple {
    double left;
    double value;
    double right;

    bool has_jump() const { return left != value || value != right; }
};

// Marker for the oscillatory left-end tail of x^power * sin(1/x): the piece
// [knots[0], knots[1]] holds infinitely many unmaterialized monotone arcs.
// `deepest` is the index k of the critical point sitting at knots[1]; further
// critical points can be streamed analytically (see oscillation_critical_point).
struct LazyTail {
    int power = 1;
    long deepest = 0;
};

struct PiecewiseMonotone {
    std::vector<double> knots;                 // t_0 < ... < t_m spanning the domain
    std::function<double(double)> fn;          // evaluator away from knots
    std::function<double(double)> dfn;         // analytic derivative away from knots, may be null
    std::vector<BreakpointTriple> at_knot;     // size m+1
    std::vector<Direction> direction;          // size m, per open piece
    std::optional<LazyTail> tail;
};

struct StepFunction {
    std::vector<double> knots;     // t_0 < ... < t_m
    std::vector<double> plateau;   // size m, value on each open piece
    std::vector<double> at_knot;   // size m+1, value at each knot
};

struct PointSpikes {
    std::vector<std::pair<double, double>> spikes; // (location, value), sorted, interior, value != 0
};

struct GridFunction {
    std::vector<double> values;    // n+1 uniform samples; evaluates by linear interpolation
};

struct BlackBox {
    std::function<double(double)> fn;
    std::function<double(double)> deriv_right;  // optional one-sided derivatives
    std::function<double(double)> deriv_left;
    std::vector<double> hints;                  // refinement split points, optional
    // optional exact hook for integrals of |derivative| over [u, v]; set by
    // constructions that know their derivative in closed or prefix form
    std::function<double(double, double)> abs_deriv_integral;
};

struct CantorRep {
    int level = 16;                // approximant level of interest; evaluation is exact
};

using RepVariant =
    std::variant<PiecewiseMonotone, StepFunction, PointSpikes, GridFunction, BlackBox, CantorRep>;

struct FunctionRep {
    Interval domain;
    RepVariant rep;
    std::string name;                       // catalog identifier when applicable
    std::map<std::string, double> params;
};

namespace detail {

// Index i such that knots[i] <= x <= knots[i+1]; ties resolved to the piece
// starting at x except at the last knot.
inline std::size_t piece_index(const std::vector<double>& knots, double x) {
    auto it = std::upper_bound(knots.begin(), knots.end(), x);
    if (it == knots.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
    if (i + 1 >= knots.size()) i = knots.size() - 2;
    return i;
}

inline std::size_t exact_knot(const std::vector<double>& knots, double x) {
    auto it = std::lower_bound(knots.begin(), knots.end(), x);
    if (it != knots.end() && *it == x) return static_cast<std::size_t>(it - knots.begin());
    return knots.size();
}

} // namespace detail

// ---- lazy tails --------------------------------------------------------

// k-th critical point (counted from the outside in, so x decreases with k) of
// x^power * sin(1/x) on ]0, 1]: with u = 1/x, u solves tan u = u/power in
// (k*pi, k*pi + pi/2). Newton/bisection for small k, an asymptotic fixed point
// beyond (error far below the spacing between points).
inline double oscillation_critical_point(int power, long k) {
    const double pi = 3.14159265358979323846;
    const double p = static_cast<double>(power);
    const double c = (static_cast<double>(k) + 0.5) * pi;
    if (k >= 50) {
        double eps = p / c;
        eps = p / (c - eps + p * eps / 3.0);
        eps = p / (c - eps + p * eps / 3.0);
        return 1.0 / (c - eps);
    }
    // solve tan v = (k*pi + v)/p on (0, pi/2) by bisection; g is increasing
    double lo = 0.0, hi = pi / 2.0 - 1e-12;
    for (int it = 0; it < 80; ++it) {
        double v = 0.5 * (lo + hi);
        double g = std::tan(v) - (static_cast<double>(k) * pi + v) / p;
        (g < 0.0 ? lo : hi) = v;
    }
    double v = 0.5 * (lo + hi);
    return 1.0 / (static_cast<double>(k) * pi + v);
}

// Appends tail critical points strictly below pm.knots[1], descending, until
// they drop below `down_to` or `cap` points have been emitted. Returns false
// when the cap cut the stream short of the requested scale.
inline bool stream_tail_points(const PiecewiseMonotone& pm, double down_to, long cap,
                               std::vector<double>& out) {
    if (!pm.tail) return true;
    long k = pm.tail->deepest;
    for (long emitted = 0; emitted < cap; ++emitted) {
        ++k;
        double x = oscillation_critical_point(pm.tail->power, k);
        if (x < down_to) return true;
        out.push_back(x);
    }
    return oscillation_critical_point(pm.tail->power, k + 1) < down_to;
}

// ---- evaluation --------------------------------------------------------

inline double evaluate(const FunctionRep& f, double x);

namespace detail {

struct EvalVisitor {
    const FunctionRep& f;
    double x;

    double operator()(const PiecewiseMonotone& pm) const {
        std::size_t k = exact_knot(pm.knots, x);
        if (k < pm.knots.size()) return pm.at_knot[k].value;
        return pm.fn(x);
    }
    double operator()(const StepFunction& s) const {
        std::size_t k = exact_knot(s.knots, x);
        if (k < s.knots.size()) return s.at_knot[k];
        return s.plateau[piece_index(s.knots, x)];
    }
    double operator()(const PointSpikes& p) const {
        auto it = std::lower_bound(p.spikes.begin(), p.spikes.end(), x,
                                   [](const std::pair<double, double>& s, double v) { return s.first < v; });
        if (it != p.spikes.end() && it->first == x) return it->second;
        return 0.0;
    }
    double operator()(const GridFunction& g) const {
        const std::size_t n = g.values.size() - 1;
        double u = (x - f.domain.a) / f.domain.length() * static_cast<double>(n);
        if (u <= 0.0) return g.values.front();
        if (u >= static_cast<double>(n)) return g.values.back();
        std::size_t i = static_cast<std::size_t>(u);
        if (i >= n) i = n - 1;
        double t = u - static_cast<double>(i);
        return (1.0 - t) * g.values[i] + t * g.values[i + 1];
    }
    double operator()(const BlackBox& b) const { return b.fn(x); }
    double operator()(const CantorRep&) const { return cantor_exact((x - f.domain.a) / f.domain.length()); }
};

} // namespace detail

inline double evaluate(const FunctionRep& f, double x) {
    f.domain.require(x, "evaluate");
    return std::visit(detail::EvalVisitor{f, x}, f.rep);
}

// One-sided limits. Representations are regulated by construction: piecewise
// and step reps carry their limits explicitly, the remaining variants are
// continuous (for BlackBox this is an assumption on the supplied evaluator).
inline double left_limit(const FunctionRep& f, double x) {
    f.domain.require(x, "left_limit");
    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep)) {
        std::size_t k = detail::exact_knot(pm->knots, x);
        if (k < pm->knots.size()) return pm->at_knot[k].left;
        return pm->fn(x);
    }
    if (const auto* s = std::get_if<StepFunction>(&f.rep)) {
        std::size_t k = detail::exact_knot(s->knots, x);
        if (k == 0) return s->at_knot[0];
        if (k < s->knots.size()) return s->plateau[k - 1];
        return s->plateau[detail::piece_index(s->knots, x)];
    }
    if (std::holds_alternative<PointSpikes>(f.rep)) return 0.0;
    return evaluate(f, x);
}

inline double right_limit(const FunctionRep& f, double x) {
    f.domain.require(x, "right_limit");
    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep)) {
        std::size_t k = detail::exact_knot(pm->knots, x);
        if (k < pm->knots.size()) return pm->at_knot[k].right;
        return pm->fn(x);
    }
    if (const auto* s = std::get_if<StepFunction>(&f.rep)) {
        std::size_t k = detail::exact_knot(s->knots, x);
        if (k + 1 == s->knots.size()) return s->at_knot.back();
        if (k < s->knots.size()) return s->plateau[k];
        return s->plateau[detail::piece_index(s->knots, x)];
    }
    if (std::holds_alternative<PointSpikes>(f.rep)) return 0.0;
    return evaluate(f, x);
}

// Structural split points: knots, spike locations, grid nodes. Lazy tail
// points are not included; stream them explicitly where needed.
inline std::vector<double> breakpoints(const FunctionRep& f) {
    std::vector<double> out;
    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep)) out = pm->knots;
    else if (const auto* s = std::get_if<StepFunction>(&f.rep)) out = s->knots;
    else if (const auto* p = std::get_if<PointSpikes>(&f.rep)) {
        out.reserve(p->spikes.size());
        for (const auto& sp : p->spikes) out.push_back(sp.first);
    } else if (const auto* g = std::get_if<GridFunction>(&f.rep)) {
        const std::size_t n = g->values.size() - 1;
        out.reserve(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            out.push_back(f.domain.a + f.domain.length() * (static_cast<double>(i) / static_cast<double>(n)));
    } else if (const auto* b = std::get_if<BlackBox>(&f.rep)) {
        out = b->hints;
    }
    return out;
}

inline FunctionRep to_grid(const FunctionRep& f, int n) {
    if (n < 2) throw BadParameter("to_grid: need at least 2 subintervals");
    GridFunction g;
    g.values.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        double x = f.domain.a + f.domain.length() * (static_cast<double>(i) / static_cast<double>(n));
        g.values.push_back(evaluate(f, x));
    }
    return FunctionRep{f.domain, std::move(g), "", {}};
}

// ---- structure queries --------------------------------------------------

inline bool is_exact_capable(const FunctionRep& f) {
    return !std::holds_alternative<BlackBox>(f.rep);
}

// Inf and sup of f over the closed cell [u, v], exact for resolved piecewise
// structure (monotone arcs attain extremes at their ends, jumps contribute
// their one-sided limits), sampled inside an unresolved lazy tail.
inline std::pair<double, double> cell_minmax(const FunctionRep& f, double u, double v) {
    if (u > v) std::swap(u, v);
    f.domain.require(u, "cell_minmax");
    f.domain.require(v, "cell_minmax");
    double lo = evaluate(f, u);
    double hi = lo;
    auto feed = [&](double y) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    };
    feed(evaluate(f, v));

    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep)) {
        feed(right_limit(f, u));
        feed(left_limit(f, v));
        auto first = std::upper_bound(pm->knots.begin(), pm->knots.end(), u);
        for (auto it = first; it != pm->knots.end() && *it < v; ++it) {
            const auto& t = pm->at_knot[static_cast<std::size_t>(it - pm->knots.begin())];
            feed(t.left);
            feed(t.value);
            feed(t.right);
        }
        if (pm->tail && u < pm->knots[1]) {
            double hi_x = std::min(v, pm->knots[1]);
            for (int i = 1; i < 32; ++i)
                feed(pm->fn(u + (hi_x - u) * (static_cast<double>(i) / 32.0)));
        }
        return {lo, hi};
    }
    if (const auto* s = std::get_if<StepFunction>(&f.rep)) {
        feed(right_limit(f, u));
        feed(left_limit(f, v));
        auto first = std::upper_bound(s->knots.begin(), s->knots.end(), u);
        for (auto it = first; it != s->knots.end() && *it < v; ++it) {
            std::size_t k = static_cast<std::size_t>(it - s->knots.begin());
            feed(s->at_knot[k]);
            if (k > 0) feed(s->plateau[k - 1]);
            if (k < s->plateau.size()) feed(s->plateau[k]);
        }
        // cell interior inside one plateau
        if (u < v && (first == s->knots.end() || *first >= v))
            feed(s->plateau[detail::piece_index(s->knots, u)]);
        return {lo, hi};
    }
    if (const auto* p = std::get_if<PointSpikes>(&f.rep)) {
        if (u < v) feed(0.0); // non-spike points exist in any nondegenerate cell
        for (const auto& sp : p->spikes)
            if (sp.first > u && sp.first < v) feed(sp.second);
        return {lo, hi};
    }
    if (const auto* g = std::get_if<GridFunction>(&f.rep)) {
        const std::size_t n = g->values.size() - 1;
        const double h = f.domain.length() / static_cast<double>(n);
        std::size_t i = static_cast<std::size_t>(std::max(0.0, std::ceil((u - f.domain.a) / h)));
        for (; i <= n; ++i) {
            double x = f.domain.a + h * static_cast<double>(i);
            if (x >= v) break;
            if (x > u) feed(g->values[i]);
        }
        return {lo, hi};
    }
    if (std::holds_alternative<CantorRep>(f.rep)) return {lo, hi}; // nondecreasing
    throw UnsupportedRep("cell_minmax: opaque evaluator has no exact cell bounds");
}

// ---- constructors -------------------------------------------------------

// Piecewise-monotone rep from a continuous evaluator and its monotonicity
// breakpoints; one-sided limits coincide with values.
inline FunctionRep make_piecewise_monotone(Interval domain, std::vector<double> knots,
                                           std::function<double(double)> fn,
                                           std::function<double(double)> dfn = nullptr,
                                           std::string name = "",
                                           std::map<std::string, double> params = {}) {
    if (knots.size() < 2 || knots.front() != domain.a || knots.back() != domain.b)
        throw BadParameter("make_piecewise_monotone: knots must span the domain");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i - 1] < knots[i]))
            throw BadParameter("make_piecewise_monotone: knots must be strictly increasing");
    PiecewiseMonotone pm;
    pm.knots = std::move(knots);
    pm.fn = std::move(fn);
    pm.dfn = std::move(dfn);
    pm.at_knot.reserve(pm.knots.size());
    for (double t : pm.knots) {
        double y = pm.fn(t);
        pm.at_knot.push_back({y, y, y});
    }
    pm.direction.reserve(pm.knots.size() - 1);
    for (std::size_t i = 0; i + 1 < pm.knots.size(); ++i) {
        double d = pm.at_knot[i + 1].value - pm.at_knot[i].value;
        pm.direction.push_back(d > 0 ? Direction::Increasing
                                     : d < 0 ? Direction::Decreasing : Direction::Constant);
    }
    return FunctionRep{domain, std::move(pm), std::move(name), std::move(params)};
}

inline FunctionRep make_black_box(Interval domain, std::function<double(double)> fn,
                                  std::function<double(double)> deriv_right = nullptr,
                                  std::function<double(double)> deriv_left = nullptr,
                                  std::vector<double> hints = {}) {
    BlackBox b;
    b.fn = std::move(fn);
    b.deriv_right = std::move(deriv_right);
    b.deriv_left = std::move(deriv_left);
    b.hints = std::move(hints);
    return FunctionRep{domain, std::move(b), "", {}};
}

inline FunctionRep make_step(Interval domain, std::vector<double> knots, std::vector<double> plateau,
                             std::vector<double> at_knot, std::string name = "",
                             std::map<std::string, double> params = {}) {
    if (knots.size() < 2 || knots.front() != domain.a || knots.back() != domain.b)
        throw BadParameter("make_step: knots must span the domain");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i - 1] < knots[i])) throw BadParameter("make_step: knots must be strictly increasing");
    if (plateau.size() + 1 != knots.size() || at_knot.size() != knots.size())
        throw BadParameter("make_step: inconsistent plateau/value counts");
    return FunctionRep{domain, StepFunction{std::move(knots), std::move(plateau), std::move(at_knot)},
                       std::move(name), std::move(params)};
}

} // namespace bv

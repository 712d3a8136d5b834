#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "bv/function_rep.hpp"

namespace bv {

struct QuadratureOptions {
    double tol = 1e-10;           // absolute tolerance target
    int max_depth = 30;           // recursion cap; estimates are accepted there
    long max_evals = 4000000;     // global evaluation budget
};

namespace quad_detail {

struct Budget {
    long remaining;
};

inline double simpson(double fa, double fm, double fb, double len) {
    return len * (fa + 4.0 * fm + fb) / 6.0;
}

inline double adapt(const std::function<double(double)>& fn, double a, double m, double b,
                    double fa, double fm, double fb, double whole, double tol, int depth,
                    Budget& budget) {
    if (depth <= 0 || budget.remaining <= 0) return whole;
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = fn(lm);
    const double frm = fn(rm);
    budget.remaining -= 2;
    if (std::isnan(flm) || std::isnan(frm))
        throw QuadratureFailure("adaptive quadrature: integrand evaluated to NaN");
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adapt(fn, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget) +
           adapt(fn, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget);
}

} // namespace quad_detail

inline double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                               const QuadratureOptions& opts = {}) {
    if (!(a < b)) return 0.0;
    quad_detail::Budget budget{opts.max_evals};
    const double m = 0.5 * (a + b);
    const double fa = fn(a), fm = fn(m), fb = fn(b);
    if (std::isnan(fa) || std::isnan(fm) || std::isnan(fb))
        throw QuadratureFailure("adaptive quadrature: integrand evaluated to NaN");
    const double whole = quad_detail::simpson(fa, fm, fb, b - a);
    return quad_detail::adapt(fn, a, m, b, fa, fm, fb, whole, opts.tol, opts.max_depth, budget);
}

// Integral over [a,b] with the integrand treated piecewise between the given
// split points (kinks, breakpoints); splits outside [a,b] are ignored.
inline double integrate_with_splits(const std::function<double(double)>& fn, double a, double b,
                                    std::vector<double> splits, QuadratureOptions opts = {}) {
    if (!(a < b)) return 0.0;
    splits.push_back(a);
    splits.push_back(b);
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
    double total = 0.0;
    QuadratureOptions piece = opts;
    double prev = a;
    for (double s : splits) {
        if (s <= a || s > b) continue;
        double hi = std::min(s, b);
        piece.tol = opts.tol * std::max(1e-3, (hi - prev) / (b - a));
        total += adaptive_simpson(fn, prev, hi, piece);
        prev = hi;
        if (prev >= b) break;
    }
    return total;
}

struct SignChunk {
    double lo;
    double hi;
    int sign; // sign of the integrand on the open chunk
};

// Partition [a,b] into chunks on which fn keeps one sign: scan each cell
// between consecutive split points, bisect every bracketed sign change.
inline std::vector<SignChunk> sign_chunks(const std::function<double(double)>& fn, double a,
                                          double b, std::vector<double> splits,
                                          int scan_per_cell = 65) {
    splits.push_back(a);
    splits.push_back(b);
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end()), splits.end());

    std::vector<double> roots;
    auto sgn = [](double v) { return v > 0.0 ? 1 : v < 0.0 ? -1 : 0; };
    for (std::size_t c = 0; c + 1 < splits.size(); ++c) {
        double lo = splits[c], hi = splits[c + 1];
        if (hi <= a || lo >= b) continue;
        lo = std::max(lo, a);
        hi = std::min(hi, b);
        double px = lo, pv = fn(lo);
        for (int i = 1; i <= scan_per_cell; ++i) {
            double x = lo + (hi - lo) * (static_cast<double>(i) / scan_per_cell);
            double v = fn(x);
            if (sgn(pv) != 0 && sgn(v) != 0 && sgn(pv) != sgn(v)) {
                double u = px, w = x, fu = pv;
                for (int it = 0; it < 80; ++it) {
                    double mid = 0.5 * (u + w);
                    double fm = fn(mid);
                    if (sgn(fm) == sgn(fu)) u = mid;
                    else w = mid;
                }
                roots.push_back(0.5 * (u + w));
            }
            px = x;
            pv = v;
        }
    }
    std::vector<double> edges;
    edges.push_back(a);
    for (double s : splits)
        if (s > a && s < b) edges.push_back(s);
    edges.insert(edges.end(), roots.begin(), roots.end());
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<SignChunk> chunks;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double mid = 0.5 * (edges[i] + edges[i + 1]);
        chunks.push_back({edges[i], edges[i + 1], sgn(fn(mid))});
    }
    return chunks;
}

// Integral of |fn|: sign-pure chunks are integrated and their absolute values
// summed, so the only error source is the quadrature itself.
inline double integrate_abs(const std::function<double(double)>& fn, double a, double b,
                            const std::vector<double>& splits, QuadratureOptions opts = {}) {
    if (!(a < b)) return 0.0;
    double total = 0.0;
    for (const auto& ch : sign_chunks(fn, a, b, splits)) {
        QuadratureOptions piece = opts;
        piece.tol = opts.tol * std::max(1e-3, (ch.hi - ch.lo) / (b - a));
        total += std::abs(adaptive_simpson(fn, ch.lo, ch.hi, piece));
    }
    return total;
}

// Aitken delta-squared extrapolation of a sequence tail; exact on sequences
// whose error decays geometrically, which covers both smooth O(h) and
// Hoelder-type O(h^alpha) sweeps run on geometric h-schedules.
inline double aitken(double v0, double v1, double v2) {
    double d = (v2 - v1) - (v1 - v0);
    if (d == 0.0 || !std::isfinite(d)) return v2;
    double out = v2 - (v2 - v1) * (v2 - v1) / d;
    return std::isfinite(out) ? out : v2;
}

// ---- prefix integrals of a representation -------------------------------

// P(x) = int_a^x f(t) dt as a reusable callable. Exact for step, grid, spike
// and staircase reps; piecewise reps get per-piece quadrature cached at the
// knots once, so later calls cost a binary search plus one partial piece.
inline std::function<double(double)> make_prefix_integrator(const FunctionRep& f,
                                                            double tol = 1e-11) {
    const Interval dom = f.domain;
    if (const auto* s = std::get_if<StepFunction>(&f.rep)) {
        auto knots = std::make_shared<std::vector<double>>(s->knots);
        auto plateau = std::make_shared<std::vector<double>>(s->plateau);
        auto prefix = std::make_shared<std::vector<double>>();
        prefix->push_back(0.0);
        for (std::size_t i = 0; i < plateau->size(); ++i)
            prefix->push_back(prefix->back() + (*plateau)[i] * ((*knots)[i + 1] - (*knots)[i]));
        return [knots, plateau, prefix](double x) {
            std::size_t i = detail::piece_index(*knots, x);
            return (*prefix)[i] + (*plateau)[i] * (x - (*knots)[i]);
        };
    }
    if (std::holds_alternative<PointSpikes>(f.rep)) {
        return [](double) { return 0.0; };
    }
    if (const auto* g = std::get_if<GridFunction>(&f.rep)) {
        auto values = std::make_shared<std::vector<double>>(g->values);
        const double h = dom.length() / static_cast<double>(g->values.size() - 1);
        auto prefix = std::make_shared<std::vector<double>>();
        prefix->push_back(0.0);
        for (std::size_t i = 0; i + 1 < values->size(); ++i)
            prefix->push_back(prefix->back() + 0.5 * ((*values)[i] + (*values)[i + 1]) * h);
        const double a = dom.a;
        return [values, prefix, h, a](double x) {
            double u = (x - a) / h;
            std::size_t n = values->size() - 1;
            if (u <= 0.0) return 0.0;
            if (u >= static_cast<double>(n)) return prefix->back();
            std::size_t i = static_cast<std::size_t>(u);
            if (i >= n) i = n - 1;
            double dx = x - (a + h * static_cast<double>(i));
            double t = dx / h;
            double fx = (1.0 - t) * (*values)[i] + t * (*values)[i + 1];
            return (*prefix)[i] + 0.5 * ((*values)[i] + fx) * dx;
        };
    }
    if (std::holds_alternative<CantorRep>(f.rep)) {
        const double a = dom.a, len = dom.length();
        return [a, len](double x) { return len * cantor_integral((x - a) / len); };
    }
    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep)) {
        auto knots = std::make_shared<std::vector<double>>(pm->knots);
        auto fn = pm->fn;
        auto prefix = std::make_shared<std::vector<double>>();
        prefix->push_back(0.0);
        QuadratureOptions opts;
        opts.tol = tol;
        for (std::size_t i = 0; i + 1 < knots->size(); ++i) {
            QuadratureOptions piece = opts;
            piece.tol = tol * std::max(1e-3, ((*knots)[i + 1] - (*knots)[i]) / dom.length());
            piece.max_evals = 20000;
            prefix->push_back(prefix->back() +
                              adaptive_simpson(fn, (*knots)[i], (*knots)[i + 1], piece));
        }
        return [knots, fn, prefix, tol](double x) {
            if (x == knots->back()) return prefix->back();
            std::size_t i = detail::piece_index(*knots, x);
            if (x == (*knots)[i]) return (*prefix)[i];
            QuadratureOptions piece;
            piece.tol = tol;
            piece.max_evals = 20000;
            return (*prefix)[i] + adaptive_simpson(fn, (*knots)[i], x, piece);
        };
    }
    const auto* bb = std::get_if<BlackBox>(&f.rep);
    auto fn = bb->fn;
    auto hints = bb->hints;
    const double a = dom.a;
    return [fn, hints, a, tol](double x) {
        QuadratureOptions opts;
        opts.tol = tol;
        return integrate_with_splits(fn, a, x, hints, opts);
    };
}

} // namespace bv

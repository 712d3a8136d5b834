#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "bv/function_rep.hpp"
#include "bv/variation.hpp"

namespace bv {

// Counting function of dyadic cells: for each of the 2^n equal subintervals
// the cell extrema [m_i, M_i] are recorded; count(y) is the number of cells
// with m_i < y < M_i (strict on both sides), a step function of y whose
// integral telescopes to the sum of cell oscillations.
struct LevelFunction {
    int depth = 0;
    std::vector<double> cell_min, cell_max;
    std::vector<double> y_breaks;  // sorted distinct extrema
    std::vector<int> counts;       // value on the open gap (y_breaks[j], y_breaks[j+1])
    double integral = 0.0;

    int count_at(double y) const {
        int c = 0;
        for (std::size_t i = 0; i < cell_min.size(); ++i)
            if (cell_min[i] < y && y < cell_max[i]) ++c;
        return c;
    }
};

// Sign of the strict crossing of level y over [c, d]: +1 upward, -1 downward,
// 0 when the endpoint values do not bracket y strictly.
inline int crossing_sign(double fc, double fd, double y) {
    if (fc < y && y < fd) return 1;
    if (fd < y && y < fc) return -1;
    return 0;
}

inline LevelFunction banach_level(const FunctionRep& f, int n) {
    if (n < 0 || n > 26) throw BadParameter("banach_level: depth must lie in [0, 26]");
    LevelFunction lf;
    lf.depth = n;
    const long cells = 1L << n;
    const double len = f.domain.length();
    lf.cell_min.reserve(cells);
    lf.cell_max.reserve(cells);
    for (long i = 0; i < cells; ++i) {
        double u = f.domain.a + len * static_cast<double>(i) / static_cast<double>(cells);
        double v = i + 1 == cells
                       ? f.domain.b
                       : f.domain.a + len * static_cast<double>(i + 1) / static_cast<double>(cells);
        auto [lo, hi] = cell_minmax(f, u, v);
        lf.cell_min.push_back(lo);
        lf.cell_max.push_back(hi);
        lf.integral += hi - lo;
    }

    // sweep in y: a cell is active strictly between its extrema, so closings
    // at a breakpoint are processed before openings
    std::vector<double> breaks;
    breaks.reserve(2 * cells);
    for (long i = 0; i < cells; ++i) {
        breaks.push_back(lf.cell_min[i]);
        breaks.push_back(lf.cell_max[i]);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    lf.y_breaks = breaks;
    if (breaks.size() >= 2) {
        std::vector<double> opens = lf.cell_min, closes = lf.cell_max;
        std::sort(opens.begin(), opens.end());
        std::sort(closes.begin(), closes.end());
        std::size_t io = 0, ic = 0;
        int active = 0;
        lf.counts.reserve(breaks.size() - 1);
        for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
            while (ic < closes.size() && closes[ic] <= breaks[j]) ++ic, --active;
            while (io < opens.size() && opens[io] <= breaks[j]) ++io, ++active;
            lf.counts.push_back(active);
        }
    }
    return lf;
}

struct BanachEntry {
    int depth;
    double integral;
};

// Partition backing the depth-n indicatrix integral: dyadic nodes merged with
// every stored breakpoint; divergent oscillation tails additionally stream
// their critical points down to the dyadic resolution 4^-n so the growth of
// the integral stays visible.
inline std::vector<double> indicatrix_partition(const FunctionRep& f, int n) {
    if (n < 0 || n > 26) throw BadParameter("indicatrix_partition: depth must lie in [0, 26]");
    const long cells = 1L << n;
    const double len = f.domain.length();
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(cells) + 1);
    for (long i = 0; i <= cells; ++i)
        pts.push_back(i == cells
                          ? f.domain.b
                          : f.domain.a + len * static_cast<double>(i) / static_cast<double>(cells));
    for (double t : breakpoints(f)) pts.push_back(t);
    if (const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep);
        pm && pm->tail && has_divergent_tail(f)) {
        double down_to = len * std::pow(0.25, n);
        if (down_to < pm->knots[1] - f.domain.a) {
            std::vector<double> streamed;
            stream_tail_points(*pm, f.domain.a + down_to, 4000000, streamed);
            pts.insert(pts.end(), streamed.begin(), streamed.end());
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

inline std::vector<BanachEntry> banach_integral_sequence(const FunctionRep& f,
                                                         const std::vector<int>& depths) {
    std::vector<BanachEntry> out;
    out.reserve(depths.size());
    const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep);
    const bool divergent = has_divergent_tail(f);
    // below the shallowest stored knot every streamed cell sits inside one
    // monotone half-oscillation, so |Δf| is already the cell oscillation
    double t_cut = divergent && pm && pm->tail ? pm->knots[1] : f.domain.a;
    for (int n : depths) {
        auto pts = indicatrix_partition(f, n);
        if (!divergent) {
            out.push_back({n, oscillation_variation(f, Partition(pts))});
            continue;
        }
        double sum = 0.0;
        std::size_t i = 0;
        if (t_cut > f.domain.a) {
            double prev = evaluate(f, pts[0]);
            while (i + 1 < pts.size() && pts[i + 1] <= t_cut) {
                double cur = evaluate(f, pts[i + 1]);
                sum += std::abs(cur - prev);
                prev = cur;
                ++i;
            }
        }
        for (; i + 1 < pts.size(); ++i) {
            auto [lo, hi] = cell_minmax(f, pts[i], pts[i + 1]);
            sum += hi - lo;
        }
        out.push_back({n, sum});
    }
    return out;
}

namespace detail {

inline constexpr double kCountInf = std::numeric_limits<double>::infinity();

} // namespace detail

// Exact number of solutions of f(x) = y: knot hits plus one root per strictly
// monotone piece whose open range brackets y; a plateau sitting at y makes
// the count infinite.
inline double indicatrix_exact(const FunctionRep& f, double y) {
    const auto* pm = std::get_if<PiecewiseMonotone>(&f.rep);
    if (!pm) throw UnsupportedRep("indicatrix_exact: requires a piecewise-monotone rep");
    if (pm->tail)
        throw UnsupportedRep("indicatrix_exact: unresolved oscillation tail has no stored count");
    double count = 0.0;
    for (const auto& t : pm->at_knot)
        if (t.value == y) count += 1.0;
    for (std::size_t i = 0; i + 1 < pm->knots.size(); ++i) {
        double r = pm->at_knot[i].right;
        double l = pm->at_knot[i + 1].left;
        if (pm->direction[i] == Direction::Constant) {
            if (r == y) return detail::kCountInf;
            continue;
        }
        if (std::min(r, l) < y && y < std::max(r, l)) count += 1.0;
    }
    return count;
}

/// Greedy realization of the corrected multiplicity at dyadic depth n: scan
// the grid left to right and count strict sign alternations of f - y; nodes
// that hit the level exactly are nudged one ulp and dropped if still exact.
// The result is a lower bound that stabilizes once the grid separates all
// crossings.
inline int corrected_multiplicity(const FunctionRep& f, double y, int n) {
    if (n < 0 || n > 26) throw BadParameter("corrected_multiplicity: depth must lie in [0, 26]");
    const long nodes = (1L << n) + 1;
    const double len = f.domain.length();
    int alternations = 0;
    int last_sign = 0;
    for (long j = 0; j < nodes; ++j) {
        double x = j + 1 == nodes
                       ? f.domain.b
                       : f.domain.a + len * static_cast<double>(j) / static_cast<double>(nodes - 1);
        double v = evaluate(f, x);
        if (v == y) {
            double nudged = std::nextafter(x, f.domain.b);
            if (nudged > f.domain.b) continue;
            v = evaluate(f, nudged);
            if (v == y) continue;
        }
        int s = v > y ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++alternations;
        last_sign = s;
    }
    return alternations;
}

} // namespace bv

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "function_rep.hpp"
#include "quadrature.hpp"
#include "variation.hpp"

// Sequences of BV functions: the BV norm and a computable distance, a
// constructive selection principle that extracts a pointwise-convergent
// subsequence on a grid, and a lower-semicontinuity probe comparing the
// variation of a limit against the variations along the sequence.

namespace bv {

// A family f_1, f_2, ... given by a generator, together with the uniform
// bound K that the selection principle needs: |f_n(a)| + T_{f_n} <= K for
// every member. Families built to break the bound on purpose can leave
// `bound` at +infinity, which turns the check into a no-op.
struct FamilySpec {
    std::function<FunctionRep(int)> generator;  // member index n >= 1
    double bound = std::numeric_limits<double>::infinity();
};

// |f(a)| + T_f[a,b]. The value part pins down the constant that total
// variation alone cannot see.
inline double bv_norm(const FunctionRep& f) {
    return std::abs(evaluate(f, f.domain.a)) + total_variation_exact(f);
}

// Distance built from the L1 gap plus the variation gap. Symmetric and
// nonnegative by inspection; the triangle inequality holds because both
// summands obey it separately.
inline double d_bv(const FunctionRep& f, const FunctionRep& g) {
    if (f.domain.a != g.domain.a || f.domain.b != g.domain.b)
        throw DomainError("d_bv: functions live on different intervals");
    double tf = total_variation_exact(f);
    double tg = total_variation_exact(g);
    std::vector<double> splits = breakpoints(f);
    std::vector<double> more = breakpoints(g);
    splits.insert(splits.end(), more.begin(), more.end());
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
    double l1 = integrate_with_splits(
        [&f, &g](double x) { return std::abs(evaluate(f, x) - evaluate(g, x)); }, f.domain.a,
        f.domain.b, splits);
    return l1 + std::abs(tf - tg);
}

namespace detail {

// One selection round at a single grid node. The active members' values at
// that node span a bracket; halve it repeatedly and keep the half holding
// the majority (ties go low, which fixes the tie-break and makes reruns
// byte-identical). Never let the active set shrink below keep_min: a
// handful of survivors is this setting's stand-in for "infinitely many
// members in the half", and later stages still need a tail to look at.
inline void bisect_node(std::vector<int>& active, const std::vector<std::vector<double>>& table,
                        std::size_t node, std::size_t keep_min) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int m : active) {
        lo = std::min(lo, table[m][node]);
        hi = std::max(hi, table[m][node]);
    }
    while (hi - lo > 1e-9 && active.size() > keep_min) {
        double mid = 0.5 * (lo + hi);
        std::vector<int> low, high;
        for (int m : active) (table[m][node] <= mid ? low : high).push_back(m);
        bool take_low = low.size() >= high.size();
        std::vector<int>& side = take_low ? low : high;
        if (side.size() < keep_min) break;
        active = std::move(side);
        if (take_low)
            hi = mid;
        else
            lo = mid;
    }
}

// Limit of the surviving members' values at one node. When the last few
// consecutive differences decay at a steady ratio the tail is treated as
// geometric and extrapolated with one Aitken step; this recovers the true
// limit exactly for tails like x^n at a fixed x. Anything that does not
// look geometric settles for the last observed value rather than inventing
// dynamics the data does not show. Three consecutive difference ratios must
// agree, which keeps oscillatory residue from faking a geometric tail.
inline double tail_limit(const std::vector<double>& v) {
    std::size_t m = v.size();
    if (m < 5) return v.back();
    double r1 = v[m - 3] - v[m - 4];
    double r2 = v[m - 2] - v[m - 3];
    double r3 = v[m - 1] - v[m - 2];
    double r0 = v[m - 4] - v[m - 5];
    if (r0 == 0.0 || r1 == 0.0 || r2 == 0.0 || r3 == 0.0) return v.back();
    double q0 = r1 / r0;
    double q1 = r2 / r1;
    double q2 = r3 / r2;
    for (double q : {q0, q1, q2})
        if (!(q > 0.0 && q < 1.0)) return v.back();
    if (std::abs(q1 - q0) > 0.05 || std::abs(q2 - q1) > 0.05) return v.back();
    return aitken(v[m - 3], v[m - 2], v[m - 1]);
}

}  // namespace detail

struct HellyResult {
    std::vector<int> indices;              // selected member indices, ascending
    FunctionRep limit;                     // grid representation of the pointwise limit
    std::vector<double> member_variation;  // exact variation of members 1..count
};

// Constructive selection: materialize `count` members, split each into its
// two nondecreasing Jordan parts, tabulate both parts on a uniform grid of
// grid_n nodes, and run nested value bisection node by node. The K-bound
// keeps every tabulated value inside a compact interval, so the bisection
// always has a majority half to descend into. The returned limit grid takes
// each node's value from the surviving tail (see detail::tail_limit).
inline HellyResult helly_select(const FamilySpec& family, int count, int grid_n) {
    if (!family.generator) throw BadParameter("helly_select: family has no generator");
    if (count < 3) throw BadParameter("helly_select: need at least three members");
    if (grid_n < 2) throw BadParameter("helly_select: need at least two grid nodes");

    std::vector<FunctionRep> members;
    std::vector<double> variations;
    members.reserve(static_cast<std::size_t>(count));
    variations.reserve(static_cast<std::size_t>(count));
    for (int n = 1; n <= count; ++n) {
        FunctionRep f = family.generator(n);
        if (!members.empty() &&
            (f.domain.a != members.front().domain.a || f.domain.b != members.front().domain.b))
            throw DomainError("helly_select: members live on different intervals");
        double tv = total_variation_exact(f);
        double norm = std::abs(evaluate(f, f.domain.a)) + tv;
        if (!(norm <= family.bound + 1e-9))
            throw BoundViolated("helly_select: member " + std::to_string(n) +
                                " breaks the uniform bound");
        variations.push_back(tv);
        members.push_back(std::move(f));
    }

    Interval dom = members.front().domain;
    std::vector<double> xs(static_cast<std::size_t>(grid_n));
    for (int i = 0; i < grid_n; ++i)
        xs[static_cast<std::size_t>(i)] =
            dom.a + dom.length() * (static_cast<double>(i) / (grid_n - 1));
    xs.back() = dom.b;

    std::vector<std::vector<double>> pos(members.size()), neg(members.size());
    for (std::size_t m = 0; m < members.size(); ++m) {
        auto parts = jordan_decompose(members[m]);
        pos[m].resize(xs.size());
        neg[m].resize(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            pos[m][i] = evaluate(parts.first, xs[i]);
            neg[m][i] = evaluate(parts.second, xs[i]);
        }
    }

    std::size_t keep_min = std::min<std::size_t>(6, members.size());
    std::vector<int> active(members.size());
    std::iota(active.begin(), active.end(), 0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        detail::bisect_node(active, pos, i, keep_min);
        detail::bisect_node(active, neg, i, keep_min);
    }

    // p - q rebuilds the member values, f(a) offset included, so the node
    // limits of the two parts combine directly into the limit grid.
    std::vector<double> limit(xs.size());
    std::vector<double> pv, qv;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        pv.clear();
        qv.clear();
        for (int m : active) {
            pv.push_back(pos[static_cast<std::size_t>(m)][i]);
            qv.push_back(neg[static_cast<std::size_t>(m)][i]);
        }
        limit[i] = detail::tail_limit(pv) - detail::tail_limit(qv);
    }

    std::vector<int> indices;
    indices.reserve(active.size());
    for (int m : active) indices.push_back(m + 1);
    return HellyResult{std::move(indices),
                       FunctionRep{dom, GridFunction{std::move(limit)}, "helly_limit", {}},
                       std::move(variations)};
}

struct LscReport {
    double limit_variation;                // T of the supplied limit representation
    double liminf_estimate;                // min over the tail window, +inf when diverging
    double gap;                            // liminf_estimate - limit_variation
    bool tail_diverging;                   // tail window strictly increasing
    bool consistent;                       // limit_variation <= liminf_estimate + tol
    std::vector<double> member_variation;  // exact variation of members 1..count
};

// Compare the variation of a proposed limit with the variations along the
// family. A finite window can only estimate a liminf: take the minimum over
// the last half of the members, and when even that window is strictly
// increasing report +infinity instead, since the window then shows no sign
// of settling and its minimum is an artifact of where the window starts.
inline LscReport lsc_experiment(const FamilySpec& family, const FunctionRep& limit_rep,
                                int count) {
    if (!family.generator) throw BadParameter("lsc_experiment: family has no generator");
    if (count < 2) throw BadParameter("lsc_experiment: need at least two members");

    std::vector<double> variations;
    variations.reserve(static_cast<std::size_t>(count));
    for (int n = 1; n <= count; ++n) {
        FunctionRep f = family.generator(n);
        double tv = total_variation_exact(f);
        if (!(std::abs(evaluate(f, f.domain.a)) + tv <= family.bound + 1e-9))
            throw BoundViolated("lsc_experiment: member " + std::to_string(n) +
                                " breaks the uniform bound");
        variations.push_back(tv);
    }

    std::size_t start = variations.size() / 2;
    double tail_min = std::numeric_limits<double>::infinity();
    bool increasing = variations.size() - start >= 3;
    for (std::size_t i = start; i < variations.size(); ++i) {
        tail_min = std::min(tail_min, variations[i]);
        if (i > start && !(variations[i] > variations[i - 1])) increasing = false;
    }
    double liminf = increasing ? std::numeric_limits<double>::infinity() : tail_min;

    double tl = total_variation_exact(limit_rep);
    return LscReport{tl,        liminf, liminf - tl, increasing, tl <= liminf + 1e-9,
                     std::move(variations)};
}

}  // namespace bv

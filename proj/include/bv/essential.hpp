#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bv/measure.hpp"
#include "bv/variation.hpp"

namespace bv {

// A sampled function together with the indices suspected of being corrupted.
// Finite index sets stand in for measure-zero exceptional sets: on a grid,
// "almost everywhere" can only mean "off a few samples".
struct CorruptedGrid {
    FunctionRep base;                         // must carry a GridFunction rep
    std::vector<std::size_t> corrupt_indices; // need not be sorted
};

// Variation of the samples that survive once the corrupted indices are
// dropped. Visiting every survivor in order already realizes the supremum
// over partitions avoiding the excluded set, so one pass suffices.
inline double restricted_variation(const CorruptedGrid& cg) {
    const auto* g = std::get_if<GridFunction>(&cg.base.rep);
    if (!g) throw UnsupportedRep("restricted_variation: input must be a sampled grid");
    const std::size_t n = g->values.size();
    std::vector<char> excluded(n, 0);
    for (std::size_t idx : cg.corrupt_indices) {
        if (idx >= n) throw BadParameter("restricted_variation: corrupt index out of range");
        excluded[idx] = 1;
    }
    double total = 0.0;
    double prev = 0.0;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (excluded[i]) continue;
        if (kept > 0) total += std::abs(g->values[i] - prev);
        prev = g->values[i];
        ++kept;
    }
    if (kept < 2) throw DegenerateGrid("restricted_variation: fewer than two samples survive");
    return total;
}

struct PhiResult {
    double value = 0.0;
    std::vector<std::size_t> exceptional;
};

// Smallest restricted variation over the supplied exceptional sets. Ties go
// to the lexicographically smallest set (compared sorted), and among equal
// sets to the one supplied first.
inline PhiResult phi_min(const FunctionRep& base,
                         const std::vector<std::vector<std::size_t>>& candidate_sets) {
    if (candidate_sets.empty()) throw EmptyCandidates("phi_min: no exceptional sets to try");
    bool have = false;
    PhiResult best;
    std::vector<std::size_t> best_sorted;
    for (const auto& cand : candidate_sets) {
        double v = restricted_variation({base, cand});
        std::vector<std::size_t> sorted = cand;
        std::sort(sorted.begin(), sorted.end());
        bool take = !have;
        if (have && v < best.value) take = true;
        if (have && v == best.value &&
            std::lexicographical_compare(sorted.begin(), sorted.end(), best_sorted.begin(),
                                         best_sorted.end()))
            take = true;
        if (take) {
            best = {v, cand};
            best_sorted = std::move(sorted);
            have = true;
        }
    }
    return best;
}

struct PhiSearch {
    double value = 0.0;
    std::vector<std::size_t> exceptional;
    bool exhaustive = false; // false means a greedy upper bound, not a certified minimum
};

// Infimum of the restricted variation over interior index sets of bounded
// size. Small problems are enumerated outright. Past that, a greedy pass
// repeatedly drops the sample whose removal buys the largest reduction,
// which bounds the true minimum from above; removal never increases the
// telescoping sum, so the loop stops as soon as the best gain hits zero.
inline PhiSearch phi_search(const FunctionRep& base, std::size_t max_size) {
    const auto* g = std::get_if<GridFunction>(&base.rep);
    if (!g) throw UnsupportedRep("phi_search: input must be a sampled grid");
    const auto& v = g->values;
    const std::size_t n = v.size();
    const std::size_t interior = n > 2 ? n - 2 : 0;
    const std::size_t k = std::min(max_size, interior);

    if (n <= 40 && k <= 3) {
        std::vector<std::vector<std::size_t>> cands;
        cands.push_back({});
        for (std::size_t m = 1; m <= k; ++m) {
            std::vector<std::size_t> idx(m);
            for (std::size_t i = 0; i < m; ++i) idx[i] = i + 1;
            while (true) {
                cands.push_back(idx);
                std::size_t pos = m;
                while (pos > 0 && idx[pos - 1] == interior - (m - pos)) --pos;
                if (pos == 0) break;
                ++idx[pos - 1];
                for (std::size_t j = pos; j < m; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
        auto r = phi_min(base, cands);
        return {r.value, std::move(r.exceptional), true};
    }

    std::vector<std::size_t> left(n), right(n);
    for (std::size_t i = 0; i < n; ++i) {
        left[i] = i == 0 ? n : i - 1;
        right[i] = i + 1 == n ? n : i + 1;
    }
    std::vector<char> removed(n, 0);
    std::vector<std::size_t> chosen;
    for (std::size_t step = 0; step < k; ++step) {
        double best_gain = 0.0;
        std::size_t best_i = n;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (removed[i]) continue;
            const double a = v[left[i]], m = v[i], b = v[right[i]];
            const double gain = std::abs(m - a) + std::abs(b - m) - std::abs(b - a);
            if (gain > best_gain) {
                best_gain = gain;
                best_i = i;
            }
        }
        if (best_i == n) break;
        removed[best_i] = 1;
        chosen.push_back(best_i);
        right[left[best_i]] = right[best_i];
        left[right[best_i]] = left[best_i];
    }
    std::sort(chosen.begin(), chosen.end());
    double value = restricted_variation({base, chosen});
    return {value, std::move(chosen), false};
}

namespace detail {

inline double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    return 0.5 * (*std::max_element(v.begin(), mid) + *mid);
}

} // namespace detail

// Heuristic estimator for raw samples: median-filter the grid (window 5,
// edges replicated), flag samples straying more than 6 median absolute
// deviations from the filtered track, and return the variation of the rest.
// The constants are tuned for isolated corruption on smooth data. With MAD
// zero (more than half the residuals vanish, as on piecewise-monotone data)
// the flag condition degenerates to "any nonzero residual", which is still
// the behavior wanted there: monotone stretches produce exact zeros.
inline double essential_variation_estimate(const FunctionRep& g) {
    const auto* gr = std::get_if<GridFunction>(&g.rep);
    if (!gr) throw UnsupportedRep("essential_variation_estimate: input must be a sampled grid");
    const auto& v = gr->values;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
    if (n < 8) throw DegenerateGrid("essential_variation_estimate: need at least 8 samples");

    const std::ptrdiff_t half = 2;
    std::vector<double> resid(v.size());
    std::vector<double> window;
    window.reserve(5);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        window.clear();
        for (std::ptrdiff_t j = i - half; j <= i + half; ++j)
            window.push_back(v[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(j, 0, n - 1))]);
        resid[static_cast<std::size_t>(i)] =
            v[static_cast<std::size_t>(i)] - detail::median_of(window);
    }
    std::vector<double> absr = resid;
    for (double& r : absr) r = std::abs(r);
    const double mad = detail::median_of(std::move(absr));

    CorruptedGrid cg{g, {}};
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(resid[i]) > 6.0 * mad) cg.corrupt_indices.push_back(i);
    return restricted_variation(cg);
}

// The two canonical representatives of a measure's primitive: accumulate
// mass strictly below x (left continuous at atoms) or up to and including x
// (right continuous). They agree away from the atoms and both spend exactly
// |w| of variation crossing an atom of weight w.
struct AdmissiblePair {
    FunctionRep f_left;
    FunctionRep f_right;
    double constant = 0.0;
};

namespace detail {

// Shared builder. theta = 1 places each atom's knot value at the left limit,
// theta = 0 at the right limit, anything between parks it mid-jump; the
// variation through the knot is |w| in every case.
inline FunctionRep measure_representative(const FiniteSignedMeasure& mu, double C, double theta,
                                          std::string label) {
    const Interval dom = mu.domain;
    const bool with_density = !is_zero_step(mu.ac_density);
    for (const auto& s : mu.singular) {
        if (s.kind == "cantor") {
            if (with_density)
                throw UnsupportedRep(
                    "admissible representatives: density plus staircase mixes are not resolvable "
                    "into monotone pieces");
        } else if (!std::holds_alternative<GridFunction>(mu.ac_density.rep)) {
            throw UnsupportedRep(
                "admissible representatives: numeric singular residue needs its source grid");
        }
    }

    std::vector<double> knots{dom.a, dom.b};
    if (with_density) {
        auto bp = breakpoints(mu.ac_density);
        knots.insert(knots.end(), bp.begin(), bp.end());
    }
    for (const auto& [x, w] : mu.atoms) {
        (void)w;
        if (!(x > dom.a && x < dom.b))
            throw BadParameter("admissible representatives: atoms must lie strictly inside");
        knots.push_back(x);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    auto atoms = std::make_shared<const std::vector<std::pair<double, double>>>(mu.atoms);
    auto prefix = mu.ac_prefix;
    std::vector<std::function<double(double)>> sing;
    sing.reserve(mu.singular.size());
    for (const auto& s : mu.singular) sing.push_back(s.cdf);
    auto sing_sh =
        std::make_shared<const std::vector<std::function<double(double)>>>(std::move(sing));

    auto accumulate = [atoms, prefix, sing_sh, C](double x) {
        double t = C + (prefix ? prefix(x) : 0.0);
        for (const auto& [loc, w] : *atoms)
            if (loc < x) t += w;
        for (const auto& s : *sing_sh) t += s(x);
        return t;
    };

    std::function<double(double)> dfn;
    if (with_density) {
        auto den = std::make_shared<const FunctionRep>(mu.ac_density);
        dfn = [den](double x) { return evaluate(*den, x); };
    }

    auto f = make_piecewise_monotone(dom, std::move(knots), accumulate, std::move(dfn),
                                     std::move(label), {{"C", C}, {"theta", theta}});
    auto& pm = std::get<PiecewiseMonotone>(f.rep);
    for (const auto& [loc, w] : *atoms) {
        auto it = std::lower_bound(pm.knots.begin(), pm.knots.end(), loc);
        auto& t = pm.at_knot[static_cast<std::size_t>(it - pm.knots.begin())];
        // accumulate() sums atoms strictly below its argument, so the stored
        // value at loc is currently the left limit
        t.right = t.left + w;
        t.value = t.left + (1.0 - theta) * w;
    }
    for (std::size_t i = 0; i + 1 < pm.knots.size(); ++i) {
        double d = pm.at_knot[i + 1].left - pm.at_knot[i].right;
        pm.direction[i] = d > 0.0   ? Direction::Increasing
                          : d < 0.0 ? Direction::Decreasing
                                    : Direction::Constant;
    }
    return f;
}

} // namespace detail

inline AdmissiblePair admissible_representatives(const FiniteSignedMeasure& mu, double C) {
    return {detail::measure_representative(mu, C, 1.0, "f_left"),
            detail::measure_representative(mu, C, 0.0, "f_right"), C};
}

inline FunctionRep admissible_blend(const FiniteSignedMeasure& mu, double C, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw BadParameter("admissible_blend: theta must lie in [0, 1]");
    return detail::measure_representative(mu, C, theta, "f_blend");
}

} // namespace bv

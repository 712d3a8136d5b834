#pragma once

// Independent reference computations for the test suite. Everything here is
// deliberately written from first principles (simple recursions, brute-force
// scans, fixed-step sums) and must not call into the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

// Staircase approximants by the textbook recursion: level 0 is the identity,
// each level maps the left third through the previous level scaled by 1/2,
// freezes the middle third at 1/2, and mirrors the right third up.
inline double cantor_level_recursive(int n, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (n == 0) return x;
    if (x <= 1.0 / 3.0) return 0.5 * cantor_level_recursive(n - 1, 3.0 * x);
    if (x < 2.0 / 3.0) return 0.5;
    return 0.5 + 0.5 * cantor_level_recursive(n - 1, 3.0 * x - 2.0);
}

// Limit value by iterating levels until successive approximants agree to
// 2^-40; returns the settled value.
inline double cantor_limit(double x) {
    double prev = cantor_level_recursive(0, x);
    for (int n = 1; n < 80; ++n) {
        double cur = cantor_level_recursive(n, x);
        if (std::abs(cur - prev) < std::ldexp(1.0, -40)) return cur;
        prev = cur;
    }
    return prev;
}

// Mediant enumeration of the rationals in ]0,1[, built level by level rather
// than with an explicit queue.
inline std::vector<double> mediant_rationals(int count) {
    std::vector<std::pair<long long, long long>> level = {{1, 2}};
    std::vector<std::pair<long long, long long>> bounds_lo = {{0, 1}};
    std::vector<std::pair<long long, long long>> bounds_hi = {{1, 1}};
    std::vector<double> out;
    while (static_cast<int>(out.size()) < count) {
        std::vector<std::pair<long long, long long>> next, nlo, nhi;
        for (std::size_t i = 0; i < level.size() && static_cast<int>(out.size()) < count; ++i) {
            out.push_back(static_cast<double>(level[i].first) / static_cast<double>(level[i].second));
            next.push_back({bounds_lo[i].first + level[i].first, bounds_lo[i].second + level[i].second});
            nlo.push_back(bounds_lo[i]);
            nhi.push_back(level[i]);
            next.push_back({level[i].first + bounds_hi[i].first, level[i].second + bounds_hi[i].second});
            nlo.push_back(level[i]);
            nhi.push_back(bounds_hi[i]);
        }
        level = std::move(next);
        bounds_lo = std::move(nlo);
        bounds_hi = std::move(nhi);
    }
    out.resize(static_cast<std::size_t>(count));
    return out;
}

// Number of solutions of f(x) = y on [a,b], counted on a fixed fine mesh:
// nodes within `node_tol` of y count as roots, and each strict sign change
// between consecutive non-root nodes adds one.
inline long count_level_crossings(const std::function<double(double)>& f, double a, double b,
                                  double y, double mesh = 1e-5, double node_tol = 1e-12) {
    long n = static_cast<long>(std::ceil((b - a) / mesh));
    long roots = 0;
    int prev_sign = 0;
    for (long i = 0; i <= n; ++i) {
        double x = i == n ? b : a + (b - a) * (static_cast<double>(i) / static_cast<double>(n));
        double v = f(x) - y;
        if (std::abs(v) <= node_tol) {
            ++roots;
            continue; // a node root resets the sign tracking
        }
        int s = v > 0.0 ? 1 : -1;
        if (prev_sign != 0 && s != prev_sign) ++roots;
        prev_sign = s;
    }
    return roots;
}

// Fixed-step composite Simpson rule (n must be even).
inline double simpson_fixed(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 != 0) ++n;
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + h * i) * (i % 2 == 0 ? 2.0 : 4.0);
    return s * h / 3.0;
}

// Variation of sample values with the listed indices removed.
inline double variation_without(const std::vector<double>& values, std::uint64_t drop_mask) {
    double s = 0.0;
    bool have = false;
    double prev = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (drop_mask & (1ULL << i)) continue;
        if (have) s += std::abs(values[i] - prev);
        prev = values[i];
        have = true;
    }
    return s;
}

// Brute-force minimum of the restricted variation over all subsets of at
// most `max_drop` indices; requires values.size() <= 24.
inline std::pair<double, std::uint64_t> min_restricted_variation(const std::vector<double>& values,
                                                                 int max_drop) {
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_mask = 0;
    std::uint64_t full = 1ULL << values.size();
    for (std::uint64_t mask = 0; mask < full; ++mask) {
        int bits = __builtin_popcountll(mask);
        if (bits > max_drop) continue;
        if (values.size() - static_cast<std::size_t>(bits) < 2) continue;
        double v = variation_without(values, mask);
        if (v < best - 1e-15) {
            best = v;
            best_mask = mask;
        }
    }
    return {best, best_mask};
}

// Plain midpoint Riemann-Stieltjes sum on a uniform partition.
inline double rs_sum(const std::function<double(double)>& f, const std::function<double(double)>& g,
                     double a, double b, long cells) {
    double s = 0.0;
    double prev_g = g(a);
    for (long i = 1; i <= cells; ++i) {
        double hi = i == cells ? b : a + (b - a) * (static_cast<double>(i) / static_cast<double>(cells));
        double mid = a + (b - a) * ((static_cast<double>(i) - 0.5) / static_cast<double>(cells));
        double cur_g = g(hi);
        s += f(mid) * (cur_g - prev_g);
        prev_g = cur_g;
    }
    return s;
}

// Largest partition sum found over `tries` random partitions; a certified
// lower bound for the total variation.
inline double random_partition_variation(const std::function<double(double)>& f, double a, double b,
                                         int tries, int max_points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(a, b);
    std::uniform_int_distribution<int> un(2, max_points);
    double best = 0.0;
    for (int t = 0; t < tries; ++t) {
        std::vector<double> pts = {a, b};
        int n = un(rng);
        for (int i = 0; i < n; ++i) pts.push_back(ux(rng));
        std::sort(pts.begin(), pts.end());
        double s = 0.0;
        for (std::size_t i = 1; i < pts.size(); ++i) s += std::abs(f(pts[i]) - f(pts[i - 1]));
        best = std::max(best, s);
    }
    return best;
}

} // namespace oracle

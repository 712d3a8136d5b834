#pragma once

#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "bv/function_rep.hpp"

namespace bv {

inline constexpr double kPi = 3.14159265358979323846;

// First `count` rationals in ]0,1[ in breadth-first mediant order:
// 1/2, 1/3, 2/3, 1/4, 2/5, 3/5, 3/4, ...
inline std::vector<double> stern_brocot_rationals(int count) {
    if (count < 0) throw BadParameter("stern_brocot_rationals: count must be nonnegative");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    std::deque<std::array<long long, 4>> queue; // (pl, ql, pr, qr)
    queue.push_back({0, 1, 1, 1});
    while (static_cast<int>(out.size()) < count) {
        auto [pl, ql, pr, qr] = queue.front();
        queue.pop_front();
        long long pm = pl + pr, qm = ql + qr;
        out.push_back(static_cast<double>(pm) / static_cast<double>(qm));
        queue.push_back({pl, ql, pm, qm});
        queue.push_back({pm, qm, pr, qr});
    }
    return out;
}

namespace catalog_detail {

inline double need(const std::map<std::string, double>& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw BadParameter("catalog: missing parameter '" + key + "'");
    return it->second;
}

inline double get_or(const std::map<std::string, double>& params, const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
}

inline long need_int(const std::map<std::string, double>& params, const std::string& key, long lo,
                     long hi) {
    double v = need(params, key);
    double r = std::round(v);
    if (std::abs(v - r) > 1e-9 || r < static_cast<double>(lo) || r > static_cast<double>(hi))
        throw BadParameter("catalog: parameter '" + key + "' must be an integer in [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<long>(r);
}

// x^power * sin(1/x) on [0,1] with critical points materialized down to
// `eps`; the remaining oscillations toward 0 stay behind a lazy tail marker.
inline FunctionRep oscillatory(int power, double eps, std::string name) {
    std::vector<double> descending;
    long k = 0;
    for (;;) {
        double x = oscillation_critical_point(power, k + 1);
        if (x < eps) break;
        descending.push_back(x);
        ++k;
    }
    PiecewiseMonotone pm;
    pm.knots.reserve(descending.size() + 2);
    pm.knots.push_back(0.0);
    for (auto it = descending.rbegin(); it != descending.rend(); ++it) pm.knots.push_back(*it);
    pm.knots.push_back(1.0);
    if (power == 1) {
        pm.fn = [](double x) { return x == 0.0 ? 0.0 : x * std::sin(1.0 / x); };
        pm.dfn = [](double x) {
            return x == 0.0 ? 0.0 : std::sin(1.0 / x) - std::cos(1.0 / x) / x;
        };
    } else {
        pm.fn = [](double x) { return x == 0.0 ? 0.0 : x * x * std::sin(1.0 / x); };
        pm.dfn = [](double x) {
            return x == 0.0 ? 0.0 : 2.0 * x * std::sin(1.0 / x) - std::cos(1.0 / x);
        };
    }
    pm.at_knot.reserve(pm.knots.size());
    pm.at_knot.push_back({0.0, 0.0, 0.0});
    for (std::size_t i = 1; i < pm.knots.size(); ++i) {
        double y = pm.fn(pm.knots[i]);
        pm.at_knot.push_back({y, y, y});
    }
    pm.direction.reserve(pm.knots.size() - 1);
    pm.direction.push_back(Direction::Constant); // unresolved tail piece
    for (std::size_t i = 1; i + 1 < pm.knots.size(); ++i) {
        double d = pm.at_knot[i + 1].value - pm.at_knot[i].value;
        pm.direction.push_back(d > 0 ? Direction::Increasing
                                     : d < 0 ? Direction::Decreasing : Direction::Constant);
    }
    pm.tail = LazyTail{power, static_cast<long>(descending.size())};
    return FunctionRep{Interval(0.0, 1.0), std::move(pm), std::move(name),
                       {{"eps", eps}}};
}

// Knots of (amp) * sin(freq * x) on [0, 2*pi]: ends plus interior critical
// points (pi/2 + k*pi)/freq.
inline FunctionRep scaled_sine(long freq, double amp, std::string name,
                               std::map<std::string, double> params) {
    std::vector<double> knots;
    knots.push_back(0.0);
    for (long k = 0;; ++k) {
        double x = (kPi / 2.0 + static_cast<double>(k) * kPi) / static_cast<double>(freq);
        if (x >= 2.0 * kPi) break;
        knots.push_back(x);
    }
    knots.push_back(2.0 * kPi);
    double w = static_cast<double>(freq);
    auto f = make_piecewise_monotone(
        Interval(0.0, 2.0 * kPi), std::move(knots),
        [w, amp](double x) { return amp * std::sin(w * x); },
        [w, amp](double x) { return amp * w * std::cos(w * x); }, std::move(name), std::move(params));
    // The critical values are exactly +-amp and an integer frequency makes the
    // endpoint values exact zeros, so pin the stored knot values rather than
    // keeping the rounding dust of sin(2*pi) and friends. Level counts at
    // y = 0 and y = +-amp depend on this.
    auto& pm = std::get<PiecewiseMonotone>(f.rep);
    for (std::size_t i = 0; i < pm.at_knot.size(); ++i) {
        double v = 0.0;
        if (i > 0 && i + 1 < pm.at_knot.size()) v = (i % 2 == 1) ? amp : -amp;
        pm.at_knot[i].left = pm.at_knot[i].value = pm.at_knot[i].right = v;
    }
    return f;
}

} // namespace catalog_detail

inline const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {
        "const",   "linear",    "power",     "sin",    "x_sin_inv", "x2_sin_inv",
        "abs",     "cantor",    "spikes",    "heaviside", "xn_family", "sin_n", "sin_n2"};
    return names;
}

// Default materialization scale for the oscillatory family: fine enough that
// the truncated-tail variation error of x^2*sin(1/x) stays below 1e-5.
inline constexpr double kOscillatoryEps = 4e-6;

inline FunctionRep catalog_get(const std::string& name,
                               const std::map<std::string, double>& params = {}) {
    using namespace catalog_detail;
    if (name == "const") {
        double c = need(params, "c");
        return make_step(Interval(0.0, 1.0), {0.0, 1.0}, {c}, {c, c}, "const", {{"c", c}});
    }
    if (name == "linear") {
        double m = need(params, "m");
        double c = get_or(params, "c", 0.0);
        return make_piecewise_monotone(
            Interval(0.0, 1.0), {0.0, 1.0}, [m, c](double x) { return m * x + c; },
            [m](double) { return m; }, "linear", {{"m", m}, {"c", c}});
    }
    if (name == "power" || name == "xn_family") {
        long n = need_int(params, "n", 1, 1000000);
        double nd = static_cast<double>(n);
        auto fn = [nd](double x) { return std::pow(x, nd); };
        auto dfn = [nd](double x) { return nd * std::pow(x, nd - 1.0); };
        if (name == "xn_family")
            return make_piecewise_monotone(Interval(0.0, 1.0), {0.0, 1.0}, fn, dfn, name,
                                           {{"n", nd}});
        std::vector<double> knots =
            n % 2 == 0 ? std::vector<double>{-1.0, 0.0, 1.0} : std::vector<double>{-1.0, 1.0};
        return make_piecewise_monotone(Interval(-1.0, 1.0), std::move(knots), fn, dfn, name,
                                       {{"n", nd}});
    }
    if (name == "sin") return scaled_sine(1, 1.0, "sin", {});
    if (name == "x_sin_inv")
        return oscillatory(1, get_or(params, "eps", kOscillatoryEps), "x_sin_inv");
    if (name == "x2_sin_inv")
        return oscillatory(2, get_or(params, "eps", kOscillatoryEps), "x2_sin_inv");
    if (name == "abs") {
        return make_piecewise_monotone(
            Interval(-1.0, 1.0), {-1.0, 0.0, 1.0}, [](double x) { return std::abs(x); },
            [](double x) { return x < 0.0 ? -1.0 : 1.0; }, "abs", {});
    }
    if (name == "cantor") {
        long level = params.count("level") ? need_int(params, "level", 0, 60) : 16;
        return FunctionRep{Interval(0.0, 1.0), CantorRep{static_cast<int>(level)}, "cantor",
                           {{"level", static_cast<double>(level)}}};
    }
    if (name == "spikes") {
        double c = need(params, "c");
        if (!(c > 0.0 && c < 1.0)) throw BadParameter("spikes: c must lie strictly in (0, 1)");
        long K = need_int(params, "K", 1, 1000000);
        auto locs = stern_brocot_rationals(static_cast<int>(K));
        PointSpikes ps;
        ps.spikes.reserve(locs.size());
        double value = 1.0;
        for (double r : locs) {
            value *= c;
            ps.spikes.push_back({r, value});
        }
        std::sort(ps.spikes.begin(), ps.spikes.end());
        return FunctionRep{Interval(0.0, 1.0), std::move(ps), "spikes",
                           {{"c", c}, {"K", static_cast<double>(K)}}};
    }
    if (name == "heaviside") {
        double c = need(params, "c");
        if (!(c > 0.0 && c < 1.0)) throw BadParameter("heaviside: c must lie strictly in (0, 1)");
        return make_step(Interval(0.0, 1.0), {0.0, c, 1.0}, {0.0, 1.0}, {0.0, 1.0, 1.0}, "heaviside",
                         {{"c", c}});
    }
    if (name == "sin_n") {
        long n = need_int(params, "n", 1, 100000);
        return catalog_detail::scaled_sine(n, 1.0 / static_cast<double>(n), "sin_n",
                                           {{"n", static_cast<double>(n)}});
    }
    if (name == "sin_n2") {
        long n = need_int(params, "n", 1, 256);
        return catalog_detail::scaled_sine(n * n, 1.0 / static_cast<double>(n), "sin_n2",
                                           {{"n", static_cast<double>(n)}});
    }
    throw UnknownName("catalog: no function named '" + name + "'");
}

} // namespace bv

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "bv/decompose.hpp"
#include "bv/function_rep.hpp"
#include "bv/quadrature.hpp"
#include "bv/variation.hpp"

namespace bv {

// Forward moving-average window: 0 < h < delta < (b - a), so the averaged
// function lives on [a, b - delta] with room to evaluate f up to x + h.
struct MeanParams {
    double delta;
    double h;

    void validate(const Interval& dom) const {
        if (!(h > 0.0 && h < delta && delta < dom.length()))
            throw BadParameter("MeanParams: need 0 < h < delta < (b - a)");
    }
};

namespace detail {

inline void require_continuous_for_mean(const FunctionRep& f) {
    if (has_divergent_tail(f)) throw NotBV("integral_mean: input is not of bounded variation");
    if (std::holds_alternative<BlackBox>(f.rep)) return; // continuity is the caller's contract
    SaltusData jumps = detect_jump_data(f);
    if (!jumps.jumps.empty() || jumps.start_jump != 0.0 || jumps.end_jump != 0.0)
        throw DiscontinuousInput("integral_mean: input has jumps");
}

} // namespace detail

// f^h(x) = (1/h) * int_0^h f(x+t) dt on [a, b - delta]. The result is an
// opaque rep built on a shared prefix integral of f; its derivative has the
// closed form (f(x+h) - f(x))/h, and the integral of its absolute value is
// computed exactly from prefix differences between sign changes, which keeps
// downstream variation and AC checks sharp.
inline FunctionRep integral_mean(const FunctionRep& f, const MeanParams& p) {
    p.validate(f.domain);
    detail::require_continuous_for_mean(f);

    const double h = p.h;
    const double b = f.domain.b;
    const Interval mean_dom{f.domain.a, f.domain.b - p.delta};
    auto base = std::make_shared<const FunctionRep>(f);
    auto prefix = std::make_shared<std::function<double(double)>>(make_prefix_integrator(f));

    auto hints = std::make_shared<std::vector<double>>();
    for (double t : breakpoints(f)) {
        if (t > mean_dom.a && t < mean_dom.b) hints->push_back(t);
        double shifted = t - h;
        if (shifted > mean_dom.a && shifted < mean_dom.b) hints->push_back(shifted);
    }
    std::sort(hints->begin(), hints->end());
    hints->erase(std::unique(hints->begin(), hints->end()), hints->end());

    BlackBox bb;
    bb.fn = [prefix, h](double x) { return ((*prefix)(x + h) - (*prefix)(x)) / h; };
    auto slope = [base, h, b](double x) {
        return (evaluate(*base, std::min(x + h, b)) - evaluate(*base, x)) / h;
    };
    bb.deriv_right = slope;
    bb.deriv_left = slope;
    bb.hints = *hints;
    bb.abs_deriv_integral = [base, prefix, hints, h, b](double lo, double hi) {
        if (!(lo < hi)) return 0.0;
        auto g = [&](double x) { return evaluate(*base, std::min(x + h, b)) - evaluate(*base, x); };
        auto chunks = sign_chunks(g, lo, hi, *hints);
        // walk chunk edges once; the window integral of f over [x, x+h]
        // comes straight from the prefix
        auto window = [&](double x) { return (*prefix)(std::min(x + h, b)) - (*prefix)(x); };
        double total = 0.0;
        double prev = window(chunks.front().lo);
        for (const auto& ch : chunks) {
            double cur = window(ch.hi);
            total += std::abs(cur - prev);
            prev = cur;
        }
        return total / h;
    };
    return FunctionRep{mean_dom, std::move(bb), "", {{"h", p.h}, {"delta", p.delta}}};
}

// T of the averaged function over `sub`, i.e. (1/h) * int_sub |f(x+h) - f(x)| dx.
inline double mean_variation(const FunctionRep& f, const MeanParams& p, const Interval& sub) {
    FunctionRep mean = integral_mean(f, p);
    if (sub.a < mean.domain.a || sub.b > mean.domain.b)
        throw DomainError("mean_variation: subinterval must fit inside [a, b - delta]");
    return std::get<BlackBox>(mean.rep).abs_deriv_integral(sub.a, sub.b);
}

struct MeanSweep {
    std::vector<std::pair<double, double>> entries; // (h, variation of f^h on sub)
    double limit = 0.0;                             // extrapolated h -> 0 value
};

// Sweep of mean variations over a decreasing h-schedule (default: geometric,
// ratio 1/2, six terms from delta/2) with an extrapolated limit.
inline MeanSweep variation_via_means(const FunctionRep& f, std::vector<double> h_schedule,
                                     const Interval& sub) {
    if (sub.a < f.domain.a || !(sub.b < f.domain.b))
        throw DomainError("variation_via_means: subinterval must leave room at the right end");
    const double delta = f.domain.b - sub.b;
    if (h_schedule.empty()) {
        double h = delta / 2.0;
        for (int i = 0; i < 6; ++i, h /= 2.0) h_schedule.push_back(h);
    }
    MeanSweep sweep;
    sweep.entries.reserve(h_schedule.size());
    for (double h : h_schedule) {
        if (!(h > 0.0 && h < delta))
            throw BadParameter("variation_via_means: schedule entry outside (0, delta)");
        sweep.entries.push_back({h, mean_variation(f, {delta, h}, sub)});
    }
    std::size_t n = sweep.entries.size();
    if (n >= 3)
        sweep.limit = aitken(sweep.entries[n - 3].second, sweep.entries[n - 2].second,
                             sweep.entries[n - 1].second);
    else if (n > 0)
        sweep.limit = sweep.entries.back().second;
    return sweep;
}

} // namespace bv

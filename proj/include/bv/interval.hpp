#pragma once

#include <cmath>
#include <string>

#include "bv/errors.hpp"

namespace bv {

// Closed interval [a,b] with a < b, both finite.
struct Interval {
    double a;
    double b;

    Interval(double a_, double b_) : a(a_), b(b_) {
        if (!std::isfinite(a) || !std::isfinite(b))
            throw BadParameter("interval endpoints must be finite");
        if (!(a < b))
            throw BadParameter("interval requires a < b, got [" + std::to_string(a_) +
                               ", " + std::to_string(b_) + "]");
    }

    double length() const { return b - a; }

    bool contains(double x) const { return x >= a && x <= b; }

    bool contains_interior(double x) const { return x > a && x < b; }

    void require(double x, const char* who) const {
        if (!contains(x))
            throw DomainError(std::string(who) + ": x = " + std::to_string(x) +
                              " outside [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }
};

inline bool operator==(const Interval& u, const Interval& v) { return u.a == v.a && u.b == v.b; }

} // namespace bv

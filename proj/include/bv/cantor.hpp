#pragma once

#include <cmath>

namespace bv {

// Staircase function on [0,1]: scan ternary digits of x; while no digit 1 has
// appeared, emit each digit 2 as a binary digit 1; the first ternary digit 1
// becomes a final binary 1 and the scan stops. 64 digits exhaust double
// precision, so the truncation error is below 1 ulp.
inline double cantor_exact(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double out = 0.0;
    double bit = 0.5;
    for (int i = 0; i < 64 && x > 0.0; ++i) {
        x *= 3.0;
        int digit = static_cast<int>(x);
        if (digit > 2) digit = 2; // guard against x*3 landing exactly on 3.0
        x -= digit;
        if (digit == 1) {
            out += bit;
            break;
        }
        if (digit == 2) out += bit;
        bit *= 0.5;
    }
    return out;
}

// Prefix integral of the staircase: I(x) = int_0^x cantor_exact. Self-similar
// recursion, I(x) = I(3x)/6 on the left third, affine on the middle, and
// I(x) = 1/4 + (x - 2/3)/2 + I(3x - 2)/6 on the right third; the scale factor
// shrinks by 6 per level, so ~65 levels reach full precision.
inline double cantor_integral(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 0.5;
    double acc = 0.0;
    double factor = 1.0;
    for (int i = 0; i < 65; ++i) {
        if (x <= 1.0 / 3.0) {
            factor /= 6.0;
            x *= 3.0;
        } else if (x < 2.0 / 3.0) {
            return acc + factor * (1.0 / 12.0 + 0.5 * (x - 1.0 / 3.0));
        } else {
            acc += factor * (0.25 + 0.5 * (x - 2.0 / 3.0));
            factor /= 6.0;
            x = 3.0 * x - 2.0;
        }
        if (x <= 0.0) return acc;
        if (x >= 1.0) return acc + 0.5 * factor;
    }
    return acc;
}

// Level-n approximant: same digit scan for n levels, then linear interpolation
// across the remaining window. Level 0 is the identity.
inline double cantor_level(int n, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double out = 0.0;
    double bit = 0.5;
    for (int i = 0; i < n; ++i) {
        x *= 3.0;
        int digit = static_cast<int>(x);
        if (digit > 2) digit = 2;
        x -= digit;
        if (digit == 1) return out + bit;
        if (digit == 2) out += bit;
        bit *= 0.5;
        if (x == 0.0) return out;
    }
    return out + 2.0 * bit * x;
}

} // namespace bv

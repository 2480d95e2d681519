#pragma once

#include <cmath>
#include <numbers>

#include "blowuplab/errors.hpp"

namespace blowuplab {

/// Gamma(two_x / 2) for positive half-integer arguments, evaluated exactly by
/// the recurrence Gamma(x+1) = x Gamma(x) from Gamma(1) = 1, Gamma(1/2) = sqrt(pi).
inline double gamma_half_integer(int two_x) {
    if (two_x < 1) throw InvalidParams("gamma_half_integer requires two_x >= 1");
    double g;
    int t;
    if (two_x % 2 == 0) {
        g = 1.0; // Gamma(1)
        t = 2;
    } else {
        g = std::sqrt(std::numbers::pi); // Gamma(1/2)
        t = 1;
    }
    for (; t < two_x; t += 2) g *= 0.5 * t;
    return g;
}

} // namespace blowuplab

#pragma once

#include <cmath>
#include <span>

namespace dce {

/// −x ln x with the continuity value 0 at x = 0. Entropies are in nats.
inline double entropy_term(double x) noexcept {
    return x > 0.0 ? -x * std::log(x) : 0.0;
}

/// Shannon entropy of a probability vector. Non-positive entries contribute 0.
inline double shannon_entropy(std::span<const double> probabilities) noexcept {
    double s = 0.0;
    for (double p : probabilities) s += entropy_term(p);
    return s;
}

}  // namespace dce

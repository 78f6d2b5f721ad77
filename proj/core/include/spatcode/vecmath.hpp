#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace spatcode {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    const std::size_t n = a.size() < b.size() ? a.size() : b.size();
    for (std::size_t i = 0; i < n; ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

inline double l2_norm(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) {
        sum += x * x;
    }
    return std::sqrt(sum);
}

// Scales `v` to unit norm; leaves an all-zero vector untouched.
inline void normalize_in_place(std::vector<double>& v) {
    const double norm = l2_norm(v);
    if (norm > 0.0) {
        for (double& x : v) {
            x /= norm;
        }
    }
}

}  // namespace spatcode

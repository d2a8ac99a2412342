#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace gpx {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

namespace detail {
template <class T>
T pairwise_sum_impl(const T* a, std::size_t n) {
    if (n <= 8) {
        T s{};
        for (std::size_t i = 0; i < n; ++i) s += a[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum_impl(a, h) + pairwise_sum_impl(a + h, n - h);
}
} // namespace detail

inline double pairwise_sum(std::span<const double> a) {
    return detail::pairwise_sum_impl(a.data(), a.size());
}
inline cplx pairwise_sum(std::span<const cplx> a) {
    return detail::pairwise_sum_impl(a.data(), a.size());
}

/// Reduce to [0, 2*pi).
inline double mod_2pi(double x) {
    double y = std::fmod(x, two_pi);
    if (y < 0) y += two_pi;
    return y;
}

/// Circular distance modulo 2*pi, in [0, pi].
inline double circ_dist(double a, double b) {
    double d = mod_2pi(a - b);
    return std::min(d, two_pi - d);
}

/// Value reduced modulo 2*pi together with the stripped winding integer.
struct ModValue {
    double value = 0.0; // in [0, 2*pi)
    long branch = 0;
    double raw() const { return value + two_pi * static_cast<double>(branch); }
};

inline ModValue reduce_mod_2pi(double raw) {
    double v = mod_2pi(raw);
    long b = std::lround((raw - v) / two_pi);
    return {v, b};
}

/// Quintic smoothstep: C^2 monotone 0 -> 1 on [0,1], clamped outside.
inline double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LinFit linear_fit(std::span<const double> x, std::span<const double> y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    LinFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

/// Runs fn(i) for i in [0, n). Honors GPX_THREADS (default: hardware threads).
/// Results must be written by index; the iteration order is unspecified.
void parallel_for(int n, const std::function<void(int)>& fn);

int max_threads();

} // namespace gpx

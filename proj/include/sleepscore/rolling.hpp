#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

namespace sleepscore {

// Rolling statistics over trailing windows: output[i] covers
// x[max(0, i-w+1) .. i], so the window shrinks at the start of the series and
// no padding values are ever produced. All of them run in O(n) total work
// regardless of the window length.

namespace detail {

// Prefix sums carried in long double so that differencing two prefixes stays
// well below the 1e-9 comparison tolerance even at n ~ 1e5, w ~ 5760.
inline std::vector<long double> prefix_sum(std::span<const double> x) {
    std::vector<long double> p(x.size() + 1, 0.0L);
    for (std::size_t i = 0; i < x.size(); ++i) p[i + 1] = p[i] + x[i];
    return p;
}

inline void check_window(std::size_t w, std::size_t min_w) {
    if (w < min_w) {
        throw std::invalid_argument("window_steps must be >= " + std::to_string(min_w));
    }
}

}  // namespace detail

inline std::vector<double> rolling_mean(std::span<const double> x, std::size_t w) {
    detail::check_window(w, 1);
    std::vector<double> out(x.size());
    if (x.empty()) return out;
    auto p = detail::prefix_sum(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
        std::size_t len = i + 1 - lo;
        out[i] = static_cast<double>((p[i + 1] - p[lo]) / len);
    }
    return out;
}

// Monotonic-deque maximum: every element enters and leaves the deque once.
inline std::vector<double> rolling_max(std::span<const double> x, std::size_t w) {
    detail::check_window(w, 1);
    std::vector<double> out(x.size());
    std::deque<std::size_t> q;  // indices with decreasing values
    for (std::size_t i = 0; i < x.size(); ++i) {
        while (!q.empty() && x[q.back()] <= x[i]) q.pop_back();
        q.push_back(i);
        if (q.front() + w <= i) q.pop_front();
        out[i] = x[q.front()];
    }
    return out;
}

// Population standard deviation per window. Values are shifted by x[0] before
// squaring, which keeps a constant offset (up to ~1e6) out of the sums and
// avoids the classic E[x^2]-E[x]^2 cancellation.
inline std::vector<double> rolling_std(std::span<const double> x, std::size_t w) {
    detail::check_window(w, 1);
    std::vector<double> out(x.size());
    if (x.empty()) return out;
    const double shift = x[0];
    std::vector<long double> p1(x.size() + 1, 0.0L), p2(x.size() + 1, 0.0L);
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double v = static_cast<long double>(x[i]) - shift;
        p1[i + 1] = p1[i] + v;
        p2[i + 1] = p2[i] + v * v;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
        long double len = static_cast<long double>(i + 1 - lo);
        long double mean = (p1[i + 1] - p1[lo]) / len;
        long double var = (p2[i + 1] - p2[lo]) / len - mean * mean;
        out[i] = var > 0.0L ? static_cast<double>(std::sqrt(var)) : 0.0;
    }
    return out;
}

// Sum of |x[j] - x[j-1]| over the trailing window ending at i; out[0] = 0.
inline std::vector<double> total_variation(std::span<const double> x, std::size_t w) {
    detail::check_window(w, 2);
    std::vector<double> out(x.size());
    if (x.empty()) return out;
    std::vector<long double> p(x.size(), 0.0L);  // p[i] = sum of |diff| up to i
    for (std::size_t i = 1; i < x.size(); ++i) {
        p[i] = p[i - 1] + std::abs(x[i] - x[i - 1]);
    }
    out[0] = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
        out[i] = static_cast<double>(p[i] - p[lo]);
    }
    return out;
}

namespace detail {

// Centered rolling mean with shrink-at-edges, used by offline smoothing where
// a trailing window would delay every transition by half the window.
inline std::vector<double> centered_rolling_mean(std::span<const double> x, std::size_t w) {
    check_window(w, 1);
    std::vector<double> out(x.size());
    if (x.empty()) return out;
    auto p = prefix_sum(x);
    std::size_t half = (w - 1) / 2;
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t lo = i >= half ? i - half : 0;
        std::size_t hi = std::min(x.size(), i + (w - half));  // exclusive
        out[i] = static_cast<double>((p[hi] - p[lo]) / (hi - lo));
    }
    return out;
}

}  // namespace detail

}  // namespace sleepscore

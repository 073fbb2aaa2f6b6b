#pragma once

#include <cmath>
#include <type_traits>
#include <utility>
#include <vector>

#include "weakval/errors.hpp"
#include "weakval/qubit.hpp"

namespace weakval {

inline double quad_abs(double v) { return std::abs(v); }
inline double quad_abs(const Mat2& m) { return m.max_abs_entry(); }

struct QuadratureOptions {
    double abs_tol = 1e-10;
    int max_intervals = 4096;
};

namespace detail {

// Gauss-Kronrod (G7, K15) nodes and weights on [-1, 1], positive half.
// Index 7 is the center node.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// 7-point Gauss weights attach to the odd-index Kronrod nodes.
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F, class T>
void gk15(F& f, double a, double b, T& k15, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const T fc = f(mid);
    T g7 = kWg[3] * fc;
    k15 = kWgk[7] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const T pair = f(mid - dx) + f(mid + dx);
        k15 = k15 + kWgk[i] * pair;
        if (i % 2 == 1) g7 = g7 + kWg[i / 2] * pair;
    }
    k15 = half * k15;
    g7 = half * g7;
    err = quad_abs(k15 - g7);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a, b]. T = f(double) must
// support T+T and double*T; errors are measured with quad_abs. Throws
// QuadratureNonConvergence (carrying the achieved error estimate) when the
// interval budget runs out before the tolerance is met.
template <class F>
auto integrate(F&& f, double a, double b, QuadratureOptions opt = {}) {
    using T = std::decay_t<decltype(f(a))>;
    if (a == b) return T{};

    struct Interval {
        double a, b;
        T value;
        double err;
    };

    std::vector<Interval> intervals;
    intervals.reserve(64);
    {
        T v{};
        double e = 0.0;
        detail::gk15(f, a, b, v, e);
        intervals.push_back({a, b, v, e});
    }

    const double total_len = std::abs(b - a);
    while (true) {
        int worst = -1;
        double worst_excess = 0.0;
        for (int i = 0; i < static_cast<int>(intervals.size()); ++i) {
            const double budget =
                opt.abs_tol * (std::abs(intervals[i].b - intervals[i].a) / total_len);
            const double excess = intervals[i].err - budget;
            if (excess > worst_excess) {
                worst_excess = excess;
                worst = i;
            }
        }
        if (worst < 0) break;
        if (static_cast<int>(intervals.size()) >= opt.max_intervals) {
            double achieved = 0.0;
            for (const Interval& iv : intervals) achieved += iv.err;
            throw QuadratureNonConvergence(achieved, opt.abs_tol);
        }
        const Interval split = intervals[worst];
        const double mid = 0.5 * (split.a + split.b);
        Interval left{split.a, mid, T{}, 0.0};
        Interval right{mid, split.b, T{}, 0.0};
        detail::gk15(f, left.a, left.b, left.value, left.err);
        detail::gk15(f, right.a, right.b, right.value, right.err);
        intervals[worst] = left;
        intervals.push_back(right);
    }

    T sum{};
    for (const Interval& iv : intervals) sum = sum + iv.value;
    return sum;
}

}  // namespace weakval

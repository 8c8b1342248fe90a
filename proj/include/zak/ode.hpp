#pragma once

// Dormand-Prince 5(4) with PI step-size control for linear complex systems.

#include "zak/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zak {

struct OdeOptions {
    double rtol = 1e-11;
    double atol = 1e-11;
    long max_steps = 10'000'000;
    double max_step = 0.0;  // 0: unbounded
};

struct OdeStats {
    long steps = 0;
    long rejected = 0;
    long evaluations = 0;
    double max_error_norm = 0.0;  // largest accepted scaled local error (<= 1)
    double error_sum = 0.0;       // sum of accepted local errors times rtol
    double last_step = 0.0;

    void merge(const OdeStats& o) {
        steps += o.steps;
        rejected += o.rejected;
        evaluations += o.evaluations;
        max_error_norm = std::max(max_error_norm, o.max_error_norm);
        error_sum += o.error_sum;
        last_step = o.last_step;
    }
};

namespace detail {

template <class State>
double scaled_rms(const State& err, const State& y0, const State& y1, double atol, double rtol) {
    const auto scale =
        atol + rtol * y0.cwiseAbs().array().max(y1.cwiseAbs().array());
    return std::sqrt((err.cwiseAbs().array() / scale).square().mean());
}

struct NoHook {
    template <class State>
    bool operator()(State&) const { return false; }
};

}  // namespace detail

// Integrates dy/dt = rhs(t, y) from t0 to t1 in place. `h` is an in/out step hint (0 picks
// one automatically) so consecutive segments keep the controller state. `post_step` may
// rescale y after every accepted step (valid for linear systems only) and returns true
// when it changed y.
template <class State, class Rhs, class Hook = detail::NoHook>
OdeStats dopri5(const Rhs& rhs, State& y, double t0, double t1, const OdeOptions& opts,
                double& h, Hook post_step = {}) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    // b - b_hat
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeStats stats;
    const double span = t1 - t0;
    if (span == 0.0) return stats;
    const double dir = span > 0 ? 1.0 : -1.0;

    State k1 = rhs(t0, y);
    ++stats.evaluations;

    if (h == 0.0 || !std::isfinite(h)) {
        // Hairer's starting step heuristic.
        const auto sc = opts.atol + opts.rtol * y.cwiseAbs().array();
        const double d0 = std::sqrt((y.cwiseAbs().array() / sc).square().mean());
        const double d1 = std::sqrt((k1.cwiseAbs().array() / sc).square().mean());
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, std::abs(span));
        State yt = y + (dir * h0) * k1;
        State k2 = rhs(t0 + dir * h0, yt);
        ++stats.evaluations;
        const double d2 = std::sqrt(((k2 - k1).cwiseAbs().array() / sc).square().mean()) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        h = std::min(100 * h0, h1);
    }
    h = std::min(std::abs(h), std::abs(span));
    if (opts.max_step > 0) h = std::min(h, opts.max_step);

    constexpr double beta = 0.04;
    constexpr double alpha = 0.2 - 0.75 * beta;
    double err_prev = 1e-4;
    double t = t0;
    bool last_rejected = false;

    while (dir * (t1 - t) > 0) {
        if (stats.steps + stats.rejected >= opts.max_steps) {
            throw IntegrationError("step limit of " + std::to_string(opts.max_steps) + " reached",
                                   t);
        }
        const double remaining = std::abs(t1 - t);
        bool final_step = false;
        double h_untruncated = h;
        if (h >= remaining * (1 - 1e-12)) {
            h = remaining;
            final_step = true;
        }
        if (h < 1e-14 * std::max(std::abs(t), std::abs(span))) {
            throw IntegrationError("step size underflow", t);
        }
        const double hs = dir * h;
        State k2 = rhs(t + c2 * hs, State(y + hs * (a21 * k1)));
        State k3 = rhs(t + c3 * hs, State(y + hs * (a31 * k1 + a32 * k2)));
        State k4 = rhs(t + c4 * hs, State(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
        State k5 = rhs(t + c5 * hs, State(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        State k6 = rhs(t + hs, State(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                                                a65 * k5)));
        State ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        State k7 = rhs(t + hs, ynew);
        stats.evaluations += 6;
        State err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double en = detail::scaled_rms(err, y, ynew, opts.atol, opts.rtol);
        if (!std::isfinite(en)) {
            if (!ynew.allFinite()) throw IntegrationError("non-finite state", t);
            en = 1e10;
        }

        if (en <= 1.0) {
            t = final_step ? t1 : t + hs;
            y = std::move(ynew);
            k1 = std::move(k7);
            ++stats.steps;
            stats.max_error_norm = std::max(stats.max_error_norm, en);
            stats.error_sum += en * opts.rtol;
            stats.last_step = h;
            if (post_step(y)) {
                k1 = rhs(t, y);
                ++stats.evaluations;
            }
            double fac = 0.9 * std::pow(std::max(en, 1e-10), -alpha) *
                         std::pow(err_prev, beta);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
            err_prev = std::max(en, 1e-4);
            h = final_step ? std::max(h_untruncated, h) : h * fac;
            last_rejected = false;
        } else {
            ++stats.rejected;
            h *= std::max(0.2, 0.9 * std::pow(en, -alpha));
            last_rejected = true;
        }
        if (opts.max_step > 0) h = std::min(h, opts.max_step);
    }
    return stats;
}

}  // namespace zak

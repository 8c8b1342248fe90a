#include "zak/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace zak {

namespace {

// Kronrod 15-point abscissae (positive half) and weights; odd-indexed nodes form Gauss-7.
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    Complex value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const ComplexIntegrand& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    const Complex fc = f(c);
    Complex kronrod = fc * kWk[7];
    Complex gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = hw * kXk[j];
        const Complex f1 = f(c - dx);
        const Complex f2 = f(c + dx);
        kronrod += kWk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    Segment s{a, b, kronrod * hw, std::abs((kronrod - gauss) * hw)};
    if (!std::isfinite(s.error)) s.error = std::numeric_limits<double>::infinity();
    return s;
}

}  // namespace

QuadratureResult integrate(const ComplexIntegrand& f, std::span<const double> points,
                           const QuadratureOptions& opts) {
    if (points.size() < 2) throw std::invalid_argument("integrate: need at least two points");
    std::priority_queue<Segment> heap;
    Complex total{0.0, 0.0};
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) continue;
        Segment s = gk15(f, points[i], points[i + 1]);
        total += s.value;
        total_error += s.error;
        heap.push(s);
    }
    QuadratureResult out;
    auto done = [&] {
        return total_error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    };
    while (!heap.empty() && !done() && static_cast<int>(heap.size()) < opts.max_intervals) {
        Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
        heap.pop();
        Segment left = gk15(f, worst.a, mid);
        Segment right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to drop accumulated cancellation from the running updates.
    total = 0.0;
    total_error = 0.0;
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        total += heap.top().value;
        total_error += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.error = total_error;
    out.converged = done();
    return out;
}

QuadratureResult integrate(const ComplexIntegrand& f, double a, double b,
                           const QuadratureOptions& opts) {
    const std::array<double, 2> pts{a, b};
    return integrate(f, pts, opts);
}

}  // namespace zak

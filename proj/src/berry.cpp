#include "zak/berry.hpp"

#include "zak/errors.hpp"
#include "zak/quadrature.hpp"
#include "zak/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace zak {

Matrix2 berry_connection(const TwoLevelModel& model, double k) {
    const EigenSystem es = eigensystem(model, k);
    const double r = model.r(k);
    const Complex a(model.epsilon(), model.lambda() * model.w(k));
    const Complex da(0.0, model.lambda() * model.dw(k));
    const Complex S2 = Complex(r * r) + a * a;
    // cos theta = a/S, sin theta = R/S
    const Complex dtheta = (model.dr(k) * a - r * da) / S2;
    const double dphi = model.dphi(k);
    const Complex c = es.cos_half;
    const Complex s = es.sin_half;
    const Complex sin_theta = 2.0 * s * c;

    Matrix2 A;
    A(0, 0) = -dphi * s * s;
    A(1, 1) = -dphi * c * c;
    A(0, 1) = -0.5 * kI * dtheta + 0.5 * dphi * sin_theta;
    A(1, 0) = 0.5 * kI * dtheta + 0.5 * dphi * sin_theta;
    return A;
}

std::vector<double> ep_crossings(const TwoLevelModel& model, int grid_size) {
    std::vector<double> roots;
    const double lam = model.lambda();
    if (lam == 0.0) return roots;
    for (const double sign : {1.0, -1.0}) {
        auto f = [&](double k) { return lam * model.w(k) - sign * model.r(k); };
        const double h = kTwoPi / grid_size;
        double k0 = 0.0;
        double f0 = f(k0);
        for (int i = 1; i <= grid_size; ++i) {
            const double k1 = i * h;
            const double f1 = f(k1);
            if (f0 == 0.0 && k0 > 0.0) {
                roots.push_back(k0);
            } else if ((f0 < 0) != (f1 < 0) && f1 != 0.0) {
                double lo = k0, hi = k1, flo = f0;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * kTwoPi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = f(mid);
                    if ((fm < 0) == (flo < 0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push_back(0.5 * (lo + hi));
            }
            k0 = k1;
            f0 = f1;
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::remove_if(roots.begin(), roots.end(),
                               [](double k) { return k <= 0.0 || k >= kTwoPi; }),
                roots.end());
    return roots;
}

Complex wrap_phase(Complex gamma) {
    return {wrap_centered(gamma.real(), kTwoPi), gamma.imag()};
}

namespace {

// (1/2) * integral of phi' cos(theta) with cos(theta) = a/S.
QuadratureResult half_cos_integral(const TwoLevelModel& model, std::span<const double> points,
                                   double abs_tol) {
    auto f = [&](double k) {
        const double dphi = model.dphi(k);
        if (dphi == 0.0) return Complex{};
        const double r = model.r(k);
        const Complex a(model.epsilon(), model.lambda() * model.w(k));
        return 0.5 * dphi * a / std::sqrt(Complex(r * r) + a * a);
    };
    return integrate(f, points, {abs_tol, 0.0, 200000});
}

std::vector<double> breakpoints(const std::vector<double>& crossings) {
    std::vector<double> pts{0.0};
    pts.insert(pts.end(), crossings.begin(), crossings.end());
    pts.push_back(kTwoPi);
    return pts;
}

}  // namespace

BerryResult berry_phase(const TwoLevelModel& model, const BerryOptions& opts) {
    const double crit = std::isnan(opts.critical) ? critical_lambda(model) : opts.critical;
    const double lam = model.lambda();
    if (std::abs(lam - crit) < opts.critical_margin) throw NearCriticalError(lam, crit);

    const double base = -kPi * model.phi_winding();
    BerryResult out;
    if (lam < crit || model.epsilon() > 0.0) {
        const std::vector<double> pts = breakpoints(lam < crit ? std::vector<double>{}
                                                               : ep_crossings(model));
        const QuadratureResult q = half_cos_integral(model, pts, opts.abs_tol);
        out.gamma_plus = base + q.value;
        out.gamma_minus = base - q.value;
        out.epsilon_used = model.epsilon();
        out.quadrature_error = q.error;
        if (lam < crit) {
            const double re = std::abs(wrap_centered(out.gamma_plus.real(), kTwoPi));
            out.re_quantized = re > kPi / 2 ? kPi : 0.0;
        }
        return out;
    }

    // Above the critical value the eps = 0 integrand has 1/sqrt(k - k_c) singularities.
    const std::vector<double> pts = breakpoints(ep_crossings(model));
    constexpr std::array<double, 3> eps{1e-3, 1e-4, 1e-5};
    std::array<Complex, 3> g;
    double qerr = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const QuadratureResult q = half_cos_integral(model.with_epsilon(eps[i]), pts, opts.abs_tol);
        g[i] = q.value;
        qerr = std::max(qerr, q.error);
    }
    // Leading error of the regularized phase is linear in eps.
    const Complex r1 = (10.0 * g[1] - g[0]) / 9.0;
    const Complex r2 = (10.0 * g[2] - g[1]) / 9.0;
    const Complex rr = (100.0 * r2 - r1) / 99.0;
    out.gamma_plus = base + rr;
    out.gamma_minus = base - rr;
    out.epsilon_used = eps.back();
    out.quadrature_error = std::abs(rr - r2) + qerr;
    return out;
}

}  // namespace zak

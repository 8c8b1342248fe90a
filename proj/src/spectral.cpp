#include "zak/spectral.hpp"

#include "zak/errors.hpp"

#include <cmath>
#include <limits>

namespace zak {

namespace {

// a = i lambda W + eps, the traceless diagonal.
Complex diagonal_part(const TwoLevelModel& model, double k) {
    return Complex(model.epsilon(), model.lambda() * model.w(k));
}

}  // namespace

Complex discriminant_root(const TwoLevelModel& model, double k) {
    const double r = model.r(k);
    const Complex a = diagonal_part(model, k);
    return std::sqrt(Complex(r * r) + a * a);
}

std::pair<Complex, Complex> energies(const TwoLevelModel& model, double k) {
    const Complex s = discriminant_root(model, k);
    const double g = model.g(k);
    return {g + s, g - s};
}

EigenSystem eigensystem(const TwoLevelModel& model, double k, double ep_tol) {
    const double r = model.r(k);
    const double lw = model.lambda() * model.w(k);
    const Complex a = diagonal_part(model, k);
    const Complex s2 = Complex(r * r) + a * a;
    const double defect = std::abs(s2) / std::max(r * r, lw * lw);
    if (!(defect > ep_tol)) throw ExceptionalPointError(k, defect);
    const Complex S = std::sqrt(s2);

    EigenSystem es;
    es.k = k;
    es.e_plus = model.g(k) + S;
    es.e_minus = model.g(k) - S;

    Complex c, s;
    if (model.epsilon() == 0.0 && std::abs(lw) < std::abs(r)) {
        es.psi = std::atanh(lw / r);
        es.theta = Complex(kPi / 2, -es.psi.real());
        c = std::cos(0.5 * es.theta);
        s = std::sin(0.5 * es.theta);
    } else {
        // (c, s) is proportional to (S + a, R) and to (R, S - a); take the better conditioned.
        const Complex n1 = 2.0 * S * (S + a);
        const Complex n2 = 2.0 * S * (S - a);
        if (std::abs(n1) >= std::abs(n2)) {
            const Complex norm = std::sqrt(n1);
            c = (S + a) / norm;
            s = r / norm;
        } else {
            const Complex norm = std::sqrt(n2);
            c = r / norm;
            s = (S - a) / norm;
        }
        if (c.real() < 0 || (c.real() == 0 && c.imag() < 0)) {
            c = -c;
            s = -s;
        }
        es.theta = -2.0 * kI * std::log(c + kI * s);
        es.psi = kI * (es.theta - kPi / 2);
    }
    es.cos_half = c;
    es.sin_half = s;

    const Complex ph = std::polar(1.0, -model.phi(k));
    es.u_plus << c, s * ph;
    es.u_minus << s, -c * ph;
    // v such that v^dagger = (c, s e^{i phi}) and (s, -c e^{i phi}).
    es.v_plus << std::conj(c), std::conj(s) * ph;
    es.v_minus << std::conj(s), -std::conj(c) * ph;
    return es;
}

double critical_lambda(const TwoLevelModel& model, int grid_size) {
    if (grid_size < 64) throw InvalidModelError("critical_lambda needs grid_size >= 64");
    auto ratio = [&](double k) {
        const double w = std::abs(model.w(k));
        return w == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(model.r(k)) / w;
    };
    const double h = kTwoPi / grid_size;
    int best = -1;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_size; ++i) {
        const double v = ratio(i * h);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    if (best < 0) return std::numeric_limits<double>::infinity();

    // Golden section on the bracketing cells.
    const double inv_phi = (std::sqrt(5.0) - 1) / 2;
    double lo = (best - 1) * h;
    double hi = (best + 1) * h;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = ratio(x1);
    double f2 = ratio(x2);
    while (hi - lo > 1e-10) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = ratio(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = ratio(x2);
        }
    }
    return std::min({best_val, f1, f2});
}

}  // namespace zak

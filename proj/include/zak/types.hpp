#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>

namespace zak {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Vector2 = Eigen::Vector2cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Biorthogonal product <v|u> = sum conj(v_i) u_i.
inline Complex braket(const Vector2& v, const Vector2& u) { return v.dot(u); }

// Maps x into (-period/2, period/2].
inline double wrap_centered(double x, double period) {
    double r = x - period * std::round(x / period);
    if (r <= -0.5 * period) r += period;
    if (r > 0.5 * period) r -= period;
    return r;
}

}  // namespace zak

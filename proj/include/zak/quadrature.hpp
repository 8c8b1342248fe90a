#pragma once

#include "zak/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace zak {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_intervals = 50000;
};

struct QuadratureResult {
    Complex value;
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

using ComplexIntegrand = std::function<Complex(double)>;

// Globally adaptive 7/15-point Gauss-Kronrod quadrature over [points.front(), points.back()].
// Interior points seed the initial subdivision (kinks, integrable singularities); the
// integrand is never evaluated at any of them.
QuadratureResult integrate(const ComplexIntegrand& f, std::span<const double> points,
                           const QuadratureOptions& opts = {});

QuadratureResult integrate(const ComplexIntegrand& f, double a, double b,
                           const QuadratureOptions& opts = {});

}  // namespace zak

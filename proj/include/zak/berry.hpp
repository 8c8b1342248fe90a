#pragma once

#include "zak/model.hpp"
#include "zak/types.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace zak {

struct BerryResult {
    Complex gamma_plus;
    Complex gamma_minus;
    // 0 or pi when lambda is below the critical value.
    std::optional<double> re_quantized;
    double epsilon_used = 0.0;
    double quadrature_error = 0.0;
};

struct BerryOptions {
    double abs_tol = 1e-10;
    // Distance from the critical value below which the phase is refused.
    double critical_margin = 1e-3;
    // Precomputed critical lambda (NaN: compute it).
    double critical = std::numeric_limits<double>::quiet_NaN();
};

// [[A++, A+-], [A-+, A--]] with A_nl = -i <v_n | d_k u_l>.
Matrix2 berry_connection(const TwoLevelModel& model, double k);

// Raw (unwrapped) gamma; below the critical value the eps of the model is used as is, above it
// the regularized phase is extrapolated to eps -> 0 from eps in {1e-3, 1e-4, 1e-5}.
BerryResult berry_phase(const TwoLevelModel& model, const BerryOptions& opts = {});

// Sorted roots in (0, 2pi) of lambda W(k) - R(k) and lambda W(k) + R(k).
std::vector<double> ep_crossings(const TwoLevelModel& model, int grid_size = 4096);

// Real part moved into (-pi, pi].
Complex wrap_phase(Complex gamma);

}  // namespace zak

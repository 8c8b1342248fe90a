#pragma once

#include "zak/model.hpp"
#include "zak/types.hpp"

#include <utility>

namespace zak {

// Relative distance to an exceptional point below which eigenvectors are refused.
inline constexpr double kEpTolerance = 1e-14;

struct EigenSystem {
    double k = 0.0;
    Complex e_plus;
    Complex e_minus;
    Vector2 u_plus;
    Vector2 u_minus;
    // Stored so that braket(v_n, u_m) = delta_nm.
    Vector2 v_plus;
    Vector2 v_minus;
    // cos(theta/2), sin(theta/2); c^2 + s^2 = 1.
    Complex cos_half;
    Complex sin_half;
    Complex theta;  // pi/2 - i psi
    Complex psi;
};

// S = sqrt(R^2 - (lambda W - i eps)^2) on the principal branch, which is the continuous
// branch from k = 0 with Im E+ >= 0 whenever W does not change sign across an EP.
Complex discriminant_root(const TwoLevelModel& model, double k);

// (E+, E-) = G +- S.
std::pair<Complex, Complex> energies(const TwoLevelModel& model, double k);

// Throws ExceptionalPointError when |R^2 - (lambda W - i eps)^2| <= ep_tol * max(R^2, (lambda W)^2).
EigenSystem eigensystem(const TwoLevelModel& model, double k, double ep_tol = kEpTolerance);

// min_k |R(k)/W(k)|; +infinity when W vanishes on the whole grid.
double critical_lambda(const TwoLevelModel& model, int grid_size = 256);

}  // namespace zak

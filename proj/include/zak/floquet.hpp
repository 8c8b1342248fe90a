#pragma once

#include "zak/model.hpp"
#include "zak/ode.hpp"
#include "zak/spectral.hpp"
#include "zak/types.hpp"

#include <limits>
#include <utility>

namespace zak {

// One-period propagator of the G-free system dY/dk = -(i/omega)(H - G) Y, stored as
// exp(log_scale) * matrix so that growth above the critical value cannot overflow.
struct Monodromy {
    Matrix2 matrix;
    double log_scale = 0.0;
    double mean_g = 0.0;
    double omega = 0.0;
    OdeStats stats;

    // Full propagator including the mean-G phase; overflows for large log_scale.
    Matrix2 full() const;
};

Monodromy monodromy(const TwoLevelModel& model, double omega, const OdeOptions& opts = {});

struct QuasiEnergyResult {
    Complex mu_plus;
    Complex mu_minus;
    Complex mu_adiabatic_plus{std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN()};
    int branch_index = 0;
    double omega = 0.0;
    // False when the adiabatic estimate was unavailable and the principal branch was used.
    bool branch_from_adiabatic = false;
    OdeStats stats;
    // Floquet eigenvectors at k = 0 (unit norm) and multipliers exp(-i mu 2pi/omega) as
    // logarithms, so that they survive overflow.
    Vector2 floquet_plus;
    Vector2 floquet_minus;
    Complex log_multiplier_plus;
    Complex log_multiplier_minus;
};

struct FloquetOptions {
    OdeOptions ode;
    double critical = std::numeric_limits<double>::quiet_NaN();
    int branch_search = 5;
};

QuasiEnergyResult quasi_energies(const TwoLevelModel& model, double omega,
                                 const FloquetOptions& opts = {});

// Quasi-energies from an already computed monodromy; `adiabatic_plus` may be NaN. When
// `start` is given, mu+ belongs to the Floquet eigenvector with the larger weight on u+(0);
// otherwise both multipliers compete for the branch nearest the adiabatic estimate.
QuasiEnergyResult quasi_energies_from(const Monodromy& m, Complex adiabatic_plus,
                                      const EigenSystem* start = nullptr,
                                      int branch_search = 5);

// (1/2pi) int E+ dk + (omega/2pi) gamma+, and 2 <G> minus that.
std::pair<Complex, Complex> adiabatic_quasi_energy(
    const TwoLevelModel& model, double omega,
    double critical = std::numeric_limits<double>::quiet_NaN());

struct BerryResult;

// Same, reusing a Berry phase already computed for this model.
std::pair<Complex, Complex> adiabatic_quasi_energy(const TwoLevelModel& model, double omega,
                                                   const BerryResult& berry, double critical);

// sqrt(R0^2 + (omega/2 + i lambda)^2) - omega/2 and its negative.
std::pair<Complex, Complex> exact_example1(double r0, double lambda, double omega);

// Eigenvector of a 2x2 matrix for the eigenvalue nu (not normalised).
Vector2 eigenvector2(const Matrix2& m, Complex nu);

// Closed-form one-period propagator of example 1 (including its G = 0 gauge).
Matrix2 exact_example1_propagator(double r0, double lambda, double omega);

}  // namespace zak

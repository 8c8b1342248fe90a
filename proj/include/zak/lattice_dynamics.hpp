#pragma once

#include "zak/model.hpp"
#include "zak/ode.hpp"
#include "zak/types.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace zak {

// Snapshots of the truncated chain; site index 2(n + cells/2) + {0: a, 1: b}.
struct Trajectory {
    int cells = 0;
    double force = 0.0;
    double dt_store = 0.0;
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;  // unit norm
    std::vector<double> norm_log;          // physical state = states[i] * exp(norm_log[i])
    OdeStats stats;
};

struct EvolveOptions {
    OdeOptions ode{1e-12, 1e-14};
    int edge_cells = 4;       // cells on each side watched for boundary reach
    double edge_tol = 1e-8;   // largest tolerated |amplitude| there
};

// Unit excitation of sublattice A in the central cell.
Eigen::VectorXcd central_site_state(int cells);

// i dpsi/dt = H psi with the Stark term -F n on both sublattices, n in [-cells/2, cells/2).
Trajectory evolve(const LatticeHoppings& h, double lambda, double force,
                  const Eigen::VectorXcd& initial, double t_max, double dt_store,
                  const EvolveOptions& opts = {});

struct PeriodicityReport {
    bool periodic = false;
    std::string classification;  // "periodic_t1" or "aperiodic"
    double t1_period = 0.0;
    double t1_detected = 0.0;    // highest autocorrelation peak
    double t2_expected = 0.0;    // pi / Re Theta
    double t2_detected = 0.0;    // dominant non-harmonic period of the return signal
    double transient_estimate = 0.0;
    double settle_time = 0.0;    // NaN when the fidelity never settles above threshold
    double min_fidelity = 0.0;   // after transient_estimate
    double growth_rate = 0.0;    // slope of norm_log after the transient
    double expected_growth_rate = 0.0;  // Im Theta
    int strict_period = 0;       // smallest m in 1..4 with Re<s(t)|s(t + m T1)> > threshold
    double threshold = 0.999;
};

// Requires dt_store to divide T1 = 2pi/F and t_max >= transient + 5 T1, with the transient
// estimated as 3 / (2 pi |Im Theta|) (0 when |Im gamma| = 2 pi |Im Theta| / F <= 1e-6).
PeriodicityReport periodicity_report(const Trajectory& traj, Complex theta_shift,
                                     double threshold = 0.999);

std::string to_json(const PeriodicityReport& r);
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int site_stride = 1);

}  // namespace zak

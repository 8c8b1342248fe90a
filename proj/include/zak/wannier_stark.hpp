#pragma once

#include "zak/floquet.hpp"
#include "zak/model.hpp"
#include "zak/types.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace zak {

enum class Branch { Plus = 1, Minus = -1 };

struct WSLevel {
    int l = 0;
    Branch branch = Branch::Plus;
    Complex energy;
};

struct WSLadder {
    double force = 0.0;
    Complex theta_shift;  // mu+
    Complex mu_minus;
    std::vector<WSLevel> energies;
    double t1_period = 0.0;  // 2pi / F
    double t2_period = 0.0;  // pi / Re Theta
    QuasiEnergyResult quasi;
};

// E = l F + mu+- for l in [l_min, l_max]; ordered by l, then + before -.
WSLadder ws_spectrum(const TwoLevelModel& model, double force, int l_min, int l_max,
                     const FloquetOptions& opts = {});

struct WSEigenstate {
    int n_min = 0;  // amplitudes[i] belongs to cell n_min + i
    std::vector<Complex> a;
    std::vector<Complex> b;
    Complex energy;
    Branch branch = Branch::Plus;
    int ladder_index = 0;
    double boundary_residual = 0.0;
    int grid_size = 0;

    int n_max() const { return n_min + static_cast<int>(a.size()) - 1; }
};

struct WSEigenstateOptions {
    int log2_grid = 11;
    int max_log2_grid = 14;
    double accept_residual = 1e-8;
    double fail_residual = 1e-6;
    OdeOptions ode;
};

// Reconstructs the lattice amplitudes of the WS eigenstate (l, branch) on cells
// [n_min, n_max], normalised to unit total weight. Throws ConsistencyError when the
// quasi-periodic boundary condition cannot be met to fail_residual.
WSEigenstate ws_eigenstate(const TwoLevelModel& model, double force, Branch branch, int l,
                           int n_min, int n_max, const WSEigenstateOptions& opts = {});

// Same, reusing a ladder computed for this model and force.
WSEigenstate ws_eigenstate(const TwoLevelModel& model, const WSLadder& ladder, Branch branch,
                           int l, int n_min, int n_max, const WSEigenstateOptions& opts = {});

// max_{n_lo <= |n| <= n_hi} |n| max(|a_n|, |b_n|).
double tail_constant(const WSEigenstate& s, int n_lo, int n_hi);

struct WSOracleResult {
    int cells = 0;
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd eigenvectors;  // column j, site 2(n + cells/2) + {0: a, 1: b}
    std::vector<double> edge_weight;  // weight in the outer sixth of cells on each side
};

// Dense diagonalisation of the truncated chain with on-site -F n on cells n in [-N/2, N/2).
WSOracleResult ws_oracle(const LatticeHoppings& hoppings, double lambda, double force,
                         int cells);

// Indices of oracle eigenvalues in the central third of the real spectrum whose eigenvectors
// keep less than `edge_tol` of their weight near the truncation edges.
std::vector<int> central_eigenvalues(const WSOracleResult& oracle, double edge_tol = 1e-8);

struct LadderMatch {
    Complex oracle;
    WSLevel rung;
    double re_misfit = 0.0;
    double im_misfit = 0.0;
};

// Nearest rung l F + mu+- for each oracle eigenvalue.
std::vector<LadderMatch> align_ladder(const std::vector<Complex>& oracle, double force,
                                      Complex mu_plus, Complex mu_minus);

enum class Transition { Sharp, Smooth };

// Smooth when |Im gamma+| > 1e-6 at lambda = critical/2. Requires F <= 0.1 * min band gap there.
Transition classify_transition(const TwoLevelModel& model, double force);

const char* to_string(Transition t);
const char* to_string(Branch b);

void write_eigenstate_csv(std::ostream& os, const WSEigenstate& s);
void write_spectrum_csv(std::ostream& os, const WSLadder& ladder);

}  // namespace zak

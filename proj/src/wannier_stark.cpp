#include "zak/wannier_stark.hpp"

#include "zak/berry.hpp"
#include "zak/csv.hpp"
#include "zak/errors.hpp"
#include "zak/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace zak {

WSLadder ws_spectrum(const TwoLevelModel& model, double force, int l_min, int l_max,
                     const FloquetOptions& opts) {
    if (!(force > 0)) throw InvalidModelError("force must be positive");
    if (l_min > l_max) throw InvalidModelError("empty ladder index range");
    WSLadder out;
    out.force = force;
    out.quasi = quasi_energies(model, force, opts);
    out.theta_shift = out.quasi.mu_plus;
    out.mu_minus = out.quasi.mu_minus;
    out.t1_period = kTwoPi / force;
    out.t2_period = kPi / out.theta_shift.real();
    for (int l = l_min; l <= l_max; ++l) {
        out.energies.push_back({l, Branch::Plus, l * force + out.quasi.mu_plus});
        out.energies.push_back({l, Branch::Minus, l * force + out.quasi.mu_minus});
    }
    return out;
}

namespace {

struct KSolution {
    std::vector<Vector2> psi;        // unit-norm samples on k_j = 2pi j / M, j = 0..M
    std::vector<double> log_scale;   // psi_true(k_j) = psi[j] * exp(log_scale[j])
    double residual = 0.0;
};

// Solves i F dpsi/dk = H(k) psi on the grid from the Floquet eigenvector; integrates in the
// direction in which the chosen solution is dominant.
KSolution solve_k_space(const TwoLevelModel& model, double force, const Vector2& start,
                        Complex log_multiplier, bool forward, int grid,
                        const OdeOptions& ode) {
    KSolution sol;
    sol.psi.resize(grid + 1);
    sol.log_scale.assign(grid + 1, 0.0);
    const Complex coef = -kI / force;
    auto rhs = [&](double k, const Vector2& y) -> Vector2 {
        return coef * (hamiltonian_at(model, k) * y);
    };
    const double dk = kTwoPi / grid;
    double h = 0.0;
    Vector2 y = start.normalized();
    const int first = forward ? 0 : grid;
    sol.psi[first] = y;
    double scale = 0.0;
    for (int step = 0; step < grid; ++step) {
        const int from = forward ? step : grid - step;
        const int to = forward ? step + 1 : grid - step - 1;
        dopri5(rhs, y, from * dk, to * dk, ode, h);
        const double n = y.norm();
        y /= n;
        scale += std::log(n);
        sol.psi[to] = y;
        sol.log_scale[to] = scale;
    }
    // psi(2pi) = nu psi(0)
    const Vector2 s = start.normalized();
    if (forward) {
        sol.residual = (sol.psi[grid] * std::exp(sol.log_scale[grid] - log_multiplier) - s).norm();
    } else {
        sol.residual = (sol.psi[0] * std::exp(sol.log_scale[0] + log_multiplier) - s).norm();
    }
    return sol;
}

}  // namespace

WSEigenstate ws_eigenstate(const TwoLevelModel& model, double force, Branch branch, int l,
                           int n_min, int n_max, const WSEigenstateOptions& opts) {
    return ws_eigenstate(model, ws_spectrum(model, force, l, l), branch, l, n_min, n_max, opts);
}

WSEigenstate ws_eigenstate(const TwoLevelModel& model, const WSLadder& ladder, Branch branch,
                           int l, int n_min, int n_max, const WSEigenstateOptions& opts) {
    if (n_min > n_max) throw InvalidModelError("empty cell range");
    const QuasiEnergyResult& q = ladder.quasi;
    const bool plus = branch == Branch::Plus;
    const Vector2& start = plus ? q.floquet_plus : q.floquet_minus;
    const Complex log_mult = plus ? q.log_multiplier_plus : q.log_multiplier_minus;
    const Complex log_other = plus ? q.log_multiplier_minus : q.log_multiplier_plus;
    const bool forward = log_mult.real() >= log_other.real();
    const double force = ladder.force;
    const Complex energy = l * force + (plus ? q.mu_plus : q.mu_minus);

    KSolution sol;
    int log2_grid = opts.log2_grid;
    for (;; ++log2_grid) {
        sol = solve_k_space(model, force, start, log_mult, forward, 1 << log2_grid, opts.ode);
        if (sol.residual <= opts.accept_residual || log2_grid >= opts.max_log2_grid) break;
    }
    if (!(sol.residual <= opts.fail_residual)) {
        throw ConsistencyError("boundary condition psi(2pi) = exp(-2 pi i E/F) psi(0) violated, "
                               "residual " + std::to_string(sol.residual),
                               sol.residual);
    }

    const int grid = 1 << log2_grid;
    // A(k) = psi(k) exp(i E k / F) is 2pi-periodic; a_n = (1/M) sum_j A(k_j) exp(i k_j n).
    std::vector<double> log_mag(grid);
    double top = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid; ++j) {
        const double k = kTwoPi * j / grid;
        log_mag[j] = sol.log_scale[j] - energy.imag() * k / force;
        top = std::max(top, log_mag[j]);
    }
    const int count = n_max - n_min + 1;
    WSEigenstate out;
    out.n_min = n_min;
    out.a.assign(count, Complex{});
    out.b.assign(count, Complex{});
    for (int j = 0; j < grid; ++j) {
        const double k = kTwoPi * j / grid;
        const Complex weight =
            std::exp(log_mag[j] - top) * std::polar(1.0, energy.real() * k / force);
        const Vector2 amp = sol.psi[j] * weight;
        Complex phase = std::polar(1.0, k * n_min);
        const Complex step = std::polar(1.0, k);
        for (int i = 0; i < count; ++i) {
            out.a[i] += amp(0) * phase;
            out.b[i] += amp(1) * phase;
            phase *= step;
        }
    }
    double norm = 0.0;
    for (int i = 0; i < count; ++i) norm += std::norm(out.a[i]) + std::norm(out.b[i]);
    norm = std::sqrt(norm);
    for (int i = 0; i < count; ++i) {
        out.a[i] /= norm;
        out.b[i] /= norm;
    }
    out.energy = energy;
    out.branch = branch;
    out.ladder_index = l;
    out.boundary_residual = sol.residual;
    out.grid_size = grid;
    return out;
}

double tail_constant(const WSEigenstate& s, int n_lo, int n_hi) {
    double c = 0.0;
    for (int i = 0; i < static_cast<int>(s.a.size()); ++i) {
        const int n = s.n_min + i;
        if (std::abs(n) < n_lo || std::abs(n) > n_hi) continue;
        c = std::max(c, std::abs(n) * std::max(std::abs(s.a[i]), std::abs(s.b[i])));
    }
    return c;
}

WSOracleResult ws_oracle(const LatticeHoppings& hoppings, double lambda, double force,
                         int cells) {
    if (cells < 100 || cells % 2 != 0) throw InvalidModelError("ws_oracle needs an even N >= 100");
    const LatticeHoppings h = with_gain_loss(hoppings, lambda);
    h.check_pt_symmetry();
    const int dim = 2 * cells;
    const int half = cells / 2;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    auto add = [&](const std::map<int, Complex>& c, int row_sub, int col_sub) {
        for (int n = -half; n < half; ++n) {
            for (const auto& [m, amp] : c) {
                const int l = n - m;
                if (l < -half || l >= half) continue;
                H(2 * (n + half) + row_sub, 2 * (l + half) + col_sub) += amp;
            }
        }
    };
    add(h.rho, 0, 0);
    add(h.sigma, 0, 1);
    add(h.theta, 1, 0);
    add(h.eta, 1, 1);
    for (int n = -half; n < half; ++n) {
        H(2 * (n + half), 2 * (n + half)) -= force * n;
        H(2 * (n + half) + 1, 2 * (n + half) + 1) -= force * n;
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(H, true);
    if (solver.info() != Eigen::Success) throw ConsistencyError("dense eigensolver failed", 0.0);
    WSOracleResult out;
    out.cells = cells;
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    const int edge = cells / 6;
    out.edge_weight.resize(dim);
    for (int j = 0; j < dim; ++j) {
        const auto col = out.eigenvectors.col(j);
        const double total = col.squaredNorm();
        double outer = 0.0;
        for (int c = 0; c < edge; ++c) {
            for (int s = 0; s < 2; ++s) {
                outer += std::norm(col(2 * c + s));
                outer += std::norm(col(2 * (cells - 1 - c) + s));
            }
        }
        out.edge_weight[j] = outer / total;
    }
    return out;
}

std::vector<int> central_eigenvalues(const WSOracleResult& oracle, double edge_tol) {
    const auto re = oracle.eigenvalues.real();
    const double lo = re.minCoeff();
    const double hi = re.maxCoeff();
    const double mid = 0.5 * (lo + hi);
    const double reach = (hi - lo) / 6;
    std::vector<int> idx;
    for (int j = 0; j < oracle.eigenvalues.size(); ++j) {
        if (std::abs(re(j) - mid) <= reach && oracle.edge_weight[j] < edge_tol) idx.push_back(j);
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const Complex ea = oracle.eigenvalues(a), eb = oracle.eigenvalues(b);
        return ea.real() != eb.real() ? ea.real() < eb.real() : ea.imag() < eb.imag();
    });
    return idx;
}

std::vector<LadderMatch> align_ladder(const std::vector<Complex>& oracle, double force,
                                      Complex mu_plus, Complex mu_minus) {
    std::vector<LadderMatch> out;
    out.reserve(oracle.size());
    for (const Complex& e : oracle) {
        LadderMatch best;
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& [br, mu] : {std::pair{Branch::Plus, mu_plus},
                                     std::pair{Branch::Minus, mu_minus}}) {
            const int l = static_cast<int>(std::lround((e.real() - mu.real()) / force));
            const Complex rung = l * force + mu;
            const double d = std::abs(e - rung);
            if (d < dist) {
                dist = d;
                best.oracle = e;
                best.rung = {l, br, rung};
                best.re_misfit = std::abs(e.real() - rung.real());
                best.im_misfit = std::abs(e.imag() - rung.imag());
            }
        }
        out.push_back(best);
    }
    return out;
}

Transition classify_transition(const TwoLevelModel& model, double force) {
    const double crit = critical_lambda(model);
    if (std::isinf(crit)) return Transition::Sharp;
    const TwoLevelModel half = model.with_lambda(0.5 * crit).with_epsilon(0.0);
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1024; ++i) {
        gap = std::min(gap, 2.0 * std::abs(discriminant_root(half, kTwoPi * i / 1024)));
    }
    if (force > 0.1 * gap) {
        throw ConfigError("force " + format_double(force) +
                          " exceeds 0.1 * minimal band gap " + format_double(gap) +
                          "; adiabatic classification does not apply");
    }
    BerryOptions bo;
    bo.critical = crit;
    const BerryResult b = berry_phase(half, bo);
    return std::abs(b.gamma_plus.imag()) > 1e-6 ? Transition::Smooth : Transition::Sharp;
}

const char* to_string(Transition t) { return t == Transition::Sharp ? "sharp" : "smooth"; }
const char* to_string(Branch b) { return b == Branch::Plus ? "+" : "-"; }

void write_eigenstate_csv(std::ostream& os, const WSEigenstate& s) {
    os << "n,re_a,im_a,re_b,im_b\n";
    for (std::size_t i = 0; i < s.a.size(); ++i) {
        os << s.n_min + static_cast<int>(i) << ',' << format_double(s.a[i].real()) << ','
           << format_double(s.a[i].imag()) << ',' << format_double(s.b[i].real()) << ','
           << format_double(s.b[i].imag()) << '\n';
    }
}

void write_spectrum_csv(std::ostream& os, const WSLadder& ladder) {
    os << "l,branch,re_E,im_E\n";
    for (const WSLevel& lv : ladder.energies) {
        os << lv.l << ',' << to_string(lv.branch) << ',' << format_double(lv.energy.real())
           << ',' << format_double(lv.energy.imag()) << '\n';
    }
}

}  // namespace zak

#include "zak/floquet.hpp"

#include "zak/berry.hpp"
#include "zak/errors.hpp"
#include "zak/quadrature.hpp"
#include "zak/spectral.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace zak {

namespace {

constexpr double kRescaleAbove = 1e100;

Matrix2 traceless_hamiltonian(const TwoLevelModel& model, double k) {
    Matrix2 h = hamiltonian_at(model, k);
    const double g = model.g(k);
    h(0, 0) -= g;
    h(1, 1) -= g;
    return h;
}

}  // namespace

Matrix2 Monodromy::full() const {
    return std::exp(Complex(log_scale, -mean_g * kTwoPi / omega)) * matrix;
}

Monodromy monodromy(const TwoLevelModel& model, double omega, const OdeOptions& opts) {
    if (!(omega > 0)) throw InvalidModelError("omega must be positive");
    Monodromy m;
    m.omega = omega;
    m.mean_g = mean_diagonal(model);
    m.matrix = Matrix2::Identity();
    const Complex coef = -kI / omega;
    auto rhs = [&](double k, const Matrix2& y) -> Matrix2 {
        return coef * (traceless_hamiltonian(model, k) * y);
    };
    auto rescale = [&](Matrix2& y) {
        const double big = y.cwiseAbs().maxCoeff();
        if (big <= kRescaleAbove) return false;
        y /= big;
        m.log_scale += std::log(big);
        return true;
    };
    double h = 0.0;
    m.stats = dopri5(rhs, m.matrix, 0.0, kTwoPi, opts, h, rescale);
    return m;
}

Vector2 eigenvector2(const Matrix2& m, Complex nu) {
    // Null vector of the better conditioned row of m - nu.
    Vector2 a(m(0, 1), nu - m(0, 0));
    Vector2 b(nu - m(1, 1), m(1, 0));
    return a.norm() >= b.norm() ? a : b;
}

namespace {

// Share of x carried by u+ in the biorthogonal expansion.
double plus_weight(const EigenSystem& es, const Vector2& x) {
    const double p = std::abs(braket(es.v_plus, x));
    const double q = std::abs(braket(es.v_minus, x));
    return p + q > 0 ? p / (p + q) : 0.5;
}

}  // namespace

QuasiEnergyResult quasi_energies_from(const Monodromy& m, Complex adiabatic_plus,
                                      const EigenSystem* start, int branch_search) {
    const Matrix2& M = m.matrix;
    const double omega = m.omega;
    const Complex q = 0.5 * M.trace();
    // Liouville: det of the traceless system is exp(-2 log_scale) up to integration error.
    const double scale = M.cwiseAbs().maxCoeff();
    const Complex det_numeric = M.determinant();
    const bool use_numeric = scale < 1e4;
    const Complex det = use_numeric ? det_numeric : Complex(std::exp(-2.0 * m.log_scale));
    const Complex root = std::sqrt(q * q - det);
    const Complex nu1 = std::abs(q + root) >= std::abs(q - root) ? q + root : q - root;
    // The small multiplier as det / big avoids cancellation.
    const Complex log1 = std::log(nu1);
    const Complex log2 = (use_numeric ? std::log(det_numeric) : Complex(-2.0 * m.log_scale)) - log1;
    const Complex nu2 = use_numeric ? det_numeric / nu1 : Complex(0.0);

    const double rel_gap = std::abs(nu1 - nu2) / std::max(std::abs(nu1), 1e-300);
    if (use_numeric && rel_gap < 1e-8) {
        const Matrix2 diff = M - 0.5 * (nu1 + nu2) * Matrix2::Identity();
        if (diff.cwiseAbs().maxCoeff() > 1e-6 * std::max(1.0, scale)) {
            throw FloquetEPError("monodromy is defective: coincident Floquet multipliers (gap " +
                                 std::to_string(rel_gap) + ")");
        }
    }

    const Complex factor = kI * omega / kTwoPi;
    // nu = exp(-i mu T) -> mu = (i omega / 2pi) log nu
    const Complex base1 = factor * (log1 + m.log_scale);
    const Complex base2 = factor * (log2 + m.log_scale);

    QuasiEnergyResult out;
    out.omega = omega;
    out.stats = m.stats;
    out.mu_adiabatic_plus = adiabatic_plus;

    Complex plus, minus_base;
    int branch = 0;
    int plus_index = 0;
    const bool have_adiabatic = std::isfinite(adiabatic_plus.real()) &&
                                std::isfinite(adiabatic_plus.imag());
    // Which multiplier carries mu+: decided by eigenvectors when they discriminate.
    int forced = -1;
    if (start != nullptr) {
        const double w1 = plus_weight(*start, eigenvector2(M, nu1));
        // The small multiplier may underflow; its eigenvector comes from the adjugate.
        const Complex nu2_vec = use_numeric ? nu2 : Complex(0.0);
        const double w2 = plus_weight(*start, eigenvector2(M, nu2_vec));
        if (std::abs(w1 - w2) > 0.2) forced = w1 > w2 ? 0 : 1;
    }
    if (have_adiabatic) {
        const Complex target = adiabatic_plus - m.mean_g;
        double best = std::numeric_limits<double>::infinity();
        for (int which = 0; which < 2; ++which) {
            if (forced >= 0 && which != forced) continue;
            const Complex& b = which == 0 ? base1 : base2;
            const int center = static_cast<int>(std::lround((target.real() - b.real()) / omega));
            for (int n = center - branch_search; n <= center + branch_search; ++n) {
                const Complex cand = b + double(n) * omega;
                const double d = std::abs(cand - target);
                if (d < best) {
                    best = d;
                    plus = cand;
                    branch = n;
                    plus_index = which;
                    minus_base = which == 0 ? base2 : base1;
                }
            }
        }
        out.branch_from_adiabatic = true;
    } else {
        // Principal branch of the dominant multiplier.
        const Complex p1(wrap_centered(base1.real(), omega), base1.imag());
        const Complex p2(wrap_centered(base2.real(), omega), base2.imag());
        const bool first = p1.imag() >= p2.imag();
        plus = first ? p1 : p2;
        plus_index = first ? 0 : 1;
        minus_base = first ? base2 : base1;
        branch = 0;
    }
    // mu- is the branch of the other multiplier closest to -mu+.
    const double shift = std::round((-plus.real() - minus_base.real()) / omega);
    const Complex minus = minus_base + shift * omega;

    const Vector2 e1 = eigenvector2(M, nu1).normalized();
    const Vector2 e2 = eigenvector2(M, use_numeric ? nu2 : Complex(0.0)).normalized();
    out.floquet_plus = plus_index == 0 ? e1 : e2;
    out.floquet_minus = plus_index == 0 ? e2 : e1;
    const double T = kTwoPi / omega;
    out.log_multiplier_plus = (plus_index == 0 ? log1 : log2) + m.log_scale -
                              kI * m.mean_g * T;
    out.log_multiplier_minus = (plus_index == 0 ? log2 : log1) + m.log_scale -
                               kI * m.mean_g * T;

    out.mu_plus = plus + m.mean_g;
    out.mu_minus = minus + m.mean_g;
    out.branch_index = branch;
    return out;
}

QuasiEnergyResult quasi_energies(const TwoLevelModel& model, double omega,
                                 const FloquetOptions& opts) {
    const double crit = std::isnan(opts.critical) ? critical_lambda(model) : opts.critical;
    const Monodromy m = monodromy(model, omega, opts.ode);
    std::optional<EigenSystem> start;
    try {
        start = eigensystem(model, 0.0);
    } catch (const ExceptionalPointError&) {
    }
    Complex adiabatic(std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN());
    try {
        adiabatic = adiabatic_quasi_energy(model, omega, crit).first;
    } catch (const NearCriticalError&) {
    }
    return quasi_energies_from(m, adiabatic, start ? &*start : nullptr, opts.branch_search);
}

std::pair<Complex, Complex> adiabatic_quasi_energy(const TwoLevelModel& model, double omega,
                                                   double critical) {
    const double crit = std::isnan(critical) ? critical_lambda(model) : critical;
    BerryOptions bo;
    bo.critical = crit;
    return adiabatic_quasi_energy(model, omega, berry_phase(model, bo), crit);
}

std::pair<Complex, Complex> adiabatic_quasi_energy(const TwoLevelModel& model, double omega,
                                                   const BerryResult& berry, double critical) {
    const TwoLevelModel bare = model.with_epsilon(0.0);
    std::vector<double> pts{0.0};
    if (model.lambda() > critical) {
        const std::vector<double> kc = ep_crossings(bare);
        pts.insert(pts.end(), kc.begin(), kc.end());
    }
    pts.push_back(kTwoPi);
    const QuadratureResult q = integrate(
        [&](double k) { return bare.g(k) + discriminant_root(bare, k); }, pts,
        {1e-12, 0.0, 200000});
    const double mean_g = mean_diagonal(model);
    const Complex plus = q.value / kTwoPi + omega / kTwoPi * berry.gamma_plus;
    return {plus, 2.0 * mean_g - plus};
}

std::pair<Complex, Complex> exact_example1(double r0, double lambda, double omega) {
    if (!(r0 > 0)) throw InvalidModelError("exact_example1 requires R0 > 0");
    const Complex d(omega / 2, lambda);
    const Complex plus = std::sqrt(r0 * r0 + d * d) - omega / 2;
    return {plus, -plus};
}

Matrix2 exact_example1_propagator(double r0, double lambda, double omega) {
    // In the frame rotating with e^{ik/2 sigma_z} the Hamiltonian is time independent.
    const double T = kTwoPi / omega;
    const Complex d(omega / 2, lambda);
    Matrix2 hbar;
    hbar << d, r0, r0, -d;
    const Complex big_omega = std::sqrt(d * d + r0 * r0);
    Matrix2 ex = std::cos(big_omega * T) * Matrix2::Identity();
    if (std::abs(big_omega) > 1e-300) {
        ex -= kI * (std::sin(big_omega * T) / big_omega) * hbar;
    } else {
        ex -= kI * T * hbar;
    }
    return -ex;
}

}  // namespace zak

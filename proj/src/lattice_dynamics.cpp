#include "zak/lattice_dynamics.hpp"

#include "zak/csv.hpp"
#include "zak/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace zak {

namespace {

struct Hop {
    int offset;
    int row_sub;
    int col_sub;
    Complex amp;
};

}  // namespace

Eigen::VectorXcd central_site_state(int cells) {
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(2 * cells);
    s(2 * (cells / 2)) = 1.0;
    return s;
}

Trajectory evolve(const LatticeHoppings& hoppings, double lambda, double force,
                  const Eigen::VectorXcd& initial, double t_max, double dt_store,
                  const EvolveOptions& opts) {
    if (initial.size() % 2 != 0 || initial.size() < 4) {
        throw InvalidModelError("initial state must hold two amplitudes per cell");
    }
    if (!(dt_store > 0) || !(t_max >= dt_store)) throw InvalidModelError("bad time grid");
    const LatticeHoppings h = with_gain_loss(hoppings, lambda);
    h.check_pt_symmetry();
    const int cells = static_cast<int>(initial.size() / 2);
    const int half = cells / 2;

    std::vector<Hop> hops;
    auto collect = [&](const std::map<int, Complex>& c, int r, int col) {
        for (const auto& [m, amp] : c) {
            if (amp != Complex{}) hops.push_back({m, r, col, amp});
        }
    };
    collect(h.rho, 0, 0);
    collect(h.sigma, 0, 1);
    collect(h.theta, 1, 0);
    collect(h.eta, 1, 1);

    // dpsi/dt = -i (sum_m c_m psi_{n-m} - F n psi_n)
    auto rhs = [&](double, const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
        Eigen::VectorXcd out(y.size());
        for (int c = 0; c < cells; ++c) {
            const double stark = -force * (c - half);
            Complex a = stark * y(2 * c);
            Complex b = stark * y(2 * c + 1);
            for (const Hop& hp : hops) {
                const int src = c - hp.offset;
                if (src < 0 || src >= cells) continue;
                const Complex v = hp.amp * y(2 * src + hp.col_sub);
                if (hp.row_sub == 0) {
                    a += v;
                } else {
                    b += v;
                }
            }
            out(2 * c) = Complex(a.imag(), -a.real());
            out(2 * c + 1) = Complex(b.imag(), -b.real());
        }
        return out;
    };

    Trajectory traj;
    traj.cells = cells;
    traj.force = force;
    traj.dt_store = dt_store;
    Eigen::VectorXcd y = initial;
    double log_norm = std::log(y.norm());
    y /= y.norm();
    traj.times.push_back(0.0);
    traj.states.push_back(y);
    traj.norm_log.push_back(log_norm);

    const long n_store = std::lround(t_max / dt_store);
    double hstep = 0.0;
    for (long i = 1; i <= n_store; ++i) {
        const double t0 = (i - 1) * dt_store;
        const double t1 = i * dt_store;
        traj.stats.merge(dopri5(rhs, y, t0, t1, opts.ode, hstep));
        const double n = y.norm();
        y /= n;
        log_norm += std::log(n);
        double edge = 0.0;
        for (int c = 0; c < opts.edge_cells; ++c) {
            for (int s = 0; s < 2; ++s) {
                edge = std::max(edge, std::abs(y(2 * c + s)));
                edge = std::max(edge, std::abs(y(2 * (cells - 1 - c) + s)));
            }
        }
        if (edge > opts.edge_tol) throw BoundaryReachError(t1, edge);
        traj.times.push_back(t1);
        traj.states.push_back(y);
        traj.norm_log.push_back(log_norm);
    }
    return traj;
}

namespace {

// Least-squares slope of y(t) over indices [from, to).
double slope(const std::vector<double>& t, const std::vector<double>& y, std::size_t from,
             std::size_t to) {
    const double n = static_cast<double>(to - from);
    double st = 0, sy = 0;
    for (std::size_t i = from; i < to; ++i) {
        st += t[i];
        sy += y[i];
    }
    const double mt = st / n, my = sy / n;
    double num = 0, den = 0;
    for (std::size_t i = from; i < to; ++i) {
        num += (t[i] - mt) * (y[i] - my);
        den += (t[i] - mt) * (t[i] - mt);
    }
    return den > 0 ? num / den : 0.0;
}

}  // namespace

PeriodicityReport periodicity_report(const Trajectory& traj, Complex theta_shift,
                                     double threshold) {
    PeriodicityReport r;
    r.threshold = threshold;
    const double force = traj.force;
    const double dt = traj.dt_store;
    r.t1_period = kTwoPi / force;
    r.t2_expected = kPi / theta_shift.real();
    r.expected_growth_rate = theta_shift.imag();

    const double per = r.t1_period / dt;
    const long shift = std::lround(per);
    if (shift < 2 || std::abs(per - shift) > 1e-9 * per) {
        throw ConfigError("snapshot spacing must divide T1 = 2pi/F");
    }
    // Im gamma = 2 pi Im Theta / F; below 1e-6 the transition counts as sharp.
    const double im = std::abs(theta_shift.imag());
    r.transient_estimate = kTwoPi * im / force > 1e-6 ? 3.0 / (kTwoPi * im) : 0.0;
    const double t_max = traj.times.back();
    if (t_max < r.transient_estimate + 5 * r.t1_period) {
        throw InsufficientHorizonError("horizon " + format_double(t_max) +
                                       " shorter than transient + 5 T1 = " +
                                       format_double(r.transient_estimate + 5 * r.t1_period));
    }

    const std::size_t count = traj.states.size();
    const std::size_t first = static_cast<std::size_t>(std::ceil(r.transient_estimate / dt - 1e-9));

    // f(t) = |<s(t)|s(t + T1)>|
    const std::size_t nf = count - shift;
    std::vector<double> fid(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        fid[i] = std::abs(traj.states[i].dot(traj.states[i + shift]));
    }
    r.min_fidelity = 1.0;
    for (std::size_t i = first; i < nf; ++i) r.min_fidelity = std::min(r.min_fidelity, fid[i]);
    std::size_t settle = nf;
    while (settle > 0 && fid[settle - 1] > threshold) --settle;
    r.settle_time = settle < nf ? traj.times[settle] : std::numeric_limits<double>::quiet_NaN();
    r.periodic = settle < nf && traj.times[nf - 1] - traj.times[settle] >= 2 * r.t1_period;
    r.classification = r.periodic ? "periodic_t1" : "aperiodic";

    const std::size_t fit_from =
        r.periodic ? std::max(first, settle) : std::max(first, count / 2);
    r.growth_rate = slope(traj.times, traj.norm_log, std::min(fit_from, count - 2), count);

    // Strict period including the global phase.
    const std::size_t start = r.periodic ? std::max(first, settle) : first;
    for (int m = 1; m <= 4 && r.strict_period == 0; ++m) {
        const std::size_t lag = m * shift;
        if (start + lag >= count) break;
        bool ok = true;
        for (std::size_t i = start; i + lag < count && ok; ++i) {
            ok = traj.states[i].dot(traj.states[i + lag]).real() > threshold;
        }
        if (ok) r.strict_period = m;
    }

    // Autocorrelation A(tau) = mean_t |<s(t)|s(t + tau)>| over t past the transient.
    const std::size_t window = count - first;
    const std::size_t max_lag = std::min<std::size_t>(2 * shift, window / 2);
    std::vector<double> ac(max_lag + 1, 0.0);
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        double acc = 0.0;
        const std::size_t n = count - lag - first;
        for (std::size_t i = first; i + lag < count; ++i) {
            acc += std::abs(traj.states[i].dot(traj.states[i + lag]));
        }
        ac[lag] = acc / static_cast<double>(n);
    }
    double best = -1.0;
    for (std::size_t lag = 2; lag < max_lag; ++lag) {
        if (ac[lag] > ac[lag - 1] && ac[lag] >= ac[lag + 1] && ac[lag] > best) {
            best = ac[lag];
            r.t1_detected = lag * dt;
        }
    }

    // Dominant frequency of |<s(t_first)|s(t)>|^2 away from the harmonics of F.
    std::vector<double> sig(window);
    double mean = 0.0;
    for (std::size_t i = 0; i < window; ++i) {
        sig[i] = std::norm(traj.states[first].dot(traj.states[first + i]));
        mean += sig[i];
    }
    mean /= static_cast<double>(window);
    for (double& v : sig) v -= mean;
    const double span = window * dt;
    const double resolution = kTwoPi / span;
    const double nyquist = kPi / dt;
    auto power = [&](double w) {
        Complex acc{};
        for (std::size_t i = 0; i < window; ++i) acc += sig[i] * std::polar(1.0, -w * i * dt);
        return std::norm(acc);
    };
    double best_w = 0.0, best_p = -1.0;
    const double dw = resolution / 4;
    for (double w = resolution; w < nyquist; w += dw) {
        const double harmonic = force * std::round(w / force);
        if (std::abs(w - harmonic) < 1.5 * resolution) continue;
        const double p = power(w);
        if (p > best_p) {
            best_p = p;
            best_w = w;
        }
    }
    if (best_p > 0) {
        // Golden-section polish inside the bin.
        double lo = best_w - dw, hi = best_w + dw;
        const double g = (std::sqrt(5.0) - 1) / 2;
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double f1 = power(x1), f2 = power(x2);
        for (int it = 0; it < 40; ++it) {
            if (f1 > f2) {
                hi = x2; x2 = x1; f2 = f1; x1 = hi - g * (hi - lo); f1 = power(x1);
            } else {
                lo = x1; x1 = x2; f1 = f2; x2 = lo + g * (hi - lo); f2 = power(x2);
            }
        }
        r.t2_detected = kTwoPi / (0.5 * (lo + hi));
    }
    return r;
}

std::string to_json(const PeriodicityReport& r) {
    auto num = [](double x) -> nlohmann::json {
        if (std::isfinite(x)) return x;
        return nullptr;
    };
    nlohmann::json j;
    j["classification"] = r.classification;
    j["periodic"] = r.periodic;
    j["t1_period"] = num(r.t1_period);
    j["t1_detected"] = num(r.t1_detected);
    j["t2_expected"] = num(r.t2_expected);
    j["t2_detected"] = num(r.t2_detected);
    j["transient_estimate"] = num(r.transient_estimate);
    j["settle_time"] = num(r.settle_time);
    j["min_fidelity"] = num(r.min_fidelity);
    j["growth_rate"] = num(r.growth_rate);
    j["expected_growth_rate"] = num(r.expected_growth_rate);
    j["strict_period_multiple"] = r.strict_period;
    j["threshold"] = r.threshold;
    return j.dump(2);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int site_stride) {
    if (site_stride < 1) site_stride = 1;
    const int sites = 2 * traj.cells;
    os << "t";
    for (int s = 0; s < sites; s += site_stride) os << ",site_" << s;
    os << ",norm_log\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << format_double(traj.times[i]);
        for (int s = 0; s < sites; s += site_stride) {
            os << ',' << format_double(std::norm(traj.states[i](s)));
        }
        os << ',' << format_double(traj.norm_log[i]) << '\n';
    }
}

}  // namespace zak

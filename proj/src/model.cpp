#include "zak/model.hpp"

#include "zak/errors.hpp"
#include "zak/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace zak {

namespace {

double central_difference(const RealFunction& f, double k) {
    const double h = TwoLevelModel::kDerivativeStep;
    return (f(k + h) - f(k - h)) / (2.0 * h);
}

void validate(const ModelFunctions& m) {
    if (!m.g || !m.w || !m.r || !m.phi) {
        throw InvalidModelError("model '" + m.name + "' is missing one of g, w, r, phi");
    }
    constexpr int kSamples = 256;
    double r_scale = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
        const double k = kTwoPi * i / kSamples;
        r_scale = std::max(r_scale, std::abs(m.r(k)));
    }
    for (int i = 0; i <= kSamples; ++i) {
        const double k = kTwoPi * i / kSamples;
        for (const auto* f : {&m.g, &m.w, &m.r}) {
            const double a = (*f)(k);
            const double b = (*f)(k + kTwoPi);
            if (!std::isfinite(a) || std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
                throw InvalidModelError("model '" + m.name + "' is not 2pi-periodic at k=" +
                                        std::to_string(k));
            }
        }
        if (!(std::abs(m.r(k)) > 1e-12 * std::max(1.0, r_scale))) {
            throw InvalidModelError("model '" + m.name + "' has R(k)=0 at k=" +
                                    std::to_string(k));
        }
    }
    // Winding from the integrated derivative of the continuous phase.
    auto dphi = [&](double k) { return m.dphi ? m.dphi(k) : central_difference(m.phi, k); };
    const QuadratureResult q =
        integrate([&](double k) { return Complex(dphi(k), 0.0); }, 0.0, kTwoPi, {1e-12, 0, 5000});
    const double winding = q.value.real() / kTwoPi;
    if (std::abs(winding - m.phi_winding) > 1e-9) {
        throw InvalidModelError("model '" + m.name + "' declares phi winding " +
                                std::to_string(m.phi_winding) + " but the phase winds " +
                                std::to_string(winding));
    }
}

}  // namespace

TwoLevelModel::TwoLevelModel(ModelFunctions functions, double lambda, double epsilon)
    : fns_(std::make_shared<const ModelFunctions>(std::move(functions))),
      lambda_(lambda),
      epsilon_(epsilon) {
    if (!(lambda >= 0.0) || !(epsilon >= 0.0)) {
        throw InvalidModelError("lambda and epsilon must be non-negative");
    }
    validate(*fns_);
}

TwoLevelModel::TwoLevelModel(std::shared_ptr<const ModelFunctions> fns, double lambda,
                             double epsilon)
    : fns_(std::move(fns)), lambda_(lambda), epsilon_(epsilon) {
    if (!(lambda >= 0.0) || !(epsilon >= 0.0)) {
        throw InvalidModelError("lambda and epsilon must be non-negative");
    }
}

double TwoLevelModel::dg(double k) const {
    return fns_->dg ? fns_->dg(k) : central_difference(fns_->g, k);
}
double TwoLevelModel::dw(double k) const {
    return fns_->dw ? fns_->dw(k) : central_difference(fns_->w, k);
}
double TwoLevelModel::dr(double k) const {
    return fns_->dr ? fns_->dr(k) : central_difference(fns_->r, k);
}
double TwoLevelModel::dphi(double k) const {
    return fns_->dphi ? fns_->dphi(k) : central_difference(fns_->phi, k);
}

bool TwoLevelModel::has_closed_form_derivatives() const {
    return fns_->dg && fns_->dw && fns_->dr && fns_->dphi;
}

TwoLevelModel TwoLevelModel::with_lambda(double lambda) const {
    return TwoLevelModel(fns_, lambda, epsilon_);
}

TwoLevelModel TwoLevelModel::with_epsilon(double epsilon) const {
    return TwoLevelModel(fns_, lambda_, epsilon);
}

Matrix2 hamiltonian_at(const TwoLevelModel& model, double k) {
    const double g = model.g(k);
    const double lw = model.lambda() * model.w(k);
    const double eps = model.epsilon();
    const Complex off = std::polar(model.r(k), model.phi(k));
    Matrix2 h;
    h(0, 0) = Complex(g + eps, lw);
    h(1, 1) = Complex(g - eps, -lw);
    h(0, 1) = off;
    h(1, 0) = std::conj(off);
    return h;
}

double mean_diagonal(const TwoLevelModel& model) {
    const QuadratureResult q = integrate(
        [&](double k) { return Complex(model.g(k), 0.0); }, 0.0, kTwoPi, {1e-13, 0, 5000});
    return q.value.real() / kTwoPi;
}

TwoLevelModel builtin_example(int which, std::span<const double> params, double lambda) {
    auto require = [&](std::size_t n) {
        if (params.size() != n) {
            throw InvalidModelError("builtin example " + std::to_string(which) + " expects " +
                                    std::to_string(n) + " parameters");
        }
    };
    auto zero = [](double) { return 0.0; };
    auto one = [](double) { return 1.0; };
    ModelFunctions m;
    switch (which) {
        case 1: {
            require(1);
            const double r0 = params[0];
            if (!(r0 > 0)) throw InvalidModelError("example 1 requires R0 > 0");
            m.name = "example1";
            m.g = zero;
            m.w = one;
            m.r = [r0](double) { return r0; };
            m.phi = [](double k) { return k; };
            m.dg = zero;
            m.dw = zero;
            m.dr = zero;
            m.dphi = one;
            m.phi_winding = 1;
            break;
        }
        case 2: {
            require(2);
            const double t1 = params[0];
            const double t2 = params[1];
            if (!(t1 > t2 && t2 > 0)) throw InvalidModelError("example 2 requires t1 > t2 > 0");
            m.name = "example2";
            m.g = zero;
            m.w = one;
            m.r = [t1, t2](double k) { return t1 + t2 * std::cos(k); };
            m.phi = zero;
            m.dg = zero;
            m.dw = zero;
            m.dr = [t2](double k) { return -t2 * std::sin(k); };
            m.dphi = zero;
            m.phi_winding = 0;
            break;
        }
        case 3: {
            require(3);
            const double t0 = params[0];
            const double t1 = params[1];
            const double t2 = params[2];
            if (!(t0 > 0 && t1 > 0 && t2 > 0) || t1 == t2) {
                throw InvalidModelError("example 3 requires t0, t1, t2 > 0 and t1 != t2");
            }
            m.name = "example3";
            m.g = [t0](double k) { return t0 * std::cos(k); };
            m.w = one;
            m.r = [t1, t2](double k) {
                return std::sqrt(t1 * t1 + t2 * t2 + 2 * t1 * t2 * std::cos(k));
            };
            if (t2 > t1) {
                // arg(t1 + t2 e^{ik}) = k + arg(t2 + t1 e^{-ik}); the second term stays in
                // (-pi/2, pi/2), so this branch is continuous with winding 1.
                m.phi = [t1, t2](double k) {
                    return k - std::atan2(t1 * std::sin(k), t2 + t1 * std::cos(k));
                };
                m.phi_winding = 1;
            } else {
                m.phi = [t1, t2](double k) {
                    return std::atan2(t2 * std::sin(k), t1 + t2 * std::cos(k));
                };
                m.phi_winding = 0;
            }
            m.dg = [t0](double k) { return -t0 * std::sin(k); };
            m.dw = zero;
            m.dr = [t1, t2](double k) {
                const double r = std::sqrt(t1 * t1 + t2 * t2 + 2 * t1 * t2 * std::cos(k));
                return -t1 * t2 * std::sin(k) / r;
            };
            m.dphi = [t1, t2](double k) {
                return t2 * (t2 + t1 * std::cos(k)) /
                       (t1 * t1 + t2 * t2 + 2 * t1 * t2 * std::cos(k));
            };
            break;
        }
        default:
            throw InvalidModelError("unknown builtin example " + std::to_string(which));
    }
    return TwoLevelModel(std::move(m), lambda);
}

// --- lattices ---------------------------------------------------------------

namespace {

Complex fourier_sum(const std::map<int, Complex>& c, double k) {
    Complex s{0.0, 0.0};
    for (const auto& [l, amp] : c) s += amp * std::polar(1.0, -k * l);
    return s;
}

Complex fourier_derivative(const std::map<int, Complex>& c, double k) {
    Complex s{0.0, 0.0};
    for (const auto& [l, amp] : c) s += amp * Complex(0.0, -double(l)) * std::polar(1.0, -k * l);
    return s;
}

Complex lookup(const std::map<int, Complex>& c, int l) {
    const auto it = c.find(l);
    return it == c.end() ? Complex{} : it->second;
}

}  // namespace

void LatticeHoppings::check_pt_symmetry(double tol) const {
    auto check = [&](const std::map<int, Complex>& lhs, const std::map<int, Complex>& rhs,
                     const char* lname, const char* rname) {
        std::vector<int> offsets;
        for (const auto& kv : lhs) offsets.push_back(kv.first);
        for (const auto& kv : rhs) offsets.push_back(-kv.first);
        std::sort(offsets.begin(), offsets.end());
        for (int l : offsets) {
            const Complex want = lookup(lhs, l);
            const Complex got = std::conj(lookup(rhs, -l));
            if (std::abs(want - got) > tol) {
                throw SymmetryError(std::string("PT symmetry violated at offset l=") +
                                        std::to_string(l) + ": conj(" + rname + "_{" +
                                        std::to_string(-l) + "}) != " + lname + "_{" +
                                        std::to_string(l) + "}",
                                    l);
            }
        }
    };
    check(sigma, theta, "sigma", "theta");
    check(rho, eta, "rho", "eta");
}

Matrix2 LatticeHoppings::bloch_hamiltonian(double k) const {
    Matrix2 h;
    h(0, 0) = fourier_sum(rho, k);
    h(0, 1) = fourier_sum(sigma, k);
    h(1, 0) = fourier_sum(theta, k);
    h(1, 1) = fourier_sum(eta, k);
    return h;
}

Matrix2 LatticeHoppings::bloch_derivative(double k) const {
    Matrix2 h;
    h(0, 0) = fourier_derivative(rho, k);
    h(0, 1) = fourier_derivative(sigma, k);
    h(1, 0) = fourier_derivative(theta, k);
    h(1, 1) = fourier_derivative(eta, k);
    return h;
}

int LatticeHoppings::max_range() const {
    int m = 0;
    for (const auto* c : {&rho, &sigma, &theta, &eta}) {
        for (const auto& [l, amp] : *c) {
            if (amp != Complex{}) m = std::max(m, std::abs(l));
        }
    }
    return m;
}

LatticeHoppings builtin_hoppings(int which, std::span<const double> params) {
    LatticeHoppings h;
    switch (which) {
        case 1:
            if (params.size() != 1) throw InvalidModelError("example 1 expects {R0}");
            h.sigma[-1] = params[0];
            h.theta[1] = params[0];
            break;
        case 2:
            if (params.size() != 2) throw InvalidModelError("example 2 expects {t1, t2}");
            h.sigma = {{-1, params[1] / 2}, {0, params[0]}, {1, params[1] / 2}};
            h.theta = h.sigma;
            break;
        case 3:
            if (params.size() != 3) throw InvalidModelError("example 3 expects {t0, t1, t2}");
            h.rho = {{-1, params[0] / 2}, {1, params[0] / 2}};
            h.eta = h.rho;
            h.sigma = {{-1, params[2]}, {0, params[1]}};
            h.theta = {{0, params[1]}, {1, params[2]}};
            break;
        default:
            throw InvalidModelError("unknown builtin example " + std::to_string(which));
    }
    return h;
}

LatticeHoppings with_gain_loss(LatticeHoppings h, double lambda) {
    h.rho[0] += Complex(0.0, lambda);
    h.eta[0] -= Complex(0.0, lambda);
    return h;
}

double gain_loss_strength(const LatticeHoppings& h) {
    constexpr int kGrid = 8192;
    double s = 0.0;
    for (int i = 0; i < kGrid; ++i) {
        s = std::max(s, std::abs(fourier_sum(h.rho, kTwoPi * i / kGrid).imag()));
    }
    return s < 1e-300 ? 0.0 : s;
}

LatticeHoppings rescale_gain_loss(const LatticeHoppings& h, double lambda) {
    const double s0 = gain_loss_strength(h);
    if (s0 == 0.0) {
        if (lambda == 0.0) return h;
        throw InvalidModelError("lattice has no gain/loss profile to rescale");
    }
    // rho_l = (rho_l + conj rho_{-l})/2 + (rho_l - conj rho_{-l})/2; the second part is i W.
    LatticeHoppings out = h;
    out.rho.clear();
    out.eta.clear();
    std::vector<int> offsets;
    for (const auto& kv : h.rho) {
        offsets.push_back(kv.first);
        offsets.push_back(-kv.first);
    }
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    const double f = lambda / s0;
    for (int l : offsets) {
        const Complex a = lookup(h.rho, l);
        const Complex b = std::conj(lookup(h.rho, -l));
        const Complex v = 0.5 * (a + b) + f * 0.5 * (a - b);
        if (v != Complex{}) out.rho[l] = v;
    }
    for (const auto& [l, v] : out.rho) out.eta[-l] = std::conj(v);
    return out;
}

TwoLevelModel bloch_from_hoppings(const LatticeHoppings& h) {
    h.check_pt_symmetry();

    // Gain/loss scale, so W is O(1).
    constexpr int kGrid = 8192;
    const double lambda0 = gain_loss_strength(h);
    const double w_scale = lambda0 > 0 ? 1.0 / lambda0 : 0.0;

    // Continuous phase of H12 tracked on a fine grid.
    auto raw_phase = [sigma = h.sigma](double k) { return std::arg(fourier_sum(sigma, k)); };
    auto unwrapped = std::make_shared<std::vector<double>>(kGrid + 1);
    (*unwrapped)[0] = raw_phase(0.0);
    for (int i = 1; i <= kGrid; ++i) {
        const double raw = raw_phase(kTwoPi * i / kGrid);
        const double prev = (*unwrapped)[i - 1];
        (*unwrapped)[i] = raw + kTwoPi * std::round((prev - raw) / kTwoPi);
    }
    const int winding =
        static_cast<int>(std::lround(((*unwrapped)[kGrid] - (*unwrapped)[0]) / kTwoPi));

    ModelFunctions m;
    m.name = "lattice";
    const auto rho = h.rho;
    const auto sigma = h.sigma;
    m.g = [rho](double k) { return fourier_sum(rho, k).real(); };
    m.w = [rho, w_scale](double k) { return fourier_sum(rho, k).imag() * w_scale; };
    m.r = [sigma](double k) { return std::abs(fourier_sum(sigma, k)); };
    m.phi = [sigma, unwrapped, winding](double k) {
        const double turns = std::floor(k / kTwoPi);
        const double kk = k - turns * kTwoPi;
        const double pos = kk / kTwoPi * kGrid;
        const int i = std::clamp(static_cast<int>(pos), 0, kGrid - 1);
        const double frac = pos - i;
        const double ref = (1 - frac) * (*unwrapped)[i] + frac * (*unwrapped)[i + 1] +
                           kTwoPi * winding * turns;
        const double raw = std::arg(fourier_sum(sigma, k));
        return raw + kTwoPi * std::round((ref - raw) / kTwoPi);
    };
    m.dg = [rho](double k) { return fourier_derivative(rho, k).real(); };
    m.dw = [rho, w_scale](double k) { return fourier_derivative(rho, k).imag() * w_scale; };
    m.dr = [sigma](double k) {
        const Complex z = fourier_sum(sigma, k);
        return (std::conj(z) * fourier_derivative(sigma, k)).real() / std::abs(z);
    };
    m.dphi = [sigma](double k) {
        return (fourier_derivative(sigma, k) / fourier_sum(sigma, k)).imag();
    };
    m.phi_winding = winding;
    return TwoLevelModel(std::move(m), lambda0);
}

}  // namespace zak

#pragma once

#include "zak/types.hpp"

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>

namespace zak {

using RealFunction = std::function<double(double)>;

// The k-dependent ingredients of a PT-symmetric two-level Bloch Hamiltonian
//
//   H11 = G + i lambda W + eps,  H22 = G - i lambda W - eps,
//   H12 = R exp(i phi),          H21 = R exp(-i phi).
//
// phi is the continuous (unwrapped) branch; phi(k + 2pi) = phi(k) + 2pi * phi_winding.
// Derivatives are optional; missing ones fall back to central differences.
struct ModelFunctions {
    std::string name;
    RealFunction g;
    RealFunction w;
    RealFunction r;
    RealFunction phi;
    RealFunction dg;
    RealFunction dw;
    RealFunction dr;
    RealFunction dphi;
    int phi_winding = 0;
};

// Immutable model; copies share the function table.
class TwoLevelModel {
public:
    // Validates periodicity of g, w, r, that r never vanishes on a sampling grid and that
    // phi_winding matches the integrated derivative of phi. Throws InvalidModelError.
    TwoLevelModel(ModelFunctions functions, double lambda, double epsilon = 0.0);

    double g(double k) const { return fns_->g(k); }
    double w(double k) const { return fns_->w(k); }
    double r(double k) const { return fns_->r(k); }
    double phi(double k) const { return fns_->phi(k); }
    double dg(double k) const;
    double dw(double k) const;
    double dr(double k) const;
    double dphi(double k) const;

    int phi_winding() const { return fns_->phi_winding; }
    double lambda() const { return lambda_; }
    double epsilon() const { return epsilon_; }
    const std::string& name() const { return fns_->name; }
    bool has_closed_form_derivatives() const;

    TwoLevelModel with_lambda(double lambda) const;
    TwoLevelModel with_epsilon(double epsilon) const;

    // Step used for finite-difference derivatives of user-supplied functions.
    static constexpr double kDerivativeStep = kTwoPi / 8192.0;

private:
    TwoLevelModel(std::shared_ptr<const ModelFunctions> fns, double lambda, double epsilon);

    std::shared_ptr<const ModelFunctions> fns_;
    double lambda_;
    double epsilon_;
};

Matrix2 hamiltonian_at(const TwoLevelModel& model, double k);

// (1/2pi) * integral of G over one period.
double mean_diagonal(const TwoLevelModel& model);

// Closed-form models:
//   1: params {R0}          G=0, W=1, R=R0, phi=k
//   2: params {t1, t2}      G=0, W=1, R=t1+t2 cos k, phi=0            (t1 > t2 > 0)
//   3: params {t0, t1, t2}  G=t0 cos k, W=1, R=|t1+t2 e^{ik}|, phi=arg (t1 != t2, all > 0)
TwoLevelModel builtin_example(int which, std::span<const double> params, double lambda = 0.0);

// Hopping amplitudes of a two-band lattice keyed by cell offset l.
struct LatticeHoppings {
    std::map<int, Complex> rho;    // A -> A
    std::map<int, Complex> sigma;  // B -> A
    std::map<int, Complex> theta;  // A -> B
    std::map<int, Complex> eta;    // B -> B

    // Throws SymmetryError naming the first offset violating
    // conj(theta_{-l}) = sigma_l or conj(eta_{-l}) = rho_l.
    void check_pt_symmetry(double tol = 1e-12) const;

    // Entries sum_l c_l exp(-i k l).
    Matrix2 bloch_hamiltonian(double k) const;
    Matrix2 bloch_derivative(double k) const;

    // Largest |l| with a nonzero amplitude.
    int max_range() const;
};

// Hermitian hopping pattern whose Bloch Hamiltonian equals builtin example `which` at lambda=0.
LatticeHoppings builtin_hoppings(int which, std::span<const double> params);

// Adds gain +i lambda on sublattice A and loss -i lambda on sublattice B.
LatticeHoppings with_gain_loss(LatticeHoppings h, double lambda);

// max_k |Im H11(k)|: the gain/loss strength carried by rho (and, through PT, eta).
double gain_loss_strength(const LatticeHoppings& h);

// Keeps the Hermitian part of rho/eta and rescales the anti-Hermitian part so that
// gain_loss_strength() == lambda. Throws InvalidModelError when there is no gain/loss to scale
// and lambda > 0.
LatticeHoppings rescale_gain_loss(const LatticeHoppings& h, double lambda);

// W is normalised so max |W| = 1 and lambda carries the gain/loss strength.
TwoLevelModel bloch_from_hoppings(const LatticeHoppings& h);

}  // namespace zak

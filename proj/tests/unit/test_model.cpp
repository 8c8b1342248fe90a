#include <doctest.h>

#include "zak/errors.hpp"
#include "zak/model.hpp"

#include <random>
#include <vector>

using namespace zak;

namespace {

double max_diff(const Matrix2& a, const Matrix2& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("hamiltonian entries of the closed-form models") {
    const std::vector<double> p1{1.0};
    const TwoLevelModel m1 = builtin_example(1, p1, 0.5);
    Matrix2 want;
    want << Complex(0, 0.5), Complex(0, 1), Complex(0, -1), Complex(0, -0.5);
    CHECK(max_diff(hamiltonian_at(m1, kPi / 2), want) < 1e-15);

    const std::vector<double> p3{0.3, 0.5, 1.0};
    const TwoLevelModel m3 = builtin_example(3, p3, 0.0);
    want << 0.3, 1.5, 1.5, 0.3;
    CHECK(max_diff(hamiltonian_at(m3, 0.0), want) < 1e-15);

    const std::vector<double> p2{1.0, 0.5};
    const TwoLevelModel m2 = builtin_example(2, p2, 0.0);
    for (double k : {0.1, 1.3, 2.9, 5.0}) {
        const Matrix2 h = hamiltonian_at(m2, k);
        CHECK(max_diff(h, h.adjoint()) < 1e-15);
        CHECK(m2.r(k) == doctest::Approx(1.0 + 0.5 * std::cos(k)));
        CHECK(m2.phi(k) == 0.0);
    }
    CHECK(m3.r(1.0) == doctest::Approx(std::sqrt(1.25 + std::cos(1.0))));
    CHECK(m3.phi(1.0) == doctest::Approx(std::atan2(std::sin(1.0), 0.5 + std::cos(1.0))));
}

TEST_CASE("PT algebra of the Bloch Hamiltonian") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> k(0.0, kTwoPi);
    Matrix2 sx;
    sx << 0, 1, 1, 0;
    const std::vector<double> p3{0.3, 0.5, 1.0};
    const TwoLevelModel m = builtin_example(3, p3, 0.7);
    for (int i = 0; i < 100; ++i) {
        const Matrix2 h = hamiltonian_at(m, k(rng));
        CHECK(max_diff(sx * h.conjugate() * sx, h) < 1e-12);
    }
}

TEST_CASE("winding numbers") {
    const std::vector<double> p1{1.0};
    CHECK(builtin_example(1, p1).phi_winding() == 1);
    const std::vector<double> p2{1.0, 0.5};
    CHECK(builtin_example(2, p2).phi_winding() == 0);
    const std::vector<double> a{0.3, 0.5, 1.0};
    const std::vector<double> b{0.3, 1.0, 0.5};
    const TwoLevelModel wa = builtin_example(3, a);
    const TwoLevelModel wb = builtin_example(3, b);
    CHECK(wa.phi_winding() == 1);
    CHECK(wb.phi_winding() == 0);
    // Continuous branch: phi(2pi) - phi(0) = 2pi * winding.
    CHECK(wa.phi(kTwoPi) - wa.phi(0.0) == doctest::Approx(kTwoPi));
    for (int n : {64, 4096}) {
        double acc = 0.0;
        double prev = wa.phi(0.0);
        for (int i = 1; i <= n; ++i) {
            const double cur = wa.phi(kTwoPi * i / n);
            acc += cur - prev;
            prev = cur;
        }
        CHECK(acc / kTwoPi == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("closed-form derivatives agree with finite differences") {
    const std::vector<double> p3{0.3, 0.5, 1.0};
    const TwoLevelModel m = builtin_example(3, p3, 0.4);
    CHECK(m.has_closed_form_derivatives());
    const double h = 1e-6;
    for (double k : {0.2, 1.7, 3.0, 4.4}) {
        CHECK(m.dphi(k) == doctest::Approx((m.phi(k + h) - m.phi(k - h)) / (2 * h)).epsilon(1e-7));
        CHECK(m.dr(k) == doctest::Approx((m.r(k + h) - m.r(k - h)) / (2 * h)).epsilon(1e-7));
        CHECK(m.dg(k) == doctest::Approx((m.g(k + h) - m.g(k - h)) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("user models fall back to finite differences") {
    ModelFunctions f;
    f.name = "user";
    f.g = [](double k) { return 0.1 * std::sin(k); };
    f.w = [](double k) { return 1.0 + 0.2 * std::cos(2 * k); };
    f.r = [](double k) { return 2.0 + std::cos(k); };
    f.phi = [](double k) { return k + 0.3 * std::sin(k); };
    f.phi_winding = 1;
    const TwoLevelModel m(f, 0.3);
    CHECK_FALSE(m.has_closed_form_derivatives());
    CHECK(m.dphi(0.5) == doctest::Approx(1.0 + 0.3 * std::cos(0.5)).epsilon(1e-6));
    CHECK(m.dw(0.5) == doctest::Approx(-0.4 * std::sin(1.0)).epsilon(1e-6));
    CHECK(mean_diagonal(m) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("invalid models are rejected") {
    const std::vector<double> bad2{0.5, 1.0};
    CHECK_THROWS_AS(builtin_example(2, bad2), InvalidModelError);
    const std::vector<double> bad3{0.3, 1.0, 1.0};
    CHECK_THROWS_AS(builtin_example(3, bad3), InvalidModelError);
    const std::vector<double> wrong_count{1.0, 2.0};
    CHECK_THROWS_AS(builtin_example(1, wrong_count), InvalidModelError);

    ModelFunctions f;
    f.name = "nonperiodic";
    f.g = [](double k) { return k; };
    f.w = [](double) { return 1.0; };
    f.r = [](double) { return 1.0; };
    f.phi = [](double) { return 0.0; };
    CHECK_THROWS_AS(TwoLevelModel(f, 0.1), InvalidModelError);

    f.g = [](double) { return 0.0; };
    f.phi_winding = 1;
    CHECK_THROWS_AS(TwoLevelModel(f, 0.1), InvalidModelError);

    LatticeHoppings h;
    h.rho[0] = 0.4;
    h.eta[0] = 0.4;
    CHECK_THROWS_AS(bloch_from_hoppings(h), InvalidModelError);
}

TEST_CASE("lattice hoppings reproduce the closed-form models") {
    struct Case {
        int which;
        std::vector<double> params;
    };
    for (const Case& c : {Case{1, {1.0}}, Case{2, {1.0, 0.5}}, Case{3, {0.3, 0.5, 1.0}},
                          Case{3, {0.3, 1.0, 0.5}}}) {
        CAPTURE(c.which);
        const double lambda = 0.35;
        const TwoLevelModel ref = builtin_example(c.which, c.params, lambda);
        const LatticeHoppings h = with_gain_loss(builtin_hoppings(c.which, c.params), lambda);
        const TwoLevelModel lat = bloch_from_hoppings(h);
        CHECK(lat.lambda() == doctest::Approx(lambda));
        CHECK(lat.phi_winding() == ref.phi_winding());
        for (int i = 0; i < 64; ++i) {
            const double k = kTwoPi * i / 64;
            CHECK(max_diff(hamiltonian_at(lat, k), hamiltonian_at(ref, k)) < 1e-12);
            CHECK(max_diff(h.bloch_hamiltonian(k), hamiltonian_at(ref, k)) < 1e-12);
            CHECK(lat.dphi(k) == doctest::Approx(ref.dphi(k)).epsilon(1e-10));
            CHECK(lat.dr(k) == doctest::Approx(ref.dr(k)).scale(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("PT violations name the offset") {
    LatticeHoppings h = builtin_hoppings(2, std::vector<double>{1.0, 0.5});
    h.theta[1] = Complex(0.5, 0.1);
    try {
        h.check_pt_symmetry();
        FAIL("expected a symmetry error");
    } catch (const SymmetryError& e) {
        CHECK(std::abs(e.offset()) == 1);
        CHECK(std::string(e.what()).find("l=") != std::string::npos);
    }
    CHECK_THROWS_AS(bloch_from_hoppings(h), SymmetryError);
    CHECK(builtin_hoppings(3, std::vector<double>{0.3, 0.5, 1.0}).max_range() == 1);
}

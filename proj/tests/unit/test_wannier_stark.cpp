#include <doctest.h>

#include "zak/berry.hpp"
#include "zak/errors.hpp"
#include "zak/quadrature.hpp"
#include "zak/wannier_stark.hpp"

#include <sstream>
#include <vector>

using namespace zak;

namespace {

const std::vector<double> kEx1{1.0};
const std::vector<double> kEx2{1.0, 0.5};
const std::vector<double> kEx3{0.3, 0.5, 1.0};

double overlap(const WSEigenstate& x, const WSEigenstate& y, int shift) {
    // <x_n | y_{n + shift}>
    Complex acc{};
    for (std::size_t i = 0; i < x.a.size(); ++i) {
        const int n = x.n_min + static_cast<int>(i) + shift;
        const int j = n - y.n_min;
        if (j < 0 || j >= static_cast<int>(y.a.size())) continue;
        acc += std::conj(x.a[i]) * y.a[j] + std::conj(x.b[i]) * y.b[j];
    }
    return std::abs(acc);
}

}  // namespace

TEST_CASE("ladder structure") {
    const TwoLevelModel m = builtin_example(3, kEx3, 0.25);
    const WSLadder lad = ws_spectrum(m, 0.02, -3, 3);
    REQUIRE(lad.energies.size() == 14);
    CHECK(lad.theta_shift == lad.quasi.mu_plus);
    CHECK(lad.t1_period == doctest::Approx(kTwoPi / 0.02));
    for (const WSLevel& a : lad.energies) {
        for (const WSLevel& b : lad.energies) {
            if (a.branch != b.branch) continue;
            CHECK(std::abs(a.energy - b.energy - (a.l - b.l) * 0.02) < 1e-12);
        }
    }
    for (std::size_t i = 0; i + 1 < lad.energies.size(); i += 2) {
        const WSLevel& p = lad.energies[i];
        const WSLevel& q = lad.energies[i + 1];
        CHECK(std::abs(p.energy + q.energy - 2.0 * p.l * 0.02) < 1e-9);  // mean G is 0 here
    }
    // Imaginary part follows the Berry phase.
    const double want = 0.02 / kTwoPi * berry_phase(m).gamma_plus.imag();
    CHECK(lad.theta_shift.imag() == doctest::Approx(want).epsilon(0.02));
}

TEST_CASE("Hermitian ladder spacing between branches") {
    const TwoLevelModel m = builtin_example(2, kEx2, 0.0);
    const WSLadder lad = ws_spectrum(m, 0.02, -2, 2);
    CHECK(lad.energies.size() == 10);
    for (const WSLevel& lv : lad.energies) CHECK(std::abs(lv.energy.imag()) < 1e-10);
    // mu+ - mu- ~ 2 <R> = 2 t1
    CHECK((lad.theta_shift - lad.mu_minus).real() == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("sharp ladder stays real below the critical value") {
    const WSLadder lad = ws_spectrum(builtin_example(2, kEx2, 0.25), 0.02, -2, 2);
    for (const WSLevel& lv : lad.energies) CHECK(std::abs(lv.energy.imag()) <= 1e-8);
}

TEST_CASE("eigenstate reconstruction") {
    const TwoLevelModel m = builtin_example(3, kEx3, 0.25);
    const WSLadder lad = ws_spectrum(m, 0.05, 0, 2);
    const WSEigenstate s0 = ws_eigenstate(m, lad, Branch::Plus, 0, -80, 80);
    const WSEigenstate s2 = ws_eigenstate(m, lad, Branch::Plus, 2, -80, 80);
    CHECK(s0.boundary_residual <= 1e-8);
    CHECK(s0.grid_size >= 2048);
    double norm = 0.0;
    for (std::size_t i = 0; i < s0.a.size(); ++i) norm += std::norm(s0.a[i]) + std::norm(s0.b[i]);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    // Ladder index l moves the state by -l cells (higher energy sits at lower n).
    CHECK(overlap(s0, s2, -2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(s2.energy - s0.energy - 2 * 0.05) < 1e-12);

    SUBCASE("branch minus integrates against its decaying direction") {
        const WSEigenstate sm = ws_eigenstate(m, lad, Branch::Minus, 0, -80, 80);
        CHECK(sm.boundary_residual <= 1e-8);
        CHECK(std::abs(sm.energy - lad.mu_minus) < 1e-12);
    }
}

TEST_CASE("Hermitian eigenstate decays") {
    // 2 t1 / F must stay away from an integer: there the two ladders are resonant.
    const TwoLevelModel m = builtin_example(2, kEx2, 0.0);
    const WSEigenstate s = ws_eigenstate(m, 0.03, Branch::Plus, 0, -200, 200);
    auto amp = [&](int n) { return std::abs(s.a[n - s.n_min]) + std::abs(s.b[n - s.n_min]); };
    double prev = std::max(amp(20), amp(-20));
    for (int n = 40; n <= 200; n += 20) {
        const double cur = std::max(amp(n), amp(-n));
        CHECK(cur <= prev + 1e-13);
        prev = cur;
    }
    CHECK(tail_constant(s, 100, 200) <= 1e-6 * tail_constant(s, 20, 200));
}

TEST_CASE("oracle matches the ladder and the reconstructed state") {
    const double F = 0.05;
    const TwoLevelModel m = builtin_example(3, kEx3, 0.25);
    const WSOracleResult orc = ws_oracle(builtin_hoppings(3, kEx3), 0.25, F, 120);
    const WSLadder lad = ws_spectrum(m, F, 0, 0);
    const std::vector<int> idx = central_eigenvalues(orc);
    REQUIRE(idx.size() > 10);
    std::vector<Complex> ev;
    for (int j : idx) ev.push_back(orc.eigenvalues(j));
    for (const LadderMatch& lm : align_ladder(ev, F, lad.theta_shift, lad.mu_minus)) {
        CHECK(lm.re_misfit <= 1e-3 * F);
        CHECK(lm.im_misfit <= 0.1 * std::abs(lm.rung.energy.imag()));
    }

    // State overlap with the dense eigenvector of the same energy.
    const WSEigenstate s = ws_eigenstate(m, lad, Branch::Plus, 0, -60, 59);
    int best = 0;
    for (int j = 1; j < orc.eigenvalues.size(); ++j) {
        if (std::abs(orc.eigenvalues(j) - s.energy) < std::abs(orc.eigenvalues(best) - s.energy)) {
            best = j;
        }
    }
    const auto col = orc.eigenvectors.col(best);
    Complex ov{};
    for (int i = 0; i < 120; ++i) ov += std::conj(col(2 * i)) * s.a[i] + std::conj(col(2 * i + 1)) * s.b[i];
    CHECK(std::abs(ov) / col.norm() >= 0.999);

    CHECK_THROWS_AS(ws_oracle(builtin_hoppings(3, kEx3), 0.25, F, 99), InvalidModelError);
}

TEST_CASE("zero force oracle spans the Bloch bands") {
    const WSOracleResult orc = ws_oracle(builtin_hoppings(2, kEx2), 0.0, 0.0, 100);
    const auto re = orc.eigenvalues.real();
    CHECK(re.maxCoeff() == doctest::Approx(1.5).epsilon(1e-2));
    CHECK(re.minCoeff() == doctest::Approx(-1.5).epsilon(1e-2));
    double inner = 1e9;
    for (int j = 0; j < re.size(); ++j) inner = std::min(inner, std::abs(re(j)));
    CHECK(inner == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("transition classification") {
    CHECK(classify_transition(builtin_example(2, kEx2), 0.02) == Transition::Sharp);
    CHECK(classify_transition(builtin_example(3, kEx3), 0.02) == Transition::Smooth);
    CHECK(classify_transition(builtin_example(1, kEx1), 0.02) == Transition::Smooth);
    CHECK_THROWS_AS(classify_transition(builtin_example(2, kEx2), 0.5), ConfigError);
}

TEST_CASE("csv dumps") {
    const TwoLevelModel m = builtin_example(2, kEx2, 0.0);
    const WSLadder lad = ws_spectrum(m, 0.1, 0, 1);
    std::ostringstream os;
    write_spectrum_csv(os, lad);
    const std::string text = os.str();
    CHECK(text.rfind("l,branch,re_E,im_E\n0,+,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);

    const WSEigenstate s = ws_eigenstate(m, lad, Branch::Plus, 0, -2, 2);
    std::ostringstream es;
    write_eigenstate_csv(es, s);
    CHECK(es.str().rfind("n,re_a,im_a,re_b,im_b\n-2,", 0) == 0);
}

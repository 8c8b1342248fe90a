#include <doctest.h>

#include "zak/berry.hpp"
#include "zak/errors.hpp"
#include "zak/quadrature.hpp"
#include "zak/spectral.hpp"

#include <random>
#include <vector>

using namespace zak;

namespace {

const std::vector<double> kEx1{1.0};
const std::vector<double> kEx2{1.0, 0.5};
const std::vector<double> kEx3{0.3, 0.5, 1.0};

// -i <v_n | d_k u_l> from central differences of the eigenvectors.
Matrix2 fd_connection(const TwoLevelModel& m, double k, double h = 1e-6) {
    const EigenSystem lo = eigensystem(m, k - h);
    const EigenSystem hi = eigensystem(m, k + h);
    const EigenSystem mid = eigensystem(m, k);
    const Vector2 du_plus = (hi.u_plus - lo.u_plus) / (2 * h);
    const Vector2 du_minus = (hi.u_minus - lo.u_minus) / (2 * h);
    Matrix2 a;
    a(0, 0) = -kI * braket(mid.v_plus, du_plus);
    a(0, 1) = -kI * braket(mid.v_plus, du_minus);
    a(1, 0) = -kI * braket(mid.v_minus, du_plus);
    a(1, 1) = -kI * braket(mid.v_minus, du_minus);
    return a;
}

}  // namespace

TEST_CASE("berry connection closed forms") {
    const TwoLevelModel m2 = builtin_example(2, kEx2, 0.3);
    for (double k : {0.1, 2.0, 4.0}) {
        const Matrix2 a = berry_connection(m2, k);
        CHECK(std::abs(a(0, 0)) == 0.0);
        CHECK(std::abs(a(1, 1)) == 0.0);
    }
    const TwoLevelModel m1 = builtin_example(1, kEx1, 0.0);
    CHECK(std::abs(berry_connection(m1, 0.8)(0, 0) + 0.5) < 1e-15);

    for (const auto& [which, params, lam] :
         {std::tuple{1, kEx1, 0.6}, std::tuple{2, kEx2, 0.3}, std::tuple{3, kEx3, 0.4},
          std::tuple{3, kEx3, 0.8}}) {
        const TwoLevelModel m = builtin_example(which, params, lam);
        for (double k : {0.3, 1.9, 3.5, 5.5}) {
            if (std::abs(m.r(k) - lam) < 0.05) continue;
            CHECK((berry_connection(m, k) - fd_connection(m, k)).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("berry phase of example 1 matches the closed form") {
    for (double lam : {0.0, 0.2, 0.5, 0.8}) {
        const BerryResult b = berry_phase(builtin_example(1, kEx1, lam));
        const Complex want(-kPi, kPi * lam / std::sqrt(1 - lam * lam));
        CHECK(std::abs(b.gamma_plus - want) < 1e-9);
        CHECK(b.re_quantized.has_value());
        CHECK(*b.re_quantized == kPi);
    }
    // Above the critical value: gamma+ = -pi + pi lambda / sqrt(lambda^2 - 1), real.
    const BerryResult up = berry_phase(builtin_example(1, kEx1, 1.5));
    CHECK(std::abs(up.gamma_plus - Complex(-kPi + kPi * 1.5 / std::sqrt(1.25), 0)) < 1e-8);
    CHECK_FALSE(up.re_quantized.has_value());
}

TEST_CASE("berry phase properties") {
    CHECK(std::abs(berry_phase(builtin_example(2, kEx2, 0.3)).gamma_plus) < 1e-10);
    CHECK(std::abs(berry_phase(builtin_example(2, kEx2, 0.0)).gamma_minus) < 1e-10);

    const BerryResult b3 = berry_phase(builtin_example(3, kEx3, 0.0));
    CHECK(std::abs(wrap_phase(b3.gamma_plus).real()) == doctest::Approx(kPi));
    CHECK(std::abs(b3.gamma_plus.imag()) < 1e-12);

    for (double lam : {0.1, 0.25, 0.4, 0.7}) {
        const TwoLevelModel m = builtin_example(3, kEx3, lam);
        const BerryResult b = berry_phase(m);
        const Complex sum = b.gamma_plus + b.gamma_minus;
        CHECK(std::abs(wrap_phase(sum)) < 1e-8);
        if (lam < 0.5) {
            // Against the integrated diagonal connection.
            const QuadratureResult q =
                integrate([&](double k) { return berry_connection(m, k)(0, 0); }, 0.0, kTwoPi,
                          {1e-12, 0.0, 20000});
            CHECK(std::abs(q.value - b.gamma_plus) < 1e-8);
            CHECK(b.gamma_plus.imag() > 0);
        }
    }
}

TEST_CASE("sign of W flips the imaginary part") {
    ModelFunctions f;
    f.name = "pos";
    f.g = [](double) { return 0.0; };
    f.w = [](double k) { return 1.0 + 0.5 * std::cos(k); };
    f.r = [](double k) { return 2.0 + std::cos(k); };
    f.phi = [](double k) { return k + 0.2 * std::sin(k); };
    f.dphi = [](double k) { return 1.0 + 0.2 * std::cos(k); };
    f.phi_winding = 1;
    ModelFunctions g = f;
    g.w = [](double k) { return -1.0 - 0.5 * std::cos(k); };
    const Complex a = berry_phase(TwoLevelModel(f, 0.4)).gamma_plus;
    const Complex b = berry_phase(TwoLevelModel(g, 0.4)).gamma_plus;
    CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-10));
    CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-10));
}

TEST_CASE("near-critical lambda is refused") {
    CHECK_THROWS_AS(berry_phase(builtin_example(2, kEx2, 0.5004)), NearCriticalError);
    CHECK_NOTHROW(berry_phase(builtin_example(2, kEx2, 0.502)));
}

TEST_CASE("EP crossings") {
    const std::vector<double> kc = ep_crossings(builtin_example(2, kEx2, 0.75));
    REQUIRE(kc.size() == 2);
    // 1 + 0.5 cos k = 0.75
    CHECK(kc[0] == doctest::Approx(std::acos(-0.5)).epsilon(1e-12));
    CHECK(kc[1] == doctest::Approx(kTwoPi - std::acos(-0.5)).epsilon(1e-12));
    CHECK(ep_crossings(builtin_example(2, kEx2, 0.3)).empty());
}

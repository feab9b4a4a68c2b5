#include "lefschetz/oracles.hpp"
#include "lefschetz/characteristic_forms.hpp"

#include <doctest.h>

#include <cmath>

using namespace lefschetz;
using namespace lefschetz::oracles;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("torus supertrace vanishes for the identity element") {
    const auto cfg = make_torus_config(12, 0.5, /*reflection=*/false);
    CHECK(std::abs(torus_equivariant_supertrace(cfg)) < 1e-13);
}

TEST_CASE("torus supertrace under the reflection is -2i lift") {
    for (const int lift : {1, -1}) {
        const cplx v = torus_equivariant_supertrace(make_torus_config(10, 0.5, true, lift));
        CHECK(std::abs(v - cplx(0.0, -2.0 * lift)) < 1e-12);
    }
}

TEST_CASE("torus supertrace is independent of the heat time") {
    const cplx ref = torus_equivariant_supertrace(make_torus_config(16, 0.1));
    for (const double t : {0.25, 0.5, 1.0, 2.0}) {
        const cplx v = torus_equivariant_supertrace(make_torus_config(16, t));
        CHECK(std::abs(v - ref) < 1e-12);
    }
}

TEST_CASE("torus supertrace is stable under cutoff doubling") {
    const cplx a = torus_equivariant_supertrace(make_torus_config(8, 1.0));
    const cplx b = torus_equivariant_supertrace(make_torus_config(16, 1.0));
    CHECK(std::abs(a - b) < 1e-14);
}

TEST_CASE("torus config rejects a cutoff below the tail bound") {
    CHECK_THROWS_AS(make_torus_config(2, 0.05), std::domain_error);
    CHECK_NOTHROW(make_torus_config(41, 0.05));
}

TEST_CASE("symmetric-weight character values") {
    CHECK(std::abs(borel_weil_character(0, 1.234) - cplx(1.0)) < 1e-15);
    CHECK(std::abs(borel_weil_character(2, kPi / 2) - cplx(1.0)) < 1e-14);
    // k = 1: 2 cos(theta/2)
    CHECK(std::abs(borel_weil_character(1, 0.8) - cplx(2.0 * std::cos(0.4))) < 1e-14);
    // ratio form sin((k+1)theta/2)/sin(theta/2)
    const double th = 2.0;
    const cplx ratio = std::sin(2.5 * th) / std::sin(th / 2);
    CHECK(std::abs(borel_weil_character(4, th) - ratio) < 1e-13);
}

TEST_CASE("isolated-point sum reproduces the character") {
    for (int k = 0; k <= 4; ++k) {
        for (const double theta : {kPi / 3, kPi / 2, 2 * kPi / 3, 2.9}) {
            const std::vector<IsolatedPointData> pts = {
                {{1}, 0.5 * k},
                {{-1}, -0.5 * k},
            };
            const cplx mine = atiyah_bott_isolated(pts, theta);
            CHECK(std::abs(mine - borel_weil_character(k, theta)) < 1e-12);
        }
    }
}

TEST_CASE("isolated-point sum rejects degenerate rotations") {
    const std::vector<IsolatedPointData> pts = {{{2}, 0.0}};
    CHECK_THROWS_AS(atiyah_bott_isolated(pts, kPi), std::domain_error);
}

TEST_CASE("principal value of an odd singularity vanishes") {
    const auto f = [](double x) { return cplx(1.0 / x); };
    CHECK(std::abs(pv_reference(f, 0.0, 1.0, 2048)) < 1e-15);
}

TEST_CASE("principal value of exp(x)/x matches the frozen value") {
    const auto f = [](double x) { return cplx(std::exp(x) / x); };
    const cplx v = pv_reference(f, 0.0, 1.0, 2048);
    CHECK(std::abs(v - cplx(2.1145017507516)) < 1e-8);
}

TEST_CASE("minor-expansion det-half, exact square-zero block") {
    // g(x) = 1 + x^2, R entry w = e12 + e34: g(R) = (1 - w^2) I and the
    // square root is exactly 1 - e1234 * 1 (w^2 = 2 e1234, sqrt series halves it).
    EvenSeries germ;
    germ.c = {1.0, 1.0};
    FormMatrix r = make_zero_form_matrix(4, 2);
    Matrix block(2, 2);
    block << 0.0, 1.0, -1.0, 0.0;
    r.coeffs[0b0011] = block;
    r.coeffs[0b1100] = block;
    const GradedForm d = det_half_minor_oracle(germ, r);
    // w = e12 + e34 (same entry on both masks), w^2 = 2 e1234:
    // det(g) = (1 - w^2)^2 -> det^{1/2} = 1 - w^2 = 1 - 2 e1234.
    CHECK(std::abs(d.scalar_coefficient(0) - 1.0) < 1e-15);
    CHECK(std::abs(d.scalar_coefficient(0b1111) - (-2.0)) < 1e-14);
    CHECK(std::abs(d.scalar_coefficient(0b0011)) < 1e-15);
}

TEST_CASE("spin representation supertrace") {
    for (const double theta : {0.5, kPi / 2, 2.5, kPi}) {
        for (const int lift : {1, -1}) {
            const cplx v = spin_representation_supertrace(theta, lift);
            const cplx ref = cplx(0.0, -2.0 * lift) * std::sin(theta / 2);
            CHECK(std::abs(v - ref) < 1e-14);
        }
    }
}

TEST_CASE("oscillator block oracle, flat limit") {
    const double t = 0.7;
    Eigen::Vector2d x(0.4, -0.3), v(0.2, 0.5);
    const double flat = std::exp(-x.squaredNorm() / (4 * t)) / (4 * kPi * t);
    CHECK(std::abs(mehler_block_oracle(t, 0.0, x, v) - flat) < 1e-15);
    // continuity in the rotation coefficient
    CHECK(std::abs(mehler_block_oracle(t, 1e-7, x, v) - flat) < 1e-7);
}

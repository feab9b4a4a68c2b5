#include "lefschetz/fixed_point.hpp"
#include "lefschetz/oracles.hpp"
#include "lefschetz/scenes.hpp"

#include <doctest.h>

#include <cmath>

using namespace lefschetz;

namespace {

constexpr double kPi = 3.14159265358979323846;

FixedPointComponent isolated_point(const std::string& name, double theta, cplx gamma_w,
                                   int orientation) {
    FixedPointComponent c;
    c.name = name;
    c.n0 = 0;
    c.n1 = 2;
    c.gamma.mode = ChernMode::spin_tensor_w;
    c.gamma.gamma = Matrix::Constant(1, 1, gamma_w);
    MeshSample s;
    s.orientation = orientation;
    s.curvature.n0 = 0;
    s.curvature.n1 = 2;
    s.curvature.r1_blocks = {make_zero_form(0)};
    s.curvature.f_es = make_zero_form_matrix(0, 1);
    s.curvature.theta = {theta};
    c.mesh = {s};
    return c;
}

}  // namespace

TEST_CASE("component validation rejects malformed data") {
    FixedPointComponent c = isolated_point("p", 1.0, 1.0, 1);
    CHECK_NOTHROW(validate(c));

    SUBCASE("odd normal rank") {
        c.n1 = 3;
        CHECK_THROWS_AS(validate(c), std::domain_error);
    }
    SUBCASE("point component with two samples") {
        c.mesh.push_back(c.mesh[0]);
        CHECK_THROWS_AS(validate(c), std::invalid_argument);
    }
    SUBCASE("point sample with non-unit weight") {
        c.mesh[0].weight = 0.5;
        CHECK_THROWS_AS(validate(c), std::invalid_argument);
    }
    SUBCASE("nonpositive quadrature weight") {
        c.n0 = 2;  // positive-dimensional: weights are mesh measures
        c.mesh[0].weight = -1.0;
        CHECK_THROWS_AS(validate(c), std::invalid_argument);
    }
    SUBCASE("orientation flag outside {-1, +1}") {
        c.mesh[0].orientation = 0;
        CHECK_THROWS_AS(validate(c), std::invalid_argument);
    }
}

TEST_CASE("pv quadrature cancels a symmetric simple pole") {
    const int pairs = 512;
    const double h = 1.0 / pairs;
    std::vector<cplx> values;
    std::vector<std::pair<double, double>> mesh;
    for (int j = pairs - 1; j >= 0; --j) {
        const double x = -(j + 0.5) * h;
        mesh.emplace_back(x, h);
        values.emplace_back(1.0 / x);
    }
    for (int j = 0; j < pairs; ++j) {
        const double x = (j + 0.5) * h;
        mesh.emplace_back(x, h);
        values.emplace_back(1.0 / x);
    }
    const cplx v = pv_quadrature(values, mesh, {{0.0, 1.0 + h}});
    CHECK(std::abs(v) == 0.0);
}

TEST_CASE("pv quadrature rejects a pole on a node") {
    std::vector<std::pair<double, double>> mesh = {{-0.5, 0.5}, {0.5, 0.5}};
    std::vector<cplx> values = {1.0, 1.0};
    CHECK_THROWS_AS(pv_quadrature(values, mesh, {{0.5, 1.0}}), std::runtime_error);
}

TEST_CASE("pv quadrature rejects an unpaired mesh") {
    // 0.25 sits inside the pairing radius with no mirror node at -0.25.
    std::vector<std::pair<double, double>> mesh = {{0.25, 0.5}, {0.75, 0.5}};
    std::vector<cplx> values = {1.0, 1.0};
    CHECK_THROWS_AS(pv_quadrature(values, mesh, {{0.0, 0.6}}), std::runtime_error);
}

TEST_CASE("pv quadrature reduces to the plain sum without poles") {
    std::vector<std::pair<double, double>> mesh = {{0.0, 0.25}, {1.0, 0.5}, {2.0, 0.25}};
    std::vector<cplx> values = {cplx(1, 1), cplx(2, 0), cplx(0, 4)};
    const cplx v = pv_quadrature(values, mesh, {});
    CHECK(std::abs(v - (cplx(0.25, 0.25) + cplx(1.0, 0.0) + cplx(0.0, 1.0))) < 1e-15);
}

TEST_CASE("isolated point contribution against the hand value") {
    // north pole of the twisted sphere: gamma_W = e^{i(k+1)theta/2},
    // contribution gamma_W / (2 i sin(theta/2)).
    const int k = 1;
    const double theta = kPi / 2;
    const cplx gw = std::polar(1.0, 0.5 * (k + 1) * theta);
    const FixedPointComponent c = isolated_point("north", theta, gw, 1);
    const cplx v = evaluate_component(c);
    const cplx ref = gw / (cplx(0, 2) * std::sin(theta / 2));
    CHECK(std::abs(v - ref) < 1e-15);
    // k = 1, theta = pi/2: e^{i pi/2} / (2 i sin(pi/4)) = 1/sqrt(2)
    CHECK(std::abs(v - cplx(1.0 / std::sqrt(2.0))) < 1e-15);
}

TEST_CASE("two-point character sums match the representation oracle") {
    for (int k = 0; k <= 3; ++k) {
        for (const double theta : {kPi / 3, kPi / 2, 2 * kPi / 3}) {
            const auto comps = scenes::cp1_twisted_components(k, theta);
            const CharacterReport rep = evaluate_character(comps, theta);
            REQUIRE(rep.per_component.size() == 2);
            CHECK(std::abs(rep.total - oracles::borel_weil_character(k, theta)) < 1e-12);
            CHECK(std::abs((rep.per_component[0] + rep.per_component[1]) - rep.total) < 1e-15);
        }
    }
}

TEST_CASE("orientation table lookup and crossing parity") {
    OrientationTable table;
    table.region_sign = {{"plus", 1}, {"minus", -1}};
    CHECK(orientation_sign(table, "plus") == 1);
    CHECK(orientation_sign(table, "minus") == -1);
    CHECK_THROWS_AS(orientation_sign(table, "elsewhere"), std::invalid_argument);

    CHECK(sign_after_crossings(1, 0) == 1);
    CHECK(sign_after_crossings(1, 1) == -1);
    CHECK(sign_after_crossings(1, 2) == 1);
    CHECK(sign_after_crossings(-1, 3) == 1);
}

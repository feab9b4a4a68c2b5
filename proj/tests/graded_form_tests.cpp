#include "lefschetz/graded_form.hpp"
#include "lefschetz/characteristic_forms.hpp"
#include "lefschetz/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace lefschetz;

namespace {

GradedForm scalar_one_form(int fiber_rank, int index, cplx c = 1.0) {
    Matrix m(1, 1);
    m(0, 0) = c;
    return make_component(fiber_rank, 1u << index, m);
}

}  // namespace

TEST_CASE("koszul sign counts crossing pairs") {
    CHECK(koszul_sign(0b01, 0b10) == 1);
    CHECK(koszul_sign(0b10, 0b01) == -1);
    CHECK(koszul_sign(0b110, 0b001) == 1);   // two generators cross one
    CHECK(koszul_sign(0b100, 0b011) == 1);
    CHECK(koszul_sign(0b010, 0b101) == -1);  // e2 crosses e1 only
    CHECK(koszul_sign(0u, 0b111) == 1);
}

TEST_CASE("wedge anticommutes on one-forms") {
    const GradedForm e1 = scalar_one_form(2, 0);
    const GradedForm e2 = scalar_one_form(2, 1);
    const GradedForm w12 = wedge(e1, e2);
    CHECK(w12.scalar_coefficient(0b11) == cplx(1.0));
    const GradedForm w21 = wedge(e2, e1);
    CHECK(w21.scalar_coefficient(0b11) == cplx(-1.0));
    CHECK(max_abs_diff(w12, make_two_form(2, 0, 1)) == 0.0);
    // repeated generator annihilates
    CHECK(max_abs(wedge(e1, e1)) == 0.0);
}

TEST_CASE("wedge unit and scalar broadcast") {
    const GradedForm one = make_scalar_form(4, 1.0);
    Matrix m(2, 2);
    m << cplx(1, 2), cplx(0, -1), cplx(3, 0), cplx(-2, 5);
    const GradedForm a = make_component(4, 0b0110, m);
    CHECK(max_abs_diff(wedge(one, a), a) == 0.0);
    CHECK(max_abs_diff(wedge(a, one), a) == 0.0);
    const GradedForm w = make_two_form(4, 0, 3, cplx(0, 1));
    const GradedForm aw = wedge(w, a);  // scalar factor broadcasts
    CHECK(aw.coeff_dim == 2);
    CHECK(max_abs_diff(aw, wedge(a, w)) == 0.0);  // both even, disjoint masks
}

TEST_CASE("wedge rejects mismatched shapes") {
    const GradedForm a = make_scalar_form(2, 1.0);
    const GradedForm b = make_scalar_form(4, 1.0);
    CHECK_THROWS_AS(wedge(a, b), std::invalid_argument);
    Matrix m2 = Matrix::Identity(2, 2), m3 = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(wedge(make_component(2, 0, m2), make_component(2, 0, m3)),
                    std::invalid_argument);
}

TEST_CASE("exp_even of zero and degree-0 forms") {
    const GradedForm z = make_zero_form(4, 2);
    const GradedForm ez = exp_even(z);
    CHECK(max_abs_diff(ez, make_identity_form(4, 2)) == 0.0);

    const cplx c(0.3, -1.1);
    const GradedForm ec = exp_even(make_scalar_form(2, c));
    CHECK(std::abs(ec.scalar_coefficient(0) - std::exp(c)) < 1e-15);
}

TEST_CASE("exp_even of a scalar two-form sums the finite series") {
    // w = e12 + e34 on rank 4: w^2 = 2 e1234, w^3 = 0.
    GradedForm w = add(make_two_form(4, 0, 1), make_two_form(4, 2, 3));
    const GradedForm e = exp_even(w);
    CHECK(std::abs(e.scalar_coefficient(0) - 1.0) < 1e-15);
    CHECK(std::abs(e.scalar_coefficient(0b0011) - 1.0) < 1e-15);
    CHECK(std::abs(e.scalar_coefficient(0b1100) - 1.0) < 1e-15);
    CHECK(std::abs(e.scalar_coefficient(0b1111) - 1.0) < 1e-15);  // 2 e1234 / 2!
}

TEST_CASE("exp_even rejects odd input") {
    GradedForm a = make_scalar_form(2, 1.0);
    a = add(a, scalar_one_form(2, 0));
    CHECK_THROWS_AS(exp_even(a), std::domain_error);
}

TEST_CASE("supertrace needs a grading and signs the minus block") {
    GradedForm g = make_identity_form(2, 2);
    CHECK_THROWS_AS(supertrace(g), std::invalid_argument);

    g.d_plus = 1;  // splitting 1 + 1: str(I) = 0
    CHECK(max_abs(supertrace(g)) == 0.0);

    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    GradedForm p = make_component(2, 0, m);
    p.d_plus = 1;
    CHECK(supertrace(p).scalar_coefficient(0) == cplx(1.0));
    m(0, 0) = 0.0;
    m(1, 1) = 1.0;
    GradedForm q = make_component(2, 0, m);
    q.d_plus = 1;
    CHECK(supertrace(q).scalar_coefficient(0) == cplx(-1.0));
}

TEST_CASE("top component pairs with the orientation") {
    const cplx c(3.0, 2.0);
    GradedForm a = add(make_scalar_form(2, 1.0), make_two_form(2, 0, 1, c));
    const GradedForm sq = wedge(a, a);  // (1 + w)^2 = 1 + 2w
    CHECK(top_component_scalar(sq) == 2.0 * c);
    CHECK(top_component_scalar(sq, -1) == -2.0 * c);
    CHECK(top_component_scalar(make_scalar_form(2, 5.0)) == cplx(0.0));
}

TEST_CASE("inverse_scalar is the finite geometric series") {
    GradedForm a = make_scalar_form(4, cplx(2.0, 0.0));
    a = add(a, make_two_form(4, 0, 1, cplx(0.5, -0.25)));
    a = add(a, make_two_form(4, 2, 3, cplx(-1.0, 0.1)));
    const GradedForm inv = inverse_scalar(a);
    CHECK(max_abs_diff(wedge(a, inv), make_scalar_form(4, 1.0)) < 1e-14);
    CHECK(max_abs_diff(wedge(inv, a), make_scalar_form(4, 1.0)) < 1e-14);

    CHECK_THROWS_AS(inverse_scalar(make_two_form(4, 0, 1)), std::domain_error);
}

TEST_CASE("analytic det-half of zero curvature is one") {
    const FormMatrix r = make_zero_form_matrix(4, 3);
    const GradedForm d = analytic_det_half(a_hat_germ(4), r);
    CHECK(max_abs_diff(d, make_scalar_form(4, 1.0)) == 0.0);
}

TEST_CASE("analytic det-half, single block with square-zero entry") {
    // R = [[0, w], [-w, 0]], w = e12 on rank 2: R^2 = 0, so det-half = 1.
    FormMatrix r = make_zero_form_matrix(2, 2);
    Matrix block(2, 2);
    block << 0.0, 1.0, -1.0, 0.0;
    r.coeffs[0b11] = block;
    const GradedForm d = analytic_det_half(a_hat_germ(4), r);
    CHECK(max_abs_diff(d, make_scalar_form(2, 1.0)) < 1e-16);
}

TEST_CASE("analytic det-half, coupled block against the hand value") {
    // Entry w = a e12 + b e34 on rank 4: R^2 = -(2ab e1234) I and
    // det^{1/2}(g(R)) = 1 - 2ab g1 e1234 with g1 = -1/24 for the A-hat germ.
    const double a = 0.7, b = -1.3;
    FormMatrix r = make_zero_form_matrix(4, 2);
    Matrix block(2, 2);
    block << 0.0, 1.0, -1.0, 0.0;
    r.coeffs[0b0011] = a * block;
    r.coeffs[0b1100] = b * block;
    const GradedForm d = analytic_det_half(a_hat_germ(4), r);
    CHECK(std::abs(d.scalar_coefficient(0) - 1.0) < 1e-15);
    CHECK(std::abs(d.scalar_coefficient(0b1111) - a * b / 12.0) < 1e-15);
}

TEST_CASE("analytic det-half matches the minor-expansion oracle") {
    // Generic antisymmetric 4 x 4 with two-form entries on rank 6.
    FormMatrix r = make_zero_form_matrix(6, 4);
    auto put = [&r](unsigned mask, int i, int j, double v) {
        Matrix m = r.coefficient(mask);
        m(i, j) += v;
        m(j, i) -= v;
        r.coeffs[mask] = m;
    };
    put(0b000011, 0, 1, 0.8);
    put(0b001100, 2, 3, -0.6);
    put(0b110000, 0, 2, 0.5);
    put(0b000011, 1, 3, 0.4);
    put(0b001100, 0, 3, -0.3);
    const EvenSeries germ = a_hat_germ(4);
    const GradedForm mine = analytic_det_half(germ, r);
    const GradedForm ref = oracles::det_half_minor_oracle(germ, r);
    CHECK(max_abs_diff(mine, ref) < 1e-13);
}

TEST_CASE("analytic det-half rejects bad branch or shape") {
    const FormMatrix r = make_zero_form_matrix(2, 2);
    EvenSeries germ;
    germ.c = {-1.0, 0.5};
    CHECK_THROWS_AS(analytic_det_half(germ, r), std::domain_error);

    FormMatrix bad = make_zero_form_matrix(2, 2);
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;  // not antisymmetric
    bad.coeffs[0b11] = m;
    CHECK_THROWS_AS(analytic_det_half(a_hat_germ(3), bad), std::invalid_argument);
}

TEST_CASE("supercommutator supertrace vanishes") {
    Matrix ma(2, 2), mb(2, 2);
    ma << cplx(0.4, 0.1), cplx(1.0, -0.3), cplx(-0.7, 0.2), cplx(0.9, 0.0);
    mb << cplx(-0.2, 0.5), cplx(0.3, 0.3), cplx(1.1, -0.1), cplx(0.0, 0.8);
    GradedForm a = add(make_component(4, 0, ma), make_component(4, 0b0011, mb));
    GradedForm b = add(make_component(4, 0b1100, mb), make_component(4, 0, ma.adjoint()));
    a.d_plus = 1;
    b.d_plus = 1;
    const GradedForm br = supercommutator(a, b);
    CHECK(max_abs(supertrace(br)) < 1e-14);
}

TEST_CASE("form matrix round trip and entry access") {
    FormMatrix m = make_zero_form_matrix(2, 2);
    Matrix c0(2, 2), c3(2, 2);
    c0 << 1.0, cplx(0, 2), 3.0, 4.0;
    c3 << 0.0, 1.5, -1.5, 0.0;
    m.coeffs[0] = c0;
    m.coeffs[0b11] = c3;
    const FormMatrix back = FormMatrix::from_graded(m.to_graded());
    CHECK((back.coefficient(0) - c0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.coefficient(0b11) - c3).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.entry(0, 1).scalar_coefficient(0b11) == cplx(1.5));
    CHECK(m.is_antisymmetric() == false);
}

TEST_CASE("power series in a nilpotent scalar form") {
    // f(w) = 1 + 2w + 3w^2 at w = e12 + e34: w^2 = 2 e1234.
    GradedForm w = add(make_two_form(4, 0, 1), make_two_form(4, 2, 3));
    const GradedForm f = power_series_scalar({1.0, 2.0, 3.0}, w);
    CHECK(std::abs(f.scalar_coefficient(0) - 1.0) < 1e-15);
    CHECK(std::abs(f.scalar_coefficient(0b0011) - 2.0) < 1e-15);
    CHECK(std::abs(f.scalar_coefficient(0b1111) - 6.0) < 1e-15);
}

TEST_CASE("validate rejects malformed forms") {
    GradedForm g = make_scalar_form(2, 1.0);
    g.fiber_rank = kMaxFiberRank + 1;
    CHECK_THROWS_AS(validate(g), std::invalid_argument);

    GradedForm h = make_scalar_form(2, 1.0);
    h.coeffs[0b100] = Matrix::Identity(1, 1);  // mask outside rank-2 algebra
    CHECK_THROWS_AS(validate(h), std::invalid_argument);

    GradedForm k = make_identity_form(2, 3);
    k.d_plus = 4;  // grading exceeds coeff_dim
    CHECK_THROWS_AS(validate(k), std::invalid_argument);
}

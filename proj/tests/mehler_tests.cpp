#include "lefschetz/mehler.hpp"
#include "lefschetz/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace lefschetz;

namespace {

constexpr double kPi = 3.14159265358979323846;

RescaledModelData one_block(double omega, double f00 = 0.0) {
    RescaledModelData d;
    d.r = Eigen::MatrixXd::Zero(2, 2);
    d.r(0, 1) = omega;
    d.r(1, 0) = -omega;
    d.f = Eigen::MatrixXd::Constant(1, 1, f00);
    return d;
}

}  // namespace

TEST_CASE("kernel rejects bad heat times") {
    const RescaledModelData d = one_block(0.8);
    const Eigen::VectorXd x = Eigen::Vector2d(0.1, 0.2), v = Eigen::Vector2d(0.0, 0.0);
    CHECK_THROWS_AS(mehler_kernel(0.0, x, v, d), std::domain_error);
    CHECK_THROWS_AS(mehler_kernel(-1.0, x, v, d), std::domain_error);
    // t |spec R| = 8 * 0.8 >= 2 pi: first kernel singularity crossed
    CHECK_THROWS_AS(mehler_kernel(8.0, x, v, d), std::range_error);
    CHECK_NOTHROW(mehler_kernel(7.0, x, v, d));
}

TEST_CASE("kernel data validation") {
    RescaledModelData d = one_block(0.5);
    d.r(0, 1) = 0.4;  // no longer antisymmetric
    CHECK_THROWS_AS(validate(d), std::invalid_argument);
    d = one_block(0.5);
    d.f = Eigen::MatrixXd::Zero(2, 2);
    d.f(0, 1) = 1.0;  // not symmetric
    CHECK_THROWS_AS(validate(d), std::invalid_argument);
}

TEST_CASE("kernel matches the scalar block oracle") {
    const double omega = 0.8;
    const RescaledModelData d = one_block(omega);
    for (const double t : {0.1, 0.5, 1.0}) {
        for (const double s : {-0.6, 0.3}) {
            const Eigen::Vector2d x(0.4 * s, -0.2), v(0.3, 0.1 * s);
            const Eigen::MatrixXd k = mehler_kernel(t, x, v, d);
            REQUIRE(k.rows() == 1);
            const double ref = oracles::mehler_block_oracle(t, omega, x, v);
            CHECK(std::abs(k(0, 0) - ref) < 1e-12 * std::abs(ref));
        }
    }
}

TEST_CASE("kernel with a potential scales by exp(-tF)") {
    const double f00 = 0.25, t = 0.6;
    const Eigen::Vector2d x(0.2, 0.1), v(0.0, 0.3);
    const Eigen::MatrixXd bare = mehler_kernel(t, x, v, one_block(0.5));
    const Eigen::MatrixXd damped = mehler_kernel(t, x, v, one_block(0.5, f00));
    CHECK(std::abs(damped(0, 0) - bare(0, 0) * std::exp(-t * f00)) < 1e-14);
}

TEST_CASE("zeroth rescaled coefficient is the cross-term exponential") {
    const RescaledModelData d = one_block(1.1);
    const Eigen::Vector2d x(0.3, -0.2), v(0.5, 0.4);
    const double cross = 0.25 * x.transpose() * d.r * v;
    CHECK(std::abs(theta0_limit(x, v, d.r) - std::exp(cross)) < 1e-15);
    // synchronous small-time limit of the full kernel
    const double t0 = 1e-3;
    const Eigen::Vector2d xs(0.05, -0.04);
    const double k = mehler_kernel(t0, xs, v, d)(0, 0);
    const double ratio = k * 4 * kPi * t0 * std::exp(xs.squaredNorm() / (4 * t0));
    CHECK(std::abs(ratio - theta0_limit(xs, v, d.r)) < 1e-6);
}

TEST_CASE("closed-form kernel solves its heat equation") {
    RescaledModelData d;
    d.r = Eigen::MatrixXd::Zero(4, 4);
    d.r(0, 1) = 0.8;
    d.r(1, 0) = -0.8;
    d.r(2, 3) = -0.5;
    d.r(3, 2) = 0.5;
    d.r(0, 2) = 0.3;
    d.r(2, 0) = -0.3;
    d.f = Eigen::MatrixXd::Zero(2, 2);
    d.f(0, 0) = 0.4;
    d.f(1, 1) = -0.1;
    d.f(0, 1) = d.f(1, 0) = 0.15;
    const auto grid = default_sample_grid(4);
    for (const double t : {0.3, 0.6}) {
        const double coarse = heat_residual(t, 0.02, d, grid);
        const double fine = heat_residual(t, 0.01, d, grid);
        // a kernel that fails the equation gives an O(1) h-independent residual
        CHECK(coarse < 2e-2);
        // second-order stencil: halving h divides the residual by about 4
        CHECK(coarse / fine > 3.2);
        CHECK(coarse / fine < 4.8);
    }
}

TEST_CASE("polynomial sections evaluate and differentiate exactly") {
    const int n = 2;
    PolyGaussianSection s = make_constant_section(n, Matrix::Identity(1, 1));
    s.gaussian = 0.25 * Eigen::MatrixXd::Identity(n, n);
    add_monomial(s, {1, 0, 0, 0}, cplx(0.7, 0.0));   // x1
    add_monomial(s, {0, 1, 0, 1}, cplx(0.0, 0.3));   // x2 v2
    add_monomial(s, {2, 0, 1, 0}, cplx(-0.4, 0.1));  // x1^2 v1

    RescaledModelData d = one_block(0.9, 0.35);

    const PolyGaussianSection out = apply_rescaled_laplacian(s, d);

    const Eigen::Vector2d x(0.3, -0.45), v(0.2, 0.6);
    const double h = 1e-3;
    Matrix fd = Matrix::Zero(1, 1);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const Matrix d2 = (evaluate(s, xp, v) - 2.0 * evaluate(s, x, v) + evaluate(s, xm, v)) /
                          (h * h);
        const Matrix d1 = (evaluate(s, xp, v) - evaluate(s, xm, v)) / (2.0 * h);
        const double a = 0.25 * (d.r.row(i) * (x + v))(0);
        fd -= d2 - 2.0 * a * d1 + a * a * evaluate(s, x, v);
    }
    fd += d.f(0, 0) * evaluate(s, x, v);

    const Matrix exact = evaluate(out, x, v);
    CHECK((exact - fd).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("laplacian rejects sections past the degree cap") {
    PolyGaussianSection s = make_constant_section(2, Matrix::Identity(1, 1), 2);
    add_monomial(s, {2, 0, 0, 0}, 1.0);  // degree already at the cap
    const RescaledModelData d = one_block(0.9);
    CHECK_THROWS_AS(apply_rescaled_laplacian(s, d), std::runtime_error);
}

TEST_CASE("fiber integral, closed form against quadrature") {
    for (const double theta : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
        for (const double tw : {0.0, 0.1, 0.5}) {
            const double t = 0.5, omega = tw / t;
            const double closed =
                fiber_gaussian_integral(theta, omega, t, FiberIntegralMode::closed_form);
            const double numeric =
                fiber_gaussian_integral(theta, omega, t, FiberIntegralMode::numeric);
            CHECK(std::abs(closed - numeric) < 1e-8 * std::abs(closed));
        }
    }
}

TEST_CASE("fiber integral rejects a non-contracting exponent") {
    // theta = pi/4, t omega = 3: sin((theta - t omega)/2) < 0 makes eta <= 0.
    CHECK_THROWS_AS(fiber_gaussian_integral(kPi / 4, 6.0, 0.5, FiberIntegralMode::closed_form),
                    std::domain_error);
    CHECK_THROWS_AS(fiber_gaussian_integral(0.0, 0.0, 0.5, FiberIntegralMode::closed_form),
                    std::domain_error);
}

TEST_CASE("exponent pieces sum to the closed product form") {
    const Eigen::Vector2d v(0.7, -0.3);
    for (const double theta : {0.4, kPi / 2, 2.8}) {
        for (const double omega : {-1.2, 0.35, 0.7}) {
            const ExponentPieces p = exponent_pieces(theta, omega, v);
            CHECK(std::abs(p.piece1 + p.piece2 - p.closed_sum) < 1e-12);
        }
    }
}

TEST_CASE("exponent pieces are continuous through zero rotation") {
    const Eigen::Vector2d v(0.7, -0.3);
    const ExponentPieces at0 = exponent_pieces(1.1, 0.0, v);
    const ExponentPieces near0 = exponent_pieces(1.1, 1e-9, v);
    CHECK(std::abs(at0.closed_sum - near0.closed_sum) < 1e-8);
    // omega -> 0: piece2 -> -sin^2(theta/2) |v|^2
    const double ref = -std::sin(0.55) * std::sin(0.55) * v.squaredNorm();
    CHECK(std::abs(at0.piece2 - ref) < 1e-12);
}

TEST_CASE("symbolic kernel, rank-two fiber hand check") {
    // Nilpotent curvature w e12 in R: K = flat * (1 + (w/4)(x1 v2 - x2 v1) e12).
    const double t = 0.7, w = 1.3;
    const Eigen::Vector2d x(0.4, -0.1), v(0.25, 0.5);
    FormMatrix r = make_zero_form_matrix(2, 2);
    Matrix block(2, 2);
    block << 0.0, w, -w, 0.0;
    r.coeffs[0b11] = block;
    const FormMatrix f = make_zero_form_matrix(2, 1);

    const GradedForm k = mehler_kernel_symbolic(t, x, v, r, f);
    const double flat = std::exp(-x.squaredNorm() / (4 * t)) / (4 * kPi * t);
    const double cross = 0.25 * w * (x(0) * v(1) - x(1) * v(0));
    CHECK(std::abs(k.scalar_coefficient(0) - flat) < 1e-15);
    CHECK(std::abs(k.scalar_coefficient(0b11) - flat * cross) < 1e-15);

    // Independent cross-check: the e12 coefficient is dK/dw of the numeric
    // kernel with scalar rotation coefficient w, evaluated at w = 0.
    const double eps = 1e-4;
    const auto at = [&](double wv) {
        return mehler_kernel(t, x, v, one_block(wv))(0, 0);
    };
    const double fd = (at(eps) - at(-eps)) / (2 * eps);
    CHECK(std::abs(k.scalar_coefficient(0b11).real() - w * fd) < 1e-6);
}

TEST_CASE("symbolic kernel reduces to the scalar kernel at zero curvature") {
    const double t = 0.4;
    const Eigen::Vector2d x(0.3, 0.2), v(-0.1, 0.6);
    const FormMatrix r = make_zero_form_matrix(2, 2);
    FormMatrix f = make_zero_form_matrix(2, 2);
    Matrix f0(2, 2);
    f0 << 0.5, 0.1, 0.1, -0.2;
    f.coeffs[0] = f0;

    RescaledModelData d;
    d.r = Eigen::MatrixXd::Zero(2, 2);
    d.f = f0.real();
    const GradedForm sym = mehler_kernel_symbolic(t, x, v, r, f);
    const Eigen::MatrixXd num = mehler_kernel(t, x, v, d);
    CHECK((sym.coefficient(0) - num.cast<cplx>()).cwiseAbs().maxCoeff() < 1e-13);
}

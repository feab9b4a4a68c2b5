#pragma once

#include "lefschetz/characteristic_forms.hpp"

#include <map>
#include <vector>

namespace lefschetz {

/** Numeric data of the rescaled fiberwise model: an antisymmetric curvature
 *  coefficient matrix R and a symmetric twisting potential F acting on the
 *  amplitude space.
 */
struct RescaledModelData {
    Eigen::MatrixXd r;  // n x n antisymmetric
    Eigen::MatrixXd f;  // d x d symmetric
};

void validate(const RescaledModelData& data);

/** Twisted oscillator heat kernel
 *    (4 pi t)^{-n/2} det^{1/2}((tR/2)/sinh(tR/2))
 *      exp(-(1/4t) <X|(tR/2)coth(tR/2)|X> + (1/4) <X|R|V>) exp(-tF).
 *  Throws std::range_error when |t| spec(R) >= 2 pi (kernel singularity)
 *  and std::domain_error for t <= 0.
 */
Eigen::MatrixXd mehler_kernel(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                              const RescaledModelData& data);

/// The zeroth rescaled coefficient: exp(<X|R|V>/4).
double theta0_limit(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                    const Eigen::MatrixXd& r);

/** Polynomial-times-Gaussian section in variables (X, V): matrix-valued
 *  polynomial coefficients keyed by exponent vectors (length 2n) against a
 *  fixed Gaussian factor exp(-X^T Q X) with Q symmetric positive
 *  semidefinite.
 */
struct PolyGaussianSection {
    int n = 0;
    int amp_dim = 1;
    int degree_cap = 16;
    Eigen::MatrixXd gaussian;  // n x n
    std::map<std::vector<int>, Matrix> poly;
};

void validate(const PolyGaussianSection& s);
PolyGaussianSection make_constant_section(int n, const Matrix& amplitude, int degree_cap = 16);
void add_monomial(PolyGaussianSection& s, const std::vector<int>& exponents, cplx coeff);
Matrix evaluate(const PolyGaussianSection& s, const Eigen::VectorXd& x,
                const Eigen::VectorXd& v);

/** Exact symbolic application of the rescaled operator
 *    -sum_i (d/dX_i - (1/4) sum_j R_ij (X_j + V_j))^2 + F
 *  to a polynomial-Gaussian section. Throws std::runtime_error on degree
 *  overflow past the section cap.
 */
PolyGaussianSection apply_rescaled_laplacian(const PolyGaussianSection& s,
                                             const RescaledModelData& data);

/** Relative heat-equation residual max_k |(d/dt + Laplacian) K|/|K| of the
 *  closed-form kernel over a sample grid, via second-order central
 *  differences (spatial step h, time step h t).
 */
double heat_residual(double t, double h, const RescaledModelData& data,
                     const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& samples);

std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> default_sample_grid(int n);

enum class FiberIntegralMode { closed_form, numeric };

/** Gaussian fiber integral over one normal two-plane. The closed form is
 *  (pi t)/eta with eta = ((t omega/2)/sin(t omega/2)) sin(theta/2)
 *  sin((theta - t omega)/2); numeric mode assembles the exponent from the
 *  rotation and curvature matrices and integrates by scaled tensor
 *  Gauss-Hermite quadrature. Throws std::domain_error when eta <= 0.
 */
double fiber_gaussian_integral(double theta, double omega, double t,
                               FiberIntegralMode mode, int nodes = 48);

struct ExponentPieces {
    double piece1 = 0.0;      // rotation-curvature cross term
    double piece2 = 0.0;      // quadratic displacement term
    double closed_sum = 0.0;  // -(omega/2)(sin(theta/2)/sin(omega/2)) sin((theta-omega)/2)|V|^2
};

/** The two V-exponent contributions at t = 1 and their closed-form sum:
 *  piece1 = (omega/2) sin(theta/2) cos(theta/2) |V|^2,
 *  piece2 = -(omega/2) cot(omega/2) sin^2(theta/2) |V|^2.
 */
ExponentPieces exponent_pieces(double theta, double omega, const Eigen::Vector2d& v);

/** Symbolic twisted oscillator kernel with nilpotent curvature entries:
 *  the same closed form evaluated in the even-form algebra.
 */
GradedForm mehler_kernel_symbolic(double t, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& v, const FormMatrix& r,
                                  const FormMatrix& f);

}  // namespace lefschetz

#pragma once

#include "lefschetz/graded_form.hpp"

#include <functional>

namespace lefschetz::oracles {

/** Fourier-lattice computation of the equivariant heat supertrace on the
 *  flat two-torus with the periodic-periodic spin structure. The group
 *  element is either the identity or the point reflection x -> -x, whose
 *  spin lift carries a sign ambiguity exposed as lift_sign.
 */
struct TorusSpectralConfig {
    int cutoff = 8;      // modes |k_i| <= cutoff
    double t = 1.0;      // heat time
    bool reflection = true;
    int lift_sign = 1;   // choice of spin lift of the reflection
};

/// Validates the tail bound exp(-4 pi^2 t K^2) < 1e-14 (throws otherwise).
TorusSpectralConfig make_torus_config(int cutoff, double t, bool reflection = true,
                                      int lift_sign = 1);

cplx torus_equivariant_supertrace(const TorusSpectralConfig& cfg);

/** Character of the (k+1)-dimensional irreducible representation in the
 *  symmetric-weight convention: sum_{j=0}^{k} e^{i (j - k/2) theta}.
 */
cplx borel_weil_character(int k, double theta);

/** One isolated fixed point of a circle action: integer rotation weights on
 *  the tangent planes and a (possibly half-integer) fiber weight.
 */
struct IsolatedPointData {
    std::vector<int> tangent_weights;
    double fiber_weight = 0.0;
};

/** Classical isolated-fixed-point character sum:
 *  sum_p e^{i w_p theta} / prod_j (1 - e^{-i a_{p,j} theta}).
 *  Throws std::domain_error when any rotation degenerates (a theta = 0 mod 2 pi).
 */
cplx atiyah_bott_isolated(const std::vector<IsolatedPointData>& points, double theta);

/** Principal value of f over [pole - half_width, pole + half_width] by
 *  midpoint mirror-pair summation: h sum_j (f(pole + x_j) + f(pole - x_j)).
 */
cplx pv_reference(const std::function<cplx(double)>& f, double pole, double half_width,
                  int pairs);

/** Brute-force det^{1/2}(g(R)): Leibniz expansion of the determinant over
 *  permutations in the commutative even-form algebra, then the binomial
 *  square-root series. Independent of the exp-trace-log route.
 */
GradedForm det_half_minor_oracle(const EvenSeries& germ, const FormMatrix& r);

/** Independently assembled classical integrand
 *  (2 pi i)^{-n/2} det^{1/2}((R/2)/sinh(R/2)) tr(gamma exp(-F)) using the
 *  minor-expansion determinant and an inline nilpotent exponential.
 */
GradedForm classical_integrand_oracle(const FormMatrix& r0, const FormMatrix& f,
                                      const Matrix& gamma, int d_plus = -1);

/** Top Clifford-degree coefficient of the spin lift of a rotation by theta,
 *  computed in the explicit two-dimensional spin representation (matrix
 *  exponential in the Clifford algebra, then basis decomposition).
 */
double spin_representation_top(double theta, int lift_sign);

/// Supertrace of the two-dimensional spin lift (matrix computation).
cplx spin_representation_supertrace(double theta, int lift_sign);

/** Independent per-block closed form of the twisted oscillator kernel on a
 *  single two-plane with rotation coefficient omega, evaluated with scalar
 *  trigonometry only.
 */
double mehler_block_oracle(double t, double omega, const Eigen::Vector2d& x,
                           const Eigen::Vector2d& v);

}  // namespace lefschetz::oracles

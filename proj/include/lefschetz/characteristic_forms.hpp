#pragma once

#include "lefschetz/graded_form.hpp"

namespace lefschetz {

/** Even power-series utilities (coefficients of x^{2k}). */
EvenSeries even_series_one(int terms);
/// sinh(x/2) / (x/2)
EvenSeries sinhc_half_series(int terms);
/// cosh(x/2)
EvenSeries cosh_half_series(int terms);
/// A / B termwise, requires B(0) != 0.
EvenSeries even_series_div(const EvenSeries& a, const EvenSeries& b, int terms);
/// Germ (x/2)/sinh(x/2) of the A-hat form.
EvenSeries a_hat_germ(int terms);
/// (x/2) coth(x/2)
EvenSeries xcoth_half_series(int terms);

/** A-hat form of an antisymmetric curvature matrix:
 *  det^{1/2}( (R/2)/sinh(R/2) ) evaluated in the nilpotent algebra.
 */
GradedForm a_hat(const FormMatrix& r0);

/** tr(gamma exp(-F)) as a scalar form; with d_plus >= 0 the trace is the
 *  supertrace for the splitting coeff_dim = d_plus + d_minus.
 */
GradedForm twisted_chern(const Matrix& gamma, const FormMatrix& f, int d_plus = -1);

/** Product over the normal two-planes of the expansion of
 *  2 sin((theta_a - t omega_a)/2) in the nilpotent curvature omega_a.
 *  Requires theta_a in (0, pi]; the degree-0 part is then positive.
 */
GradedForm det_half_denominator(const std::vector<double>& theta,
                                const std::vector<GradedForm>& r1_blocks,
                                double t_scale, int fiber_rank);

/** How the group-element action on the twisting data enters the localized
 *  Chern character.
 */
enum class ChernMode {
    /// E = S tensor W: gamma is the action on W and F the curvature of W.
    spin_tensor_w,
    /// gamma is the top normal-degree component of the full action in a
    /// chosen spin frame; the spin-bundle contribution is divided out.
    raw_top_component,
};

struct GammaActionData {
    ChernMode mode = ChernMode::spin_tensor_w;
    Matrix gamma;      // action data on the coefficient space
    int d_plus = -1;   // optional grading of the twisting space
};

/** Localized relative Chern character of the twisting data at a fixed-point
 *  component with normal rotation angles theta. In spin_tensor_w mode this
 *  is twisted_chern(gamma, F); in raw mode
 *  2^{n1/2} tr(gamma_top exp(-F)) / prod_a 2 sin(theta_a / 2).
 */
GradedForm relative_chern_localized(const GammaActionData& gdata, const FormMatrix& f_es,
                                    const std::vector<double>& theta);

/** Top normal-degree coefficient of the spin lift of a block rotation:
 *  lift_sign * prod_a sin(theta_a / 2) relative to the frame orientation.
 */
double spin_top_coefficient(const std::vector<double>& angles, int lift_sign);

/** Curvature data of one fixed-point component: tangent curvature R0 on the
 *  component (n0 x n0, two-form entries), normal curvature blocks omega_a
 *  (scalar two-forms, one per normal plane), twisting curvature F_ES, and
 *  the normal rotation angles.
 */
struct CurvatureBlockData {
    int n0 = 0;
    int n1 = 0;
    FormMatrix r0;                      // used when n0 > 0
    std::vector<GradedForm> r1_blocks;  // n1/2 scalar even forms
    FormMatrix f_es;                    // twisting curvature (size d >= 1)
    std::vector<double> theta;          // n1/2 angles in (0, pi]
};

void validate(const CurvatureBlockData& c);

/** Full fixed-point integrand
 *    (2 pi i)^{-n0/2} i^{-n1/2} A-hat(R0) ch_loc inverse(denominator)
 *  as a scalar form on the component fiber.
 */
GradedForm assemble_integrand(const CurvatureBlockData& cdata, const GammaActionData& gdata);

}  // namespace lefschetz

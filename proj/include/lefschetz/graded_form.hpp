#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

namespace lefschetz {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

constexpr int kMaxFiberRank = 8;

/** Complexified exterior algebra on fiber_rank generators with square matrix
 *  coefficients. Components are keyed by index-subset bitmasks (bit i set
 *  means the generator e_{i+1} is present); each coefficient is a
 *  coeff_dim x coeff_dim complex matrix. An optional splitting
 *  coeff_dim = d_plus + d_minus equips the coefficient space with a
 *  Z/2-grading used by the supertrace.
 */
struct GradedForm {
    int fiber_rank = 0;
    int coeff_dim = 1;
    int d_plus = -1;  // -1: ungraded; otherwise d_plus + d_minus == coeff_dim
    std::map<unsigned, Matrix> coeffs;

    bool graded() const { return d_plus >= 0; }
    int d_minus() const { return coeff_dim - d_plus; }

    /// Coefficient of the subset `mask` (zero matrix if absent).
    Matrix coefficient(unsigned mask) const;

    /// Convenience for scalar (coeff_dim == 1) forms.
    cplx scalar_coefficient(unsigned mask) const;

    bool is_scalar() const { return coeff_dim == 1; }

    /// True when every stored component has even subset size.
    bool is_even() const;

    /// Largest subset size carrying a numerically nonzero coefficient.
    int max_degree(double eps = 0.0) const;

    /// Drop coefficients with max-abs entry <= eps.
    GradedForm& prune(double eps = 0.0);
};

GradedForm make_zero_form(int fiber_rank, int coeff_dim = 1);
GradedForm make_identity_form(int fiber_rank, int coeff_dim = 1);
GradedForm make_scalar_form(int fiber_rank, cplx value);
/// The monomial coeff * e_{i+1} ^ e_{j+1}, i < j (a scalar two-form).
GradedForm make_two_form(int fiber_rank, int i, int j, cplx coeff = 1.0);
GradedForm make_component(int fiber_rank, unsigned mask, const Matrix& coeff);

void validate(const GradedForm& a);

/// Sign of merging disjoint subsets S and T: (-1)^{#{(s,t) in SxT : s > t}}.
int koszul_sign(unsigned s_mask, unsigned t_mask);

GradedForm add(const GradedForm& a, const GradedForm& b);
GradedForm sub(const GradedForm& a, const GradedForm& b);
GradedForm scale(const GradedForm& a, cplx factor);

/** Wedge product with the Koszul sign from subset merges; coefficients
 *  compose by matrix product. Scalar (coeff_dim 1) factors broadcast against
 *  matrix ones. Throws std::invalid_argument on mismatched fiber_rank or
 *  non-composable coefficient dimensions.
 */
GradedForm wedge(const GradedForm& a, const GradedForm& b);

GradedForm wedge_pow(const GradedForm& a, int k);

/** Exponential of an even form a = a_0 + a_+ with nilpotent positive part:
 *  exp(a_0) (matrix exponential) times the finite series sum a_+^k / k!.
 *  Requires a even and the degree-0 coefficient to commute with every
 *  higher coefficient (std::domain_error otherwise).
 */
GradedForm exp_even(const GradedForm& a);

/// Componentwise plain matrix trace, as a scalar form.
GradedForm trace_form(const GradedForm& a);

/** Componentwise supertrace tr|_+ - tr|_- with respect to the coefficient
 *  grading, as a scalar form. Throws std::invalid_argument when ungraded.
 */
GradedForm supertrace(const GradedForm& a);

/** Coefficient of the full subset {1..fiber_rank} times the orientation
 *  sign (+1/-1).
 */
Matrix top_component(const GradedForm& a, int orientation = 1);
cplx top_component_scalar(const GradedForm& a, int orientation = 1);

/** Inverse of a scalar form with nonzero degree-0 part, via the finite
 *  geometric series. Throws std::domain_error when the degree-0 part
 *  vanishes.
 */
GradedForm inverse_scalar(const GradedForm& a);

/** Super bracket [a,b] = sum_{p,q} (a_p b_q - (-1)^{pq} b_q a_p) over the
 *  coefficient-parity components of a and b. Both inputs must be even-degree
 *  forms carrying the same grading; on that subalgebra the supertrace of any
 *  bracket vanishes identically.
 */
GradedForm supercommutator(const GradedForm& a, const GradedForm& b);

/// max over components of the max-abs entry of a - b (shape-checked).
double max_abs_diff(const GradedForm& a, const GradedForm& b);
double max_abs(const GradedForm& a);

/// Sum_k a[k] w^k for a scalar nilpotent-beyond-degree-0 form w.
GradedForm power_series_scalar(const std::vector<cplx>& a, const GradedForm& w);

/** Square matrix of even scalar forms (curvature-type data), stored in the
 *  same subset-keyed layout as GradedForm: coeffs[mask](i,j) is the mask
 *  component of entry (i,j).
 */
struct FormMatrix {
    int fiber_rank = 0;
    int size = 0;
    std::map<unsigned, Matrix> coeffs;

    GradedForm entry(int i, int j) const;
    /// Reinterpret as a GradedForm with coeff_dim == size.
    GradedForm to_graded() const;
    static FormMatrix from_graded(const GradedForm& g);

    Matrix coefficient(unsigned mask) const;
    bool is_antisymmetric(double eps = 1e-13) const;
};

FormMatrix make_zero_form_matrix(int fiber_rank, int size);
void validate(const FormMatrix& m);
FormMatrix add(const FormMatrix& a, const FormMatrix& b);
FormMatrix scale(const FormMatrix& a, cplx factor);
FormMatrix matmul(const FormMatrix& a, const FormMatrix& b);

/** Coefficients c[k] of an even power series g(x) = sum_k c[k] x^{2k}. */
struct EvenSeries {
    std::vector<double> c;
    double at0() const { return c.empty() ? 0.0 : c[0]; }
};

/// g(A) = sum_k c[k] A^{2k} for a FormMatrix A (finite by nilpotency).
FormMatrix even_series_apply(const EvenSeries& g, const FormMatrix& a);

/** det^{1/2}(g(R)) = exp((1/2) tr log g(R)) for an antisymmetric FormMatrix R
 *  and an even power-series germ g with g(0) > 0, evaluated in the finite
 *  nilpotent algebra. Throws std::domain_error for a non-positive branch
 *  point g(0) <= 0 and std::invalid_argument for non-antisymmetric R.
 */
GradedForm analytic_det_half(const EvenSeries& germ, const FormMatrix& r);

}  // namespace lefschetz

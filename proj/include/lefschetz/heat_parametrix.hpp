#pragma once

#include "lefschetz/graded_form.hpp"

#include <utility>
#include <vector>

namespace lefschetz {

// Radially symmetric model geometries for the formal heat-coefficient
// recursion. The fiber operator acting on radial profiles is
//   B u = -u'' - ((n-1)/r) u' + V(r) u
// with V = 0 (flat), V = c (flat_plus_potential), or an even polynomial
// profile (radial_curved).
enum class GeometryKind { flat, flat_plus_potential, radial_curved };

struct ModelGeometry {
    int n = 2;
    GeometryKind kind = GeometryKind::flat;
    double c = 0.0;                    // flat_plus_potential constant
    std::vector<double> profile;       // radial_curved: V(r) = sum profile[j] r^{2j}
    double kappa = 1.0;                // cutoff radius
    int mesh_points = 257;
};

void validate(const ModelGeometry& geom);

// Even radial polynomial: coefficients of r^{2j}.
using RadialPolynomial = std::vector<double>;

double eval_even_poly(const RadialPolynomial& p, double r);
// d/dr of an even polynomial, returned as the even polynomial p' / r.
RadialPolynomial even_poly_slope(const RadialPolynomial& p);
// The model operator B applied to an even polynomial (exact).
RadialPolynomial radial_operator_apply(const ModelGeometry& geom, const RadialPolynomial& p);

// Heat coefficients on [0, kappa]: polynomial representation plus sampled
// mesh values used for the bound-sequence estimate.
struct HeatCoefficientTable {
    ModelGeometry geometry;
    int max_index = 0;
    std::vector<RadialPolynomial> theta;  // theta[i], i = 0..max_index
    Eigen::VectorXd mesh_r;
    Eigen::MatrixXd mesh_values;          // (max_index+1) x mesh size
};

// theta_0 = 1 in the synchronous trivialization; theta_i integrates the
// transport equation r theta_i' + i theta_i = -B theta_{i-1}, which maps even
// polynomials to even polynomials and is solved exactly term by term.
HeatCoefficientTable solve_theta_recursion(const ModelGeometry& geom, int max_index);

// r theta_i' + i theta_i + B theta_{i-1}; vanishes identically for a table
// produced by solve_theta_recursion.
RadialPolynomial residual_identity(const HeatCoefficientTable& table, int i);

// Smooth bump: 1 on |x| <= 1/2, 0 on |x| >= 1, exp(-1/x) ramp between.
double beta_bump(double x);
// Spatial cutoff: 1 for r <= kappa/2, 0 for r >= kappa.
double chi_cutoff(double r, double kappa);

struct BorelData {
    std::vector<double> b;  // nondecreasing, b[i] >= 1
    double kappa = 1.0;
};

// b_i = max(2 * estimate_i, 1), nondecreasing by running max, where
// estimate_i doubles a sampled sup of mesh finite-difference derivatives of
// theta_i up to order i.
BorelData estimate_bound_sequence(const HeatCoefficientTable& table);

// q_t(r) = (4 pi t)^{-n/2} exp(-r^2 / 4t).
double gaussian_factor(int n, double t, double r);

// chi(r) q_t(r) sum_i beta(b_i t) t^i theta_i(r).
double borel_sum(const HeatCoefficientTable& table, const BorelData& bdata, double t, double r);

struct ResidualFit {
    bool floor = false;               // residual at numerical noise for all t
    double slope = 0.0;               // least-squares slope of log-residual vs log t
    std::vector<double> t_grid;
    std::vector<double> residuals;    // relative sup residual per t
};

// Sup of |d/dt K + Delta K| over the mesh restricted to r <= kappa/2, with
// the time derivative by fourth-order central differences and the spatial
// operator applied exactly on the polynomial representation; fits the decay
// exponent in t. Pass bdata with empty b to estimate bounds internally.
ResidualFit heat_residual_order(const ModelGeometry& geom, const BorelData& bdata, int max_index,
                                std::vector<double> t_grid = {});

// Least-squares fit of value(t) = sum_p a_p t^p over the given powers;
// returns the coefficient of t^0. Condition number above 1e8 -> error.
cplx asymptotic_constant_term(const std::vector<std::pair<double, cplx>>& samples,
                              const std::vector<double>& model_powers);

}  // namespace lefschetz

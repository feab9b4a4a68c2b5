#include "lefschetz/oracles.hpp"

#include "lefschetz/characteristic_forms.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace lefschetz::oracles {

namespace {

constexpr double kTwoPiSq4 = 4.0 * std::numbers::pi * std::numbers::pi;

Matrix clifford_c1() {
    Matrix c(2, 2);
    c << 0.0, 1.0, -1.0, 0.0;
    return c;
}

Matrix clifford_c2() {
    Matrix c(2, 2);
    c << 0.0, cplx(0.0, -1.0), cplx(0.0, -1.0), 0.0;
    return c;
}

Matrix spin_lift(double theta, int lift_sign) {
    if (lift_sign != 1 && lift_sign != -1)
        throw std::invalid_argument("spin lift sign must be +1 or -1");
    const Matrix gen = 0.5 * theta * (clifford_c1() * clifford_c2());
    return static_cast<double>(lift_sign) * gen.exp();
}

}  // namespace

TorusSpectralConfig make_torus_config(int cutoff, double t, bool reflection, int lift_sign) {
    if (t <= 0.0) throw std::domain_error("torus supertrace: t must be positive");
    if (cutoff < 1) throw std::invalid_argument("torus supertrace: cutoff < 1");
    if (std::exp(-kTwoPiSq4 * t * cutoff * cutoff) >= 1e-14)
        throw std::domain_error("torus supertrace: cutoff too small for the tail bound");
    TorusSpectralConfig cfg;
    cfg.cutoff = cutoff;
    cfg.t = t;
    cfg.reflection = reflection;
    cfg.lift_sign = lift_sign;
    return cfg;
}

cplx torus_equivariant_supertrace(const TorusSpectralConfig& cfg) {
    if (cfg.t <= 0.0) throw std::domain_error("torus supertrace: t must be positive");
    // Spinor action of the group element; the grading is diag(1, -1).
    const Matrix g = cfg.reflection ? Matrix(spin_lift(std::numbers::pi, cfg.lift_sign))
                                    : Matrix(Matrix::Identity(2, 2));
    const cplx str_g = g(0, 0) - g(1, 1);

    // Mode k contributes its diagonal matrix element: the group element sends
    // the mode to (-k or k), so only gamma-invariant modes survive.
    cplx total = 0.0;
    for (int k1 = -cfg.cutoff; k1 <= cfg.cutoff; ++k1) {
        for (int k2 = -cfg.cutoff; k2 <= cfg.cutoff; ++k2) {
            const bool invariant = cfg.reflection ? (k1 == -k1 && k2 == -k2) : true;
            if (!invariant) continue;
            const double lam = kTwoPiSq4 * cfg.t * (k1 * k1 + k2 * k2);
            total += str_g * std::exp(-lam);
        }
    }
    return total;
}

cplx borel_weil_character(int k, double theta) {
    if (k < 0) throw std::invalid_argument("borel_weil_character: k < 0");
    cplx acc = 0.0;
    for (int j = 0; j <= k; ++j)
        acc += std::exp(cplx(0.0, (j - 0.5 * k) * theta));
    return acc;
}

cplx atiyah_bott_isolated(const std::vector<IsolatedPointData>& points, double theta) {
    cplx total = 0.0;
    for (const auto& p : points) {
        cplx denom = 1.0;
        for (int a : p.tangent_weights) {
            const cplx factor = 1.0 - std::exp(cplx(0.0, -a * theta));
            if (std::abs(factor) < 1e-12)
                throw std::domain_error("atiyah_bott_isolated: degenerate rotation");
            denom *= factor;
        }
        total += std::exp(cplx(0.0, p.fiber_weight * theta)) / denom;
    }
    return total;
}

cplx pv_reference(const std::function<cplx(double)>& f, double pole, double half_width,
                  int pairs) {
    if (pairs < 1) throw std::invalid_argument("pv_reference: pairs < 1");
    const double h = half_width / pairs;
    cplx acc = 0.0, comp = 0.0;  // compensated summation
    for (int j = 0; j < pairs; ++j) {
        const double x = (j + 0.5) * h;
        const cplx term = h * (f(pole + x) + f(pole - x)) - comp;
        const cplx next = acc + term;
        comp = (next - acc) - term;
        acc = next;
    }
    return acc;
}

GradedForm det_half_minor_oracle(const EvenSeries& germ, const FormMatrix& r) {
    if (!r.is_antisymmetric())
        throw std::invalid_argument("det_half_minor_oracle: matrix is not antisymmetric");
    if (germ.at0() <= 0.0)
        throw std::domain_error("det_half_minor_oracle: branch point g(0) <= 0");
    const FormMatrix c = even_series_apply(germ, r);

    // Leibniz determinant over all permutations; entries are commuting even
    // scalar forms, so the product order is immaterial.
    const int m = c.size;
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    GradedForm det = make_zero_form(r.fiber_rank, 1);
    do {
        int inversions = 0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (perm[i] > perm[j]) ++inversions;
        GradedForm prod = make_scalar_form(r.fiber_rank, inversions % 2 == 0 ? 1.0 : -1.0);
        for (int i = 0; i < m; ++i) prod = wedge(prod, c.entry(i, perm[i]));
        det = add(det, prod);
    } while (std::next_permutation(perm.begin(), perm.end()));

    // sqrt(det) by the binomial series around the positive degree-0 part.
    const cplx d0 = det.scalar_coefficient(0u);
    if (d0.real() <= 0.0 || std::abs(d0.imag()) > 1e-12 * std::abs(d0))
        throw std::domain_error("det_half_minor_oracle: non-positive determinant branch");
    GradedForm n = scale(det, 1.0 / d0);
    n.coeffs.erase(0u);
    GradedForm out = make_zero_form(r.fiber_rank, 1);
    GradedForm power = make_identity_form(r.fiber_rank, 1);
    double binom = 1.0;  // C(1/2, k)
    for (int k = 0; k <= r.fiber_rank / 2 + 1; ++k) {
        if (k > 0) {
            binom *= (0.5 - (k - 1)) / k;
            power = wedge(power, n);
            power.prune(0.0);
            if (power.coeffs.empty()) break;
        }
        out = add(out, scale(power, binom));
    }
    return scale(out, std::sqrt(d0.real()));
}

GradedForm classical_integrand_oracle(const FormMatrix& r0, const FormMatrix& f,
                                      const Matrix& gamma, int d_plus) {
    const int n = r0.fiber_rank;
    const int terms = n / 4 + 2;
    const EvenSeries germ =
        even_series_div(even_series_one(terms), sinhc_half_series(terms), terms);
    const GradedForm ahat = det_half_minor_oracle(germ, r0);

    // Inline nilpotent exponential of -F (no degree-0 part expected here).
    GradedForm mf = scale(f.to_graded(), -1.0);
    const Matrix mf0 = mf.coefficient(0u);
    if (mf0.cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument("classical_integrand_oracle: F has a degree-0 part");
    GradedForm expf = make_identity_form(n, f.size);
    GradedForm power = expf;
    double fact = 1.0;
    for (int k = 1; k <= n / 2 + 1; ++k) {
        power = wedge(power, mf);
        power.prune(0.0);
        if (power.coeffs.empty()) break;
        fact *= k;
        expf = add(expf, scale(power, 1.0 / fact));
    }
    GradedForm prod = wedge(make_component(n, 0u, gamma), expf);
    GradedForm ch;
    if (d_plus >= 0) {
        prod.d_plus = d_plus;
        ch = supertrace(prod);
    } else {
        ch = trace_form(prod);
    }

    cplx norm = 1.0;
    const cplx two_pi_i(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < n / 2; ++i) norm /= two_pi_i;
    return scale(wedge(ahat, ch), norm);
}

double spin_representation_top(double theta, int lift_sign) {
    const Matrix g = spin_lift(theta, lift_sign);
    // Decompose g = alpha I + beta c1 c2 with c1 c2 = diag(-i, i).
    if (std::abs(g(0, 1)) > 1e-13 || std::abs(g(1, 0)) > 1e-13)
        throw std::runtime_error("spin_representation_top: unexpected off-diagonal part");
    const cplx beta = (g(1, 1) - g(0, 0)) / cplx(0.0, 2.0);
    if (std::abs(beta.imag()) > 1e-13)
        throw std::runtime_error("spin_representation_top: non-real top coefficient");
    return beta.real();
}

cplx spin_representation_supertrace(double theta, int lift_sign) {
    const Matrix g = spin_lift(theta, lift_sign);
    return g(0, 0) - g(1, 1);
}

double mehler_block_oracle(double t, double omega, const Eigen::Vector2d& x,
                           const Eigen::Vector2d& v) {
    if (t <= 0.0) throw std::domain_error("mehler_block_oracle: t must be positive");
    const double w = 0.5 * t * omega;
    if (std::abs(w) >= std::numbers::pi)
        throw std::domain_error("mehler_block_oracle: |t omega / 2| >= pi");
    const double sinc = std::abs(w) < 1e-8 ? 1.0 + w * w / 6.0 : w / std::sin(w);
    const double wcot = std::abs(w) < 1e-8 ? 1.0 - w * w / 3.0 : w / std::tan(w);
    const double quad = -wcot * x.squaredNorm() / (4.0 * t);
    const double cross = 0.25 * omega * (x(0) * v(1) - x(1) * v(0));
    return sinc / (4.0 * std::numbers::pi * t) * std::exp(quad + cross);
}

}  // namespace lefschetz::oracles

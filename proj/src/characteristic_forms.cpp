#include "lefschetz/characteristic_forms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lefschetz {

namespace {

void check_angles(const std::vector<double>& theta) {
    for (double t : theta)
        if (!(t > 0.0 && t <= std::numbers::pi))
            throw std::domain_error("normal rotation angle outside (0, pi]");
}

cplx int_pow(cplx base, int k) {
    cplx out = 1.0;
    for (int i = 0; i < std::abs(k); ++i) out *= base;
    return k >= 0 ? out : 1.0 / out;
}

}  // namespace

EvenSeries even_series_one(int terms) {
    EvenSeries s;
    s.c.assign(std::max(terms, 1), 0.0);
    s.c[0] = 1.0;
    return s;
}

EvenSeries sinhc_half_series(int terms) {
    EvenSeries s;
    s.c.resize(terms);
    double fourk = 1.0, fact = 1.0;  // 4^k and (2k+1)!
    for (int k = 0; k < terms; ++k) {
        if (k > 0) {
            fourk *= 4.0;
            fact *= (2.0 * k) * (2.0 * k + 1.0);
        }
        s.c[k] = 1.0 / (fourk * fact);
    }
    return s;
}

EvenSeries cosh_half_series(int terms) {
    EvenSeries s;
    s.c.resize(terms);
    double fourk = 1.0, fact = 1.0;  // 4^k and (2k)!
    for (int k = 0; k < terms; ++k) {
        if (k > 0) {
            fourk *= 4.0;
            fact *= (2.0 * k - 1.0) * (2.0 * k);
        }
        s.c[k] = 1.0 / (fourk * fact);
    }
    return s;
}

EvenSeries even_series_div(const EvenSeries& a, const EvenSeries& b, int terms) {
    if (b.c.empty() || b.c[0] == 0.0)
        throw std::domain_error("even_series_div: divisor vanishes at 0");
    EvenSeries q;
    q.c.assign(terms, 0.0);
    for (int k = 0; k < terms; ++k) {
        double acc = k < static_cast<int>(a.c.size()) ? a.c[k] : 0.0;
        for (int j = 1; j <= k; ++j) {
            const double bj = j < static_cast<int>(b.c.size()) ? b.c[j] : 0.0;
            acc -= bj * q.c[k - j];
        }
        q.c[k] = acc / b.c[0];
    }
    return q;
}

EvenSeries a_hat_germ(int terms) {
    return even_series_div(even_series_one(terms), sinhc_half_series(terms), terms);
}

EvenSeries xcoth_half_series(int terms) {
    return even_series_div(cosh_half_series(terms), sinhc_half_series(terms), terms);
}

GradedForm a_hat(const FormMatrix& r0) {
    const int terms = r0.fiber_rank / 4 + 2;
    return analytic_det_half(a_hat_germ(terms), r0);
}

GradedForm twisted_chern(const Matrix& gamma, const FormMatrix& f, int d_plus) {
    validate(f);
    if (gamma.rows() != f.size || gamma.cols() != f.size)
        throw std::invalid_argument("twisted_chern: gamma shape mismatch");
    GradedForm g = make_component(f.fiber_rank, 0u, gamma);
    GradedForm prod = wedge(g, exp_even(scale(f.to_graded(), -1.0)));
    if (d_plus >= 0) {
        prod.d_plus = d_plus;
        return supertrace(prod);
    }
    return trace_form(prod);
}

GradedForm det_half_denominator(const std::vector<double>& theta,
                                const std::vector<GradedForm>& r1_blocks,
                                double t_scale, int fiber_rank) {
    if (theta.size() != r1_blocks.size())
        throw std::invalid_argument("det_half_denominator: block count mismatch");
    check_angles(theta);

    GradedForm out = make_identity_form(fiber_rank, 1);
    const int kmax = fiber_rank / 2 + 1;
    for (std::size_t a = 0; a < theta.size(); ++a) {
        const GradedForm& w = r1_blocks[a];
        if (w.fiber_rank != fiber_rank || !w.is_scalar() || !w.is_even())
            throw std::invalid_argument("det_half_denominator: bad curvature block");
        // 2 sin((theta - t w)/2) expanded in the nilpotent w:
        //   2 sin(theta/2) cos(t w / 2) - 2 cos(theta/2) sin(t w / 2).
        std::vector<cplx> series(kmax + 1, 0.0);
        double pow_t = 1.0, fact = 1.0;
        for (int k = 0; k <= kmax; ++k) {
            if (k > 0) {
                pow_t *= t_scale / 2.0;
                fact *= k;
            }
            const double c = pow_t / fact;
            const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
            if (k % 2 == 0)
                series[k] = 2.0 * std::sin(theta[a] / 2.0) * sign * c;
            else
                series[k] = -2.0 * std::cos(theta[a] / 2.0) * sign * c;
        }
        out = wedge(out, power_series_scalar(series, w));
    }
    return out;
}

GradedForm relative_chern_localized(const GammaActionData& gdata, const FormMatrix& f_es,
                                    const std::vector<double>& theta) {
    check_angles(theta);
    if (gdata.mode == ChernMode::spin_tensor_w)
        return twisted_chern(gdata.gamma, f_es, gdata.d_plus);

    double denom = 1.0, two_pow = 1.0;
    for (double t : theta) {
        denom *= 2.0 * std::sin(t / 2.0);
        two_pow *= 2.0;
    }
    GradedForm tr = twisted_chern(gdata.gamma, f_es, gdata.d_plus);
    return scale(tr, two_pow / denom);
}

double spin_top_coefficient(const std::vector<double>& angles, int lift_sign) {
    if (lift_sign != 1 && lift_sign != -1)
        throw std::invalid_argument("spin_top_coefficient: lift sign must be +1 or -1");
    check_angles(angles);
    double out = lift_sign;
    for (double t : angles) out *= std::sin(t / 2.0);
    return out;
}

void validate(const CurvatureBlockData& c) {
    if (c.n0 < 0 || c.n1 < 0 || c.n0 % 2 != 0 || c.n1 % 2 != 0)
        throw std::domain_error("curvature data: n0 and n1 must be even and nonnegative");
    if (static_cast<int>(c.theta.size()) != c.n1 / 2)
        throw std::invalid_argument("curvature data: angle count != n1/2");
    if (c.r1_blocks.size() != c.theta.size())
        throw std::invalid_argument("curvature data: normal block count != n1/2");
    check_angles(c.theta);
    if (c.n0 > 0) {
        validate(c.r0);
        if (c.r0.size != c.n0 || c.r0.fiber_rank != c.n0)
            throw std::invalid_argument("curvature data: R0 must be n0 x n0 on the n0 fiber");
        if (!c.r0.is_antisymmetric())
            throw std::invalid_argument("curvature data: R0 is not antisymmetric");
    }
    for (const GradedForm& w : c.r1_blocks) {
        validate(w);
        if (w.fiber_rank != c.n0 || !w.is_scalar() || !w.is_even() ||
            std::abs(w.scalar_coefficient(0u)) != 0.0)
            throw std::invalid_argument(
                "curvature data: normal blocks must be scalar positive-degree even forms "
                "on the n0 fiber");
    }
    validate(c.f_es);
    if (c.f_es.fiber_rank != c.n0)
        throw std::invalid_argument("curvature data: F lives on the wrong fiber");
}

GradedForm assemble_integrand(const CurvatureBlockData& cdata, const GammaActionData& gdata) {
    validate(cdata);
    GradedForm ahat = cdata.n0 > 0 ? a_hat(cdata.r0) : make_identity_form(0, 1);
    const GradedForm ch = relative_chern_localized(gdata, cdata.f_es, cdata.theta);
    const GradedForm den =
        det_half_denominator(cdata.theta, cdata.r1_blocks, 1.0, cdata.n0);

    const cplx norm = int_pow(cplx(0.0, 2.0 * std::numbers::pi), -cdata.n0 / 2) *
                      int_pow(cplx(0.0, 1.0), -cdata.n1 / 2);
    return scale(wedge(wedge(ahat, ch), inverse_scalar(den)), norm);
}

}  // namespace lefschetz

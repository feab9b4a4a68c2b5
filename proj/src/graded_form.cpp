#include "lefschetz/graded_form.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <bit>
#include <stdexcept>

namespace lefschetz {

namespace {

int subset_degree(unsigned mask) { return std::popcount(mask); }

void check_compatible(const GradedForm& a, const GradedForm& b) {
    if (a.fiber_rank != b.fiber_rank)
        throw std::invalid_argument("graded_form: mismatched fiber_rank");
}

// Grading-block projection: part == 0 keeps the diagonal blocks, part == 1
// the off-diagonal ones, for the splitting coeff_dim = d_plus + d_minus.
Matrix parity_part(const Matrix& m, int d_plus, int part) {
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    const int d = static_cast<int>(m.rows());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const int pi = i < d_plus ? 0 : 1;
            const int pj = j < d_plus ? 0 : 1;
            if (((pi + pj) & 1) == part) out(i, j) = m(i, j);
        }
    return out;
}

}  // namespace

Matrix GradedForm::coefficient(unsigned mask) const {
    auto it = coeffs.find(mask);
    if (it != coeffs.end()) return it->second;
    return Matrix::Zero(coeff_dim, coeff_dim);
}

cplx GradedForm::scalar_coefficient(unsigned mask) const {
    if (coeff_dim != 1)
        throw std::invalid_argument("graded_form: scalar access on matrix form");
    auto it = coeffs.find(mask);
    return it == coeffs.end() ? cplx(0.0) : it->second(0, 0);
}

bool GradedForm::is_even() const {
    for (const auto& [mask, c] : coeffs)
        if (subset_degree(mask) % 2 != 0 && c.cwiseAbs().maxCoeff() > 0.0) return false;
    return true;
}

int GradedForm::max_degree(double eps) const {
    int deg = -1;
    for (const auto& [mask, c] : coeffs)
        if (c.cwiseAbs().maxCoeff() > eps) deg = std::max(deg, subset_degree(mask));
    return deg;
}

GradedForm& GradedForm::prune(double eps) {
    for (auto it = coeffs.begin(); it != coeffs.end();) {
        if (it->second.cwiseAbs().maxCoeff() <= eps)
            it = coeffs.erase(it);
        else
            ++it;
    }
    return *this;
}

GradedForm make_zero_form(int fiber_rank, int coeff_dim) {
    GradedForm g;
    g.fiber_rank = fiber_rank;
    g.coeff_dim = coeff_dim;
    validate(g);
    return g;
}

GradedForm make_identity_form(int fiber_rank, int coeff_dim) {
    GradedForm g = make_zero_form(fiber_rank, coeff_dim);
    g.coeffs[0u] = Matrix::Identity(coeff_dim, coeff_dim);
    return g;
}

GradedForm make_scalar_form(int fiber_rank, cplx value) {
    GradedForm g = make_zero_form(fiber_rank, 1);
    g.coeffs[0u] = Matrix::Constant(1, 1, value);
    return g;
}

GradedForm make_two_form(int fiber_rank, int i, int j, cplx coeff) {
    if (i < 0 || j < 0 || i >= fiber_rank || j >= fiber_rank || i == j)
        throw std::invalid_argument("make_two_form: bad generator indices");
    cplx c = coeff;
    if (i > j) {
        std::swap(i, j);
        c = -c;
    }
    GradedForm g = make_zero_form(fiber_rank, 1);
    g.coeffs[(1u << i) | (1u << j)] = Matrix::Constant(1, 1, c);
    return g;
}

GradedForm make_component(int fiber_rank, unsigned mask, const Matrix& coeff) {
    GradedForm g;
    g.fiber_rank = fiber_rank;
    g.coeff_dim = static_cast<int>(coeff.rows());
    g.coeffs[mask] = coeff;
    validate(g);
    return g;
}

void validate(const GradedForm& a) {
    if (a.fiber_rank < 0 || a.fiber_rank > kMaxFiberRank)
        throw std::invalid_argument("graded_form: fiber_rank outside [0, 8]");
    if (a.coeff_dim < 1) throw std::invalid_argument("graded_form: coeff_dim < 1");
    if (a.d_plus >= 0 && a.d_plus > a.coeff_dim)
        throw std::invalid_argument("graded_form: grading exceeds coeff_dim");
    const unsigned limit = 1u << a.fiber_rank;
    for (const auto& [mask, c] : a.coeffs) {
        if (mask >= limit)
            throw std::invalid_argument("graded_form: subset outside fiber");
        if (c.rows() != a.coeff_dim || c.cols() != a.coeff_dim)
            throw std::invalid_argument("graded_form: coefficient shape mismatch");
    }
}

int koszul_sign(unsigned s_mask, unsigned t_mask) {
    int inversions = 0;
    unsigned t = t_mask;
    while (t) {
        const int bit = std::countr_zero(t);
        inversions += std::popcount(s_mask >> (bit + 1));
        t &= t - 1;
    }
    return (inversions % 2 == 0) ? 1 : -1;
}

GradedForm add(const GradedForm& a, const GradedForm& b) {
    check_compatible(a, b);
    if (a.coeff_dim != b.coeff_dim)
        throw std::invalid_argument("graded_form add: coeff_dim mismatch");
    GradedForm out = a;
    for (const auto& [mask, c] : b.coeffs) {
        auto it = out.coeffs.find(mask);
        if (it == out.coeffs.end())
            out.coeffs[mask] = c;
        else
            it->second += c;
    }
    return out;
}

GradedForm sub(const GradedForm& a, const GradedForm& b) { return add(a, scale(b, -1.0)); }

GradedForm scale(const GradedForm& a, cplx factor) {
    GradedForm out = a;
    for (auto& [mask, c] : out.coeffs) c *= factor;
    return out;
}

GradedForm wedge(const GradedForm& a, const GradedForm& b) {
    check_compatible(a, b);
    const bool broadcast_a = a.coeff_dim == 1 && b.coeff_dim != 1;
    const bool broadcast_b = b.coeff_dim == 1 && a.coeff_dim != 1;
    if (!broadcast_a && !broadcast_b && a.coeff_dim != b.coeff_dim)
        throw std::invalid_argument("graded_form wedge: coefficients not composable");

    GradedForm out;
    out.fiber_rank = a.fiber_rank;
    out.coeff_dim = broadcast_a ? b.coeff_dim : a.coeff_dim;
    out.d_plus = broadcast_a ? b.d_plus : a.d_plus;
    for (const auto& [sa, ca] : a.coeffs) {
        for (const auto& [sb, cb] : b.coeffs) {
            if (sa & sb) continue;  // repeated generator
            const cplx sign(koszul_sign(sa, sb));
            Matrix prod;
            if (broadcast_a)
                prod = sign * ca(0, 0) * cb;
            else if (broadcast_b)
                prod = sign * cb(0, 0) * ca;
            else
                prod = sign * (ca * cb);
            const unsigned mask = sa | sb;
            auto it = out.coeffs.find(mask);
            if (it == out.coeffs.end())
                out.coeffs[mask] = prod;
            else
                it->second += prod;
        }
    }
    return out;
}

GradedForm wedge_pow(const GradedForm& a, int k) {
    if (k < 0) throw std::invalid_argument("wedge_pow: negative power");
    GradedForm out = make_identity_form(a.fiber_rank, a.coeff_dim);
    out.d_plus = a.d_plus;
    for (int i = 0; i < k; ++i) out = wedge(out, a);
    return out;
}

GradedForm exp_even(const GradedForm& a) {
    validate(a);
    if (!a.is_even()) throw std::domain_error("exp_even: odd-degree component present");

    const Matrix a0 = a.coefficient(0u);
    GradedForm rest = a;
    rest.coeffs.erase(0u);

    // The degree-0 block must commute with the nilpotent part for
    // exp(a0) * exp(rest) to equal exp(a).
    const double scale0 = std::max(1.0, a0.cwiseAbs().maxCoeff());
    for (const auto& [mask, c] : rest.coeffs) {
        const double comm = (a0 * c - c * a0).cwiseAbs().maxCoeff();
        const double ref = scale0 * std::max(1.0, c.cwiseAbs().maxCoeff());
        if (comm > 1e-12 * ref)
            throw std::domain_error("exp_even: degree-0 part does not commute with the rest");
    }

    GradedForm series = make_identity_form(a.fiber_rank, a.coeff_dim);
    series.d_plus = a.d_plus;
    GradedForm power = series;
    double factorial = 1.0;
    for (int k = 1; k <= a.fiber_rank / 2 + 1; ++k) {
        power = wedge(power, rest);
        power.prune(0.0);
        if (power.coeffs.empty()) break;
        factorial *= k;
        series = add(series, scale(power, 1.0 / factorial));
    }

    const Matrix e0 = a0.exp();
    GradedForm out = series;
    for (auto& [mask, c] : out.coeffs) c = e0 * c;
    return out;
}

GradedForm trace_form(const GradedForm& a) {
    GradedForm out = make_zero_form(a.fiber_rank, 1);
    for (const auto& [mask, c] : a.coeffs) out.coeffs[mask] = Matrix::Constant(1, 1, c.trace());
    return out;
}

GradedForm supertrace(const GradedForm& a) {
    if (!a.graded()) throw std::invalid_argument("supertrace: form carries no grading");
    GradedForm out = make_zero_form(a.fiber_rank, 1);
    for (const auto& [mask, c] : a.coeffs) {
        cplx t = 0.0;
        for (int i = 0; i < a.coeff_dim; ++i) t += (i < a.d_plus ? 1.0 : -1.0) * c(i, i);
        out.coeffs[mask] = Matrix::Constant(1, 1, t);
    }
    return out;
}

Matrix top_component(const GradedForm& a, int orientation) {
    if (orientation != 1 && orientation != -1)
        throw std::invalid_argument("top_component: orientation must be +1 or -1");
    const unsigned full = (a.fiber_rank == 0) ? 0u : ((1u << a.fiber_rank) - 1u);
    return static_cast<double>(orientation) * a.coefficient(full);
}

cplx top_component_scalar(const GradedForm& a, int orientation) {
    if (a.coeff_dim != 1)
        throw std::invalid_argument("top_component_scalar: matrix-valued form");
    return top_component(a, orientation)(0, 0);
}

GradedForm inverse_scalar(const GradedForm& a) {
    if (a.coeff_dim != 1) throw std::invalid_argument("inverse_scalar: matrix-valued form");
    const cplx a0 = a.scalar_coefficient(0u);
    if (std::abs(a0) == 0.0) throw std::domain_error("inverse_scalar: vanishing degree-0 part");
    GradedForm n = a;
    n.coeffs.erase(0u);
    // 1/(a0 + n) = (1/a0) sum_k (-n/a0)^k, a finite sum by nilpotency.
    GradedForm unit = scale(n, -1.0 / a0);
    GradedForm out = make_identity_form(a.fiber_rank, 1);
    GradedForm power = out;
    for (int k = 1; k <= a.fiber_rank / 2 + 1; ++k) {
        power = wedge(power, unit);
        power.prune(0.0);
        if (power.coeffs.empty()) break;
        out = add(out, power);
    }
    return scale(out, 1.0 / a0);
}

GradedForm supercommutator(const GradedForm& a, const GradedForm& b) {
    check_compatible(a, b);
    if (a.coeff_dim != b.coeff_dim || a.d_plus != b.d_plus)
        throw std::invalid_argument("supercommutator: mismatched coefficient spaces");
    if (!a.graded()) throw std::invalid_argument("supercommutator: ungraded coefficients");
    if (!a.is_even() || !b.is_even())
        throw std::domain_error("supercommutator: defined on even-degree forms");

    GradedForm out = make_zero_form(a.fiber_rank, a.coeff_dim);
    out.d_plus = a.d_plus;
    for (int p = 0; p < 2; ++p) {
        GradedForm ap = a;
        for (auto& [mask, c] : ap.coeffs) c = parity_part(c, a.d_plus, p);
        for (int q = 0; q < 2; ++q) {
            GradedForm bq = b;
            for (auto& [mask, c] : bq.coeffs) c = parity_part(c, b.d_plus, q);
            const double sign = (p * q) % 2 == 0 ? 1.0 : -1.0;
            out = add(out, sub(wedge(ap, bq), scale(wedge(bq, ap), sign)));
        }
    }
    return out;
}

double max_abs_diff(const GradedForm& a, const GradedForm& b) {
    check_compatible(a, b);
    if (a.coeff_dim != b.coeff_dim)
        throw std::invalid_argument("max_abs_diff: coeff_dim mismatch");
    double m = 0.0;
    for (const auto& [mask, c] : a.coeffs)
        m = std::max(m, (c - b.coefficient(mask)).cwiseAbs().maxCoeff());
    for (const auto& [mask, c] : b.coeffs)
        m = std::max(m, (c - a.coefficient(mask)).cwiseAbs().maxCoeff());
    return m;
}

double max_abs(const GradedForm& a) {
    double m = 0.0;
    for (const auto& [mask, c] : a.coeffs) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
}

GradedForm power_series_scalar(const std::vector<cplx>& a, const GradedForm& w) {
    if (w.coeff_dim != 1)
        throw std::invalid_argument("power_series_scalar: matrix-valued form");
    GradedForm out = make_zero_form(w.fiber_rank, 1);
    GradedForm power = make_identity_form(w.fiber_rank, 1);
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (k > 0) {
            power = wedge(power, w);
            power.prune(0.0);
            if (power.coeffs.empty()) break;
        }
        out = add(out, scale(power, a[k]));
    }
    return out;
}

GradedForm FormMatrix::entry(int i, int j) const {
    if (i < 0 || j < 0 || i >= size || j >= size)
        throw std::invalid_argument("form_matrix: entry index out of range");
    GradedForm g = make_zero_form(fiber_rank, 1);
    for (const auto& [mask, c] : coeffs)
        if (c(i, j) != cplx(0.0)) g.coeffs[mask] = Matrix::Constant(1, 1, c(i, j));
    return g;
}

GradedForm FormMatrix::to_graded() const {
    GradedForm g;
    g.fiber_rank = fiber_rank;
    g.coeff_dim = size;
    g.coeffs = coeffs;
    validate(g);
    return g;
}

FormMatrix FormMatrix::from_graded(const GradedForm& g) {
    FormMatrix m;
    m.fiber_rank = g.fiber_rank;
    m.size = g.coeff_dim;
    m.coeffs = g.coeffs;
    validate(m);
    return m;
}

Matrix FormMatrix::coefficient(unsigned mask) const {
    auto it = coeffs.find(mask);
    if (it != coeffs.end()) return it->second;
    return Matrix::Zero(size, size);
}

bool FormMatrix::is_antisymmetric(double eps) const {
    for (const auto& [mask, c] : coeffs)
        if ((c + c.transpose()).cwiseAbs().maxCoeff() > eps) return false;
    return true;
}

FormMatrix make_zero_form_matrix(int fiber_rank, int size) {
    FormMatrix m;
    m.fiber_rank = fiber_rank;
    m.size = size;
    validate(m);
    return m;
}

void validate(const FormMatrix& m) {
    if (m.size < 1) throw std::invalid_argument("form_matrix: size < 1");
    GradedForm g;
    g.fiber_rank = m.fiber_rank;
    g.coeff_dim = m.size;
    g.coeffs = m.coeffs;
    validate(g);
    for (const auto& [mask, c] : m.coeffs)
        if (subset_degree(mask) % 2 != 0 && c.cwiseAbs().maxCoeff() > 0.0)
            throw std::invalid_argument("form_matrix: odd-degree entry");
}

FormMatrix add(const FormMatrix& a, const FormMatrix& b) {
    return FormMatrix::from_graded(add(a.to_graded(), b.to_graded()));
}

FormMatrix scale(const FormMatrix& a, cplx factor) {
    return FormMatrix::from_graded(scale(a.to_graded(), factor));
}

FormMatrix matmul(const FormMatrix& a, const FormMatrix& b) {
    return FormMatrix::from_graded(wedge(a.to_graded(), b.to_graded()));
}

FormMatrix even_series_apply(const EvenSeries& g, const FormMatrix& a) {
    validate(a);
    GradedForm acc = make_zero_form(a.fiber_rank, a.size);
    GradedForm power = make_identity_form(a.fiber_rank, a.size);
    const GradedForm a2 = wedge(a.to_graded(), a.to_graded());
    for (std::size_t k = 0; k < g.c.size(); ++k) {
        if (k > 0) {
            power = wedge(power, a2);
            power.prune(0.0);
            if (power.coeffs.empty()) break;
        }
        acc = add(acc, scale(power, g.c[k]));
    }
    return FormMatrix::from_graded(acc);
}

GradedForm analytic_det_half(const EvenSeries& germ, const FormMatrix& r) {
    validate(r);
    if (!r.is_antisymmetric())
        throw std::invalid_argument("analytic_det_half: matrix is not antisymmetric");
    const double g0 = germ.at0();
    if (g0 <= 0.0) throw std::domain_error("analytic_det_half: branch point g(0) <= 0");

    const GradedForm c = even_series_apply(germ, r).to_graded();
    // c = g0 (I + n) with n nilpotent: tr log c = m log g0 + tr log(I + n).
    GradedForm n = scale(c, 1.0 / g0);
    n.coeffs[0u] = n.coefficient(0u) - Matrix::Identity(r.size, r.size);
    n.prune(0.0);

    GradedForm tr_log = make_zero_form(r.fiber_rank, 1);
    GradedForm power = make_identity_form(r.fiber_rank, r.size);
    for (int k = 1; k <= r.fiber_rank / 2 + 1; ++k) {
        power = wedge(power, n);
        power.prune(0.0);
        if (power.coeffs.empty()) break;
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        tr_log = add(tr_log, scale(trace_form(power), sign / k));
    }
    tr_log = add(tr_log, make_scalar_form(r.fiber_rank, r.size * std::log(g0)));
    return exp_even(scale(tr_log, 0.5));
}

}  // namespace lefschetz

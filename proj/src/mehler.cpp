#include "lefschetz/mehler.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lefschetz {

namespace {

// (y/2)/sin(y/2), the inverse sinc factor, with a series guard at 0.
double sinc_ratio(double y) {
    const double w = 0.5 * y;
    if (std::abs(w) < 1e-6) return 1.0 + w * w / 6.0 + 7.0 * w * w * w * w / 360.0;
    return w / std::sin(w);
}

// (y/2)cot(y/2) with a series guard at 0.
double cot_ratio(double y) {
    const double w = 0.5 * y;
    if (std::abs(w) < 1e-6) return 1.0 - w * w / 3.0 - w * w * w * w / 45.0;
    return w / std::tan(w);
}

// Imaginary parts of the eigenvalues of an antisymmetric matrix.
Eigen::VectorXd skew_spectrum(const Eigen::MatrixXd& s) {
    Eigen::ComplexEigenSolver<Matrix> solver(s.cast<cplx>());
    Eigen::VectorXd y(s.rows());
    for (int j = 0; j < s.rows(); ++j) y(j) = solver.eigenvalues()(j).imag();
    return y;
}

// f(S) for an antisymmetric S and an even function given on the eigenvalue
// parameter y (eigenvalue = i y); the result is real symmetric.
Eigen::MatrixXd even_matrix_function(const Eigen::MatrixXd& s, double (*f)(double)) {
    Eigen::ComplexEigenSolver<Matrix> solver(s.cast<cplx>());
    Matrix fd = Matrix::Zero(s.rows(), s.cols());
    for (int j = 0; j < s.rows(); ++j) fd(j, j) = f(solver.eigenvalues()(j).imag());
    const Matrix m = solver.eigenvectors() * fd * solver.eigenvectors().inverse();
    const Eigen::MatrixXd re = m.real();
    return 0.5 * (re + re.transpose());
}

void check_theta(double theta) {
    if (!(theta > 0.0 && theta <= std::numbers::pi))
        throw std::domain_error("rotation angle outside (0, pi]");
}

using Poly = std::map<std::vector<int>, Matrix>;

void poly_add(Poly& p, const std::vector<int>& key, const Matrix& coeff) {
    auto it = p.find(key);
    if (it == p.end())
        p[key] = coeff;
    else
        it->second += coeff;
}

Poly poly_dx(const Poly& p, int var) {
    Poly out;
    for (const auto& [key, coeff] : p) {
        if (key[var] == 0) continue;
        std::vector<int> k = key;
        const double e = k[var];
        k[var] -= 1;
        poly_add(out, k, e * coeff);
    }
    return out;
}

// Multiply by sum_j c_j * variable_j over all 2n variables.
Poly poly_mul_linear(const Poly& p, const Eigen::VectorXd& c) {
    Poly out;
    for (const auto& [key, coeff] : p) {
        for (int j = 0; j < c.size(); ++j) {
            if (c(j) == 0.0) continue;
            std::vector<int> k = key;
            k[j] += 1;
            poly_add(out, k, c(j) * coeff);
        }
    }
    return out;
}

Poly poly_axpy(Poly acc, const Poly& p, cplx factor) {
    for (const auto& [key, coeff] : p) poly_add(acc, key, factor * coeff);
    return acc;
}

int poly_degree(const Poly& p) {
    int deg = 0;
    for (const auto& [key, coeff] : p) {
        if (coeff.cwiseAbs().maxCoeff() == 0.0) continue;
        int d = 0;
        for (int e : key) d += e;
        deg = std::max(deg, d);
    }
    return deg;
}

struct GaussHermiteRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd log_weights;  // log of w_i (weight function exp(-y^2))
};

GaussHermiteRule gauss_hermite(int m) {
    if (m < 2) throw std::invalid_argument("gauss_hermite: too few nodes");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k < m; ++k) {
        const double b = std::sqrt(0.5 * k);
        j(k - 1, k) = b;
        j(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(j);
    GaussHermiteRule rule;
    rule.nodes = solver.eigenvalues();
    rule.log_weights.resize(m);
    const double log_sqrt_pi = 0.5 * std::log(std::numbers::pi);
    for (int i = 0; i < m; ++i) {
        const double v0 = solver.eigenvectors()(0, i);
        rule.log_weights(i) = log_sqrt_pi + 2.0 * std::log(std::abs(v0));
    }
    return rule;
}

}  // namespace

void validate(const RescaledModelData& data) {
    if (data.r.rows() != data.r.cols())
        throw std::invalid_argument("rescaled model: R must be square");
    if ((data.r + data.r.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, data.r.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("rescaled model: R must be antisymmetric");
    if (data.f.size() > 0) {
        if (data.f.rows() != data.f.cols())
            throw std::invalid_argument("rescaled model: F must be square");
        if ((data.f - data.f.transpose()).cwiseAbs().maxCoeff() >
            1e-12 * std::max(1.0, data.f.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("rescaled model: F must be symmetric");
    }
}

Eigen::MatrixXd mehler_kernel(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                              const RescaledModelData& data) {
    validate(data);
    if (t <= 0.0) throw std::domain_error("mehler_kernel: t must be positive");
    const int n = static_cast<int>(data.r.rows());
    if (x.size() != n || v.size() != n)
        throw std::invalid_argument("mehler_kernel: point dimension mismatch");

    const Eigen::VectorXd spec = skew_spectrum(data.r);
    if (t * spec.cwiseAbs().maxCoeff() >= 2.0 * std::numbers::pi)
        throw std::range_error("mehler_kernel: t spec(R) >= 2 pi (kernel singularity)");

    double log_det_half = 0.0;
    for (int j = 0; j < n; ++j) log_det_half += 0.5 * std::log(sinc_ratio(t * spec(j)));

    const Eigen::MatrixXd m = even_matrix_function(t * data.r, &cot_ratio);
    const double quad = x.dot(m * x) / (4.0 * t);
    const double cross = 0.25 * x.dot(data.r * v);
    const double scalar = std::pow(4.0 * std::numbers::pi * t, -0.5 * n) *
                          std::exp(log_det_half - quad + cross);

    const int d = data.f.size() > 0 ? static_cast<int>(data.f.rows()) : 1;
    Eigen::MatrixXd ampl = Eigen::MatrixXd::Identity(d, d);
    if (data.f.size() > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(data.f);
        ampl = solver.eigenvectors() *
               (-t * solver.eigenvalues().array()).exp().matrix().asDiagonal() *
               solver.eigenvectors().transpose();
    }
    return scalar * ampl;
}

double theta0_limit(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                    const Eigen::MatrixXd& r) {
    if (r.rows() != r.cols() || x.size() != r.rows() || v.size() != r.rows())
        throw std::invalid_argument("theta0_limit: dimension mismatch");
    return std::exp(0.25 * x.dot(r * v));
}

void validate(const PolyGaussianSection& s) {
    if (s.n < 0) throw std::invalid_argument("section: negative dimension");
    if (s.amp_dim < 1) throw std::invalid_argument("section: amplitude dimension < 1");
    if (s.gaussian.rows() != s.n || s.gaussian.cols() != s.n)
        throw std::invalid_argument("section: Gaussian matrix must be n x n");
    if ((s.gaussian - s.gaussian.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, s.gaussian.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("section: Gaussian matrix must be symmetric");
    if (s.n > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s.gaussian);
        if (solver.eigenvalues().minCoeff() < -1e-12)
            throw std::invalid_argument("section: Gaussian matrix must be positive semidefinite");
    }
    for (const auto& [key, coeff] : s.poly) {
        if (static_cast<int>(key.size()) != 2 * s.n)
            throw std::invalid_argument("section: exponent vector length != 2n");
        int deg = 0;
        for (int e : key) {
            if (e < 0) throw std::invalid_argument("section: negative exponent");
            deg += e;
        }
        if (deg > s.degree_cap) throw std::runtime_error("section: degree overflow");
        if (coeff.rows() != s.amp_dim || coeff.cols() != s.amp_dim)
            throw std::invalid_argument("section: coefficient shape mismatch");
    }
}

PolyGaussianSection make_constant_section(int n, const Matrix& amplitude, int degree_cap) {
    PolyGaussianSection s;
    s.n = n;
    s.amp_dim = static_cast<int>(amplitude.rows());
    s.degree_cap = degree_cap;
    s.gaussian = Eigen::MatrixXd::Zero(n, n);
    s.poly[std::vector<int>(2 * n, 0)] = amplitude;
    validate(s);
    return s;
}

void add_monomial(PolyGaussianSection& s, const std::vector<int>& exponents, cplx coeff) {
    if (static_cast<int>(exponents.size()) != 2 * s.n)
        throw std::invalid_argument("add_monomial: exponent vector length != 2n");
    poly_add(s.poly, exponents, coeff * Matrix::Identity(s.amp_dim, s.amp_dim));
    validate(s);
}

Matrix evaluate(const PolyGaussianSection& s, const Eigen::VectorXd& x,
                const Eigen::VectorXd& v) {
    if (x.size() != s.n || v.size() != s.n)
        throw std::invalid_argument("section evaluate: dimension mismatch");
    Matrix acc = Matrix::Zero(s.amp_dim, s.amp_dim);
    for (const auto& [key, coeff] : s.poly) {
        double mono = 1.0;
        for (int i = 0; i < s.n; ++i)
            for (int e = 0; e < key[i]; ++e) mono *= x(i);
        for (int i = 0; i < s.n; ++i)
            for (int e = 0; e < key[s.n + i]; ++e) mono *= v(i);
        acc += mono * coeff;
    }
    return std::exp(-x.dot(s.gaussian * x)) * acc;
}

PolyGaussianSection apply_rescaled_laplacian(const PolyGaussianSection& s,
                                             const RescaledModelData& data) {
    validate(s);
    validate(data);
    const int n = s.n;
    if (data.r.rows() != n)
        throw std::invalid_argument("apply_rescaled_laplacian: R dimension mismatch");

    PolyGaussianSection out = s;
    const int d = data.f.size() > 0 ? static_cast<int>(data.f.rows()) : s.amp_dim;
    if (data.f.size() > 0 && s.amp_dim != d) {
        if (s.amp_dim != 1)
            throw std::invalid_argument("apply_rescaled_laplacian: amplitude/F mismatch");
        // Promote scalar coefficients to multiples of the identity.
        Poly promoted;
        for (const auto& [key, coeff] : s.poly)
            promoted[key] = coeff(0, 0) * Matrix::Identity(d, d);
        out.poly = promoted;
        out.amp_dim = d;
    }

    // Covariant derivative on the polynomial part with the Gaussian factored
    // out: D_i = d/dX_i - 2 (Q X)_i - (1/4) (R (X + V))_i.
    auto apply_d = [&](const Poly& p, int i) {
        Poly term = poly_dx(p, i);
        Eigen::VectorXd lin = Eigen::VectorXd::Zero(2 * n);
        for (int j = 0; j < n; ++j) {
            lin(j) = -2.0 * s.gaussian(i, j) - 0.25 * data.r(i, j);
            lin(n + j) = -0.25 * data.r(i, j);
        }
        return poly_axpy(term, poly_mul_linear(p, lin), 1.0);
    };

    Poly acc;
    for (int i = 0; i < n; ++i)
        acc = poly_axpy(acc, apply_d(apply_d(out.poly, i), i), -1.0);
    if (data.f.size() > 0) {
        const Matrix fc = data.f.cast<cplx>();
        for (const auto& [key, coeff] : out.poly) poly_add(acc, key, fc * coeff);
    }

    out.poly = std::move(acc);
    if (poly_degree(out.poly) > out.degree_cap)
        throw std::runtime_error("apply_rescaled_laplacian: degree overflow");
    for (auto it = out.poly.begin(); it != out.poly.end();) {
        if (it->second.cwiseAbs().maxCoeff() == 0.0)
            it = out.poly.erase(it);
        else
            ++it;
    }
    return out;
}

double heat_residual(double t, double h, const RescaledModelData& data,
                     const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& samples) {
    if (h <= 0.0) throw std::invalid_argument("heat_residual: step must be positive");
    const int n = static_cast<int>(data.r.rows());
    double worst = 0.0;
    for (const auto& [x, v] : samples) {
        const Eigen::MatrixXd k0 = mehler_kernel(t, x, v, data);
        const double ht = h * t;
        const Eigen::MatrixXd dkdt =
            (mehler_kernel(t + ht, x, v, data) - mehler_kernel(t - ht, x, v, data)) /
            (2.0 * ht);

        Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(k0.rows(), k0.cols());
        const Eigen::VectorXd a = 0.25 * (data.r * (x + v));
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            const Eigen::MatrixXd kp = mehler_kernel(t, xp, v, data);
            const Eigen::MatrixXd km = mehler_kernel(t, xm, v, data);
            const Eigen::MatrixXd d2 = (kp - 2.0 * k0 + km) / (h * h);
            const Eigen::MatrixXd d1 = (kp - km) / (2.0 * h);
            lap -= d2 - 2.0 * a(i) * d1 + a(i) * a(i) * k0;
        }
        if (data.f.size() > 0) lap += data.f * k0;

        const double norm_k = k0.cwiseAbs().maxCoeff();
        const double res = (dkdt + lap).cwiseAbs().maxCoeff();
        worst = std::max(worst, res / norm_k);
    }
    return worst;
}

std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> default_sample_grid(int n) {
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> out;
    auto vec = [&](double base, double alt) {
        Eigen::VectorXd u(n);
        for (int i = 0; i < n; ++i) u(i) = i % 2 == 0 ? base : alt;
        return u;
    };
    out.emplace_back(vec(0.3, 0.1), vec(0.0, 0.0));
    out.emplace_back(vec(0.0, 0.0), vec(0.25, -0.2));
    out.emplace_back(vec(0.2, -0.3), vec(0.15, 0.1));
    out.emplace_back(vec(-0.4, 0.2), vec(-0.1, 0.3));
    return out;
}

double fiber_gaussian_integral(double theta, double omega, double t,
                               FiberIntegralMode mode, int nodes) {
    check_theta(theta);
    if (t <= 0.0) throw std::domain_error("fiber_gaussian_integral: t must be positive");
    if (std::abs(t * omega) >= 2.0 * std::numbers::pi)
        throw std::range_error("fiber_gaussian_integral: |t omega| >= 2 pi");

    if (mode == FiberIntegralMode::closed_form) {
        const double eta =
            sinc_ratio(t * omega) * std::sin(0.5 * theta) * std::sin(0.5 * (theta - t * omega));
        if (!(eta > 0.0))
            throw std::domain_error("fiber_gaussian_integral: eta <= 0");
        return std::numbers::pi * t / eta;
    }

    // Assemble the V-exponent from the rotation and curvature matrices.
    Eigen::MatrixXd r2(2, 2);
    r2 << 0.0, omega, -omega, 0.0;
    Eigen::MatrixXd ginv(2, 2);  // rotation by -theta
    ginv << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    const Eigen::MatrixXd m = even_matrix_function(t * r2, &cot_ratio);
    auto exponent = [&](const Eigen::Vector2d& v) {
        const Eigen::Vector2d dv = ginv * v - v;
        const double term1 = dv.dot(m * dv);
        const double term2 = (ginv * v).dot(t * r2 * v);
        return -(term1 - term2) / (4.0 * t);
    };

    const double eta_probe = -exponent(Eigen::Vector2d(std::sqrt(t), 0.0));
    if (!(eta_probe > 0.0))
        throw std::domain_error("fiber_gaussian_integral: nonpositive decay probe");
    const double sigma = std::sqrt(eta_probe / (2.0 * t));

    const GaussHermiteRule rule = gauss_hermite(nodes);
    double acc = 0.0, comp = 0.0;
    for (int i = 0; i < nodes; ++i) {
        for (int j = 0; j < nodes; ++j) {
            const Eigen::Vector2d v(rule.nodes(i) / sigma, rule.nodes(j) / sigma);
            const double log_term = rule.log_weights(i) + rule.log_weights(j) +
                                    rule.nodes(i) * rule.nodes(i) +
                                    rule.nodes(j) * rule.nodes(j) + exponent(v);
            const double term = std::exp(log_term) - comp;
            const double next = acc + term;
            comp = (next - acc) - term;
            acc = next;
        }
    }
    return acc / (sigma * sigma);
}

ExponentPieces exponent_pieces(double theta, double omega, const Eigen::Vector2d& v) {
    check_theta(theta);
    if (std::abs(omega) >= 2.0 * std::numbers::pi)
        throw std::range_error("exponent_pieces: |omega| >= 2 pi");
    const double v2 = v.squaredNorm();
    ExponentPieces out;
    out.piece1 = 0.5 * omega * std::sin(0.5 * theta) * std::cos(0.5 * theta) * v2;
    out.piece2 = -cot_ratio(omega) * std::sin(0.5 * theta) * std::sin(0.5 * theta) * v2;
    out.closed_sum =
        -sinc_ratio(omega) * std::sin(0.5 * theta) * std::sin(0.5 * (theta - omega)) * v2;
    return out;
}

GradedForm mehler_kernel_symbolic(double t, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& v, const FormMatrix& r,
                                  const FormMatrix& f) {
    validate(r);
    validate(f);
    if (t <= 0.0) throw std::domain_error("mehler_kernel_symbolic: t must be positive");
    if (!r.is_antisymmetric())
        throw std::invalid_argument("mehler_kernel_symbolic: R must be antisymmetric");
    const int n = r.size;
    if (x.size() != n || v.size() != n)
        throw std::invalid_argument("mehler_kernel_symbolic: point dimension mismatch");
    if (f.fiber_rank != r.fiber_rank)
        throw std::invalid_argument("mehler_kernel_symbolic: fiber mismatch");

    const int terms = r.fiber_rank / 2 + 1;
    const FormMatrix rt = scale(r, t);
    const GradedForm det_half = analytic_det_half(a_hat_germ(terms), rt);
    const FormMatrix m = even_series_apply(xcoth_half_series(terms), rt);

    GradedForm scalar_exp = make_zero_form(r.fiber_rank, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            scalar_exp = add(scalar_exp, scale(m.entry(i, j), -x(i) * x(j) / (4.0 * t)));
            scalar_exp = add(scalar_exp, scale(r.entry(i, j), 0.25 * x(i) * v(j)));
        }

    const int d = f.size;
    GradedForm total = add(wedge(scalar_exp, make_identity_form(r.fiber_rank, d)),
                           scale(f.to_graded(), -t));
    const double norm = std::pow(4.0 * std::numbers::pi * t, -0.5 * n);
    return scale(wedge(det_half, exp_even(total)), norm);
}

}  // namespace lefschetz

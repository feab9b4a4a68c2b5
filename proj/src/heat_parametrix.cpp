#include "lefschetz/heat_parametrix.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lefschetz {

namespace {

RadialPolynomial potential_poly(const ModelGeometry& geom) {
    switch (geom.kind) {
        case GeometryKind::flat:
            return {};
        case GeometryKind::flat_plus_potential:
            return {geom.c};
        case GeometryKind::radial_curved:
            return geom.profile;
    }
    throw std::logic_error("unknown geometry kind");
}

void trim(RadialPolynomial& p) {
    while (!p.empty() && p.back() == 0.0) p.pop_back();
}

// exp(-1/x) ramp; smooth step equal to 0 at x <= 0 and 1 at x >= 1.
double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

}  // namespace

void validate(const ModelGeometry& geom) {
    if (geom.n < 1) throw std::invalid_argument("model geometry: dimension < 1");
    if (geom.kappa <= 0.0) throw std::invalid_argument("model geometry: kappa <= 0");
    if (geom.mesh_points < 9) throw std::invalid_argument("model geometry: mesh too coarse");
    if (geom.kind == GeometryKind::radial_curved && geom.profile.empty())
        throw std::invalid_argument("model geometry: radial_curved needs a profile");
}

double eval_even_poly(const RadialPolynomial& p, double r) {
    const double r2 = r * r;
    double acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * r2 + *it;
    return acc;
}

RadialPolynomial even_poly_slope(const RadialPolynomial& p) {
    RadialPolynomial out;
    if (p.size() > 1) {
        out.resize(p.size() - 1);
        for (std::size_t j = 1; j < p.size(); ++j) out[j - 1] = 2.0 * j * p[j];
    }
    return out;
}

RadialPolynomial radial_operator_apply(const ModelGeometry& geom, const RadialPolynomial& p) {
    validate(geom);
    // -p'' - ((n-1)/r) p' collapses on r^{2j} to -2j(2j + n - 2) r^{2j-2}.
    RadialPolynomial out;
    if (p.size() > 1) {
        out.resize(p.size() - 1, 0.0);
        for (std::size_t j = 1; j < p.size(); ++j)
            out[j - 1] = -2.0 * j * (2.0 * j + geom.n - 2.0) * p[j];
    }
    const RadialPolynomial v = potential_poly(geom);
    if (!v.empty() && !p.empty()) {
        if (out.size() < v.size() + p.size() - 1) out.resize(v.size() + p.size() - 1, 0.0);
        for (std::size_t a = 0; a < v.size(); ++a)
            for (std::size_t b = 0; b < p.size(); ++b) out[a + b] += v[a] * p[b];
    }
    trim(out);
    return out;
}

HeatCoefficientTable solve_theta_recursion(const ModelGeometry& geom, int max_index) {
    validate(geom);
    if (max_index < 0) throw std::invalid_argument("solve_theta_recursion: negative index");

    HeatCoefficientTable table;
    table.geometry = geom;
    table.max_index = max_index;
    table.theta.resize(max_index + 1);
    table.theta[0] = {1.0};
    for (int i = 1; i <= max_index; ++i) {
        // r^{-i} int_0^r s^{i-1} (B theta_{i-1})(s) ds sends r^{2j} to
        // r^{2j} / (i + 2j); exact on the polynomial representation.
        const RadialPolynomial src = radial_operator_apply(geom, table.theta[i - 1]);
        RadialPolynomial next(src.size());
        for (std::size_t j = 0; j < src.size(); ++j)
            next[j] = -src[j] / (i + 2.0 * j);
        trim(next);
        table.theta[i] = std::move(next);
    }

    const int m = geom.mesh_points;
    table.mesh_r.resize(m);
    table.mesh_values.resize(max_index + 1, m);
    for (int j = 0; j < m; ++j) {
        table.mesh_r(j) = geom.kappa * j / (m - 1);
        for (int i = 0; i <= max_index; ++i)
            table.mesh_values(i, j) = eval_even_poly(table.theta[i], table.mesh_r(j));
    }
    return table;
}

RadialPolynomial residual_identity(const HeatCoefficientTable& table, int i) {
    if (i < 1 || i > table.max_index)
        throw std::invalid_argument("residual_identity: index out of range");
    RadialPolynomial out = radial_operator_apply(table.geometry, table.theta[i - 1]);
    const RadialPolynomial& th = table.theta[i];
    if (out.size() < th.size()) out.resize(th.size(), 0.0);
    for (std::size_t j = 0; j < th.size(); ++j)
        out[j] += (i + 2.0 * j) * th[j];  // r theta' contributes 2j theta_j
    trim(out);
    return out;
}

double beta_bump(double x) { return smooth_step(2.0 * (1.0 - std::abs(x))); }

double chi_cutoff(double r, double kappa) {
    if (kappa <= 0.0) throw std::invalid_argument("chi_cutoff: kappa <= 0");
    return smooth_step(2.0 * (1.0 - std::abs(r) / kappa));
}

BorelData estimate_bound_sequence(const HeatCoefficientTable& table) {
    BorelData out;
    out.kappa = table.geometry.kappa;
    const double h = table.mesh_r(1) - table.mesh_r(0);
    double running = 1.0;
    for (int i = 0; i <= table.max_index; ++i) {
        // Sup over derivative orders 0..i of iterated mesh differences.
        Eigen::VectorXd vals = table.mesh_values.row(i);
        double sup = vals.cwiseAbs().maxCoeff();
        Eigen::VectorXd cur = vals;
        for (int order = 1; order <= i && cur.size() > 1; ++order) {
            Eigen::VectorXd next(cur.size() - 1);
            for (int j = 0; j + 1 < cur.size(); ++j) next(j) = (cur(j + 1) - cur(j)) / h;
            cur = next;
            sup = std::max(sup, cur.cwiseAbs().maxCoeff());
        }
        const double estimate = 2.0 * sup;
        running = std::max(running, std::max(2.0 * estimate, 1.0));
        out.b.push_back(running);
    }
    return out;
}

double gaussian_factor(int n, double t, double r) {
    if (t <= 0.0) throw std::domain_error("gaussian_factor: t <= 0");
    return std::pow(4.0 * std::numbers::pi * t, -0.5 * n) * std::exp(-r * r / (4.0 * t));
}

double borel_sum(const HeatCoefficientTable& table, const BorelData& bdata, double t, double r) {
    if (t <= 0.0) throw std::domain_error("borel_sum: t <= 0");
    if (bdata.b.size() < table.theta.size())
        throw std::invalid_argument("borel_sum: bound sequence shorter than table");
    double series = 0.0;
    double tp = 1.0;
    for (std::size_t i = 0; i < table.theta.size(); ++i) {
        const double bump = beta_bump(bdata.b[i] * t);
        if (bump != 0.0) series += bump * tp * eval_even_poly(table.theta[i], r);
        tp *= t;
    }
    return chi_cutoff(r, table.geometry.kappa) * gaussian_factor(table.geometry.n, t, r) * series;
}

ResidualFit heat_residual_order(const ModelGeometry& geom, const BorelData& bdata, int max_index,
                                std::vector<double> t_grid) {
    validate(geom);
    const HeatCoefficientTable table = solve_theta_recursion(geom, max_index);
    BorelData bounds = bdata;
    if (bounds.b.empty()) bounds = estimate_bound_sequence(table);
    if (t_grid.empty()) {
        const int points = 9;
        for (int k = 0; k < points; ++k)
            t_grid.push_back(0.02 * std::pow(0.12 / 0.02, double(k) / (points - 1)));
    }

    const RadialPolynomial v = potential_poly(geom);
    const int n = geom.n;

    // Exact spatial operator on K = chi q_t u with u(r) = sum beta t^i theta_i,
    // restricted to r <= kappa/2 where chi = 1:
    // Delta(q_t u) = q_t [ u (n/2t - r^2/4t^2) + (r/t) u' - u''
    //                      - ((n-1)/r) u' + V u ].
    auto spatial = [&](double t, double r) {
        double u = 0.0, us = 0.0, uss = 0.0;  // u, u'/r, u''
        double tp = 1.0;
        for (std::size_t i = 0; i < table.theta.size(); ++i) {
            const double bump = beta_bump(bounds.b[i] * t);
            if (bump != 0.0) {
                const RadialPolynomial& th = table.theta[i];
                const RadialPolynomial slope = even_poly_slope(th);
                const double w = bump * tp;
                u += w * eval_even_poly(th, r);
                us += w * eval_even_poly(slope, r);
                double d2 = 0.0;  // (r s(r))' with s = u'/r gives u'' = s + r s'
                d2 += eval_even_poly(slope, r);
                const RadialPolynomial slope2 = even_poly_slope(slope);
                d2 += r * r * eval_even_poly(slope2, r);
                uss += w * d2;
            }
            tp *= t;
        }
        const double q = gaussian_factor(n, t, r);
        const double vr = eval_even_poly(v, r);
        return q * (u * (0.5 * n / t - r * r / (4.0 * t * t)) + r * r * us / t - uss -
                    (n - 1.0) * us + vr * u);
    };

    ResidualFit fit;
    fit.t_grid = t_grid;
    bool all_floor = true;
    for (double t : t_grid) {
        const double ht = 1e-3 * t;
        double worst = 0.0, scale = 0.0;
        for (int j = 0; j < table.mesh_r.size(); ++j) {
            const double r = table.mesh_r(j);
            if (r > 0.5 * geom.kappa) break;
            const double km2 = borel_sum(table, bounds, t - 2 * ht, r);
            const double km1 = borel_sum(table, bounds, t - ht, r);
            const double kp1 = borel_sum(table, bounds, t + ht, r);
            const double kp2 = borel_sum(table, bounds, t + 2 * ht, r);
            const double dkdt = (km2 - 8.0 * km1 + 8.0 * kp1 - kp2) / (12.0 * ht);
            const double res = dkdt + spatial(t, r);
            worst = std::max(worst, std::abs(res));
            scale = std::max(scale, std::abs(borel_sum(table, bounds, t, r)));
        }
        fit.residuals.push_back(worst);
        if (worst > 1e-8 * scale) all_floor = false;
    }
    fit.floor = all_floor;
    if (fit.floor) return fit;

    // Least-squares slope of log residual against log t.
    const int m = static_cast<int>(t_grid.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < m; ++k) {
        const double lx = std::log(t_grid[k]);
        const double ly = std::log(fit.residuals[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return fit;
}

cplx asymptotic_constant_term(const std::vector<std::pair<double, cplx>>& samples,
                              const std::vector<double>& model_powers) {
    if (samples.size() < model_powers.size())
        throw std::invalid_argument("asymptotic_constant_term: underdetermined fit");
    int const_col = -1;
    for (std::size_t p = 0; p < model_powers.size(); ++p)
        if (model_powers[p] == 0.0) const_col = static_cast<int>(p);
    if (const_col < 0)
        throw std::invalid_argument("asymptotic_constant_term: powers must include 0");

    const int rows = static_cast<int>(samples.size());
    const int cols = static_cast<int>(model_powers.size());
    Matrix a(rows, cols);
    Eigen::VectorXcd y(rows);
    for (int k = 0; k < rows; ++k) {
        if (samples[k].first <= 0.0)
            throw std::invalid_argument("asymptotic_constant_term: t must be positive");
        for (int p = 0; p < cols; ++p) a(k, p) = std::pow(samples[k].first, model_powers[p]);
        y(k) = samples[k].second;
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond =
        svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    if (!(cond < 1e8)) throw std::runtime_error("asymptotic_constant_term: ill-conditioned fit");
    const Eigen::VectorXcd coeff = svd.solve(y);
    return coeff(const_col);
}

}  // namespace lefschetz

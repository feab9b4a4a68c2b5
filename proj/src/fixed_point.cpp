#include "lefschetz/fixed_point.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lefschetz {

namespace {

struct KahanAccumulator {
    cplx sum = 0.0;
    cplx comp = 0.0;
    void add(cplx term) {
        const cplx y = term - comp;
        const cplx t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

void validate(const FixedPointComponent& c) {
    if (c.n0 < 0 || c.n1 < 0 || c.n0 % 2 != 0 || c.n1 % 2 != 0)
        throw std::domain_error("fixed-point component: n0 and n1 must be even");
    if (c.mesh.empty())
        throw std::invalid_argument("fixed-point component: empty mesh");
    if (c.n0 == 0 && (c.mesh.size() != 1 || c.mesh[0].weight != 1.0))
        throw std::invalid_argument(
            "fixed-point component: a zero-dimensional component carries a single "
            "sample of weight one");
    for (const MeshSample& s : c.mesh) {
        if (!(s.weight > 0.0))
            throw std::invalid_argument("fixed-point component: weights must be positive");
        if (s.orientation != 1 && s.orientation != -1)
            throw std::invalid_argument("fixed-point component: orientation must be +1 or -1");
        if (s.curvature.n0 != c.n0 || s.curvature.n1 != c.n1)
            throw std::invalid_argument("fixed-point component: sample dimensions mismatch");
        validate(s.curvature);
    }
    for (const PvPole& p : c.pv_poles)
        if (!(p.radius > 0.0))
            throw std::invalid_argument("fixed-point component: pole radius must be positive");
}

cplx pv_quadrature(const std::vector<cplx>& values,
                   const std::vector<std::pair<double, double>>& mesh,
                   const std::vector<PvPole>& poles) {
    if (values.size() != mesh.size())
        throw std::invalid_argument("pv_quadrature: values/mesh size mismatch");
    const std::size_t n = mesh.size();
    double span = 0.0;
    for (const auto& [x, w] : mesh) span = std::max(span, std::abs(x));
    span = std::max(span, 1.0);

    for (const PvPole& p : poles)
        for (const auto& [x, w] : mesh)
            if (std::abs(x - p.coord) < 1e-12 * span)
                throw std::runtime_error("pv_quadrature: pole lies on a mesh node");

    // Mirror pairing inside each pole's radius.
    std::vector<std::ptrdiff_t> partner(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mesh[i].first;
        const PvPole* nearest = nullptr;
        double best = std::numeric_limits<double>::infinity();
        for (const PvPole& p : poles) {
            const double d = std::abs(x - p.coord);
            if (d < best) {
                best = d;
                nearest = &p;
            }
        }
        if (!nearest || best > nearest->radius) continue;  // plain far-zone point
        const double mirror = 2.0 * nearest->coord - x;
        std::ptrdiff_t found = -1;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(mesh[j].first - mirror) <= 1e-9 * span) {
                found = static_cast<std::ptrdiff_t>(j);
                break;
            }
        if (found < 0)
            throw std::runtime_error("pv_quadrature: unpaired mesh point near a pole");
        if (std::abs(mesh[found].second - mesh[i].second) >
            1e-12 * std::abs(mesh[i].second))
            throw std::runtime_error("pv_quadrature: mirror weights differ");
        partner[i] = found;
    }

    KahanAccumulator acc;
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = partner[i];
        if (j < 0) {
            acc.add(mesh[i].second * values[i]);
        } else if (static_cast<std::size_t>(j) > i) {
            // The mirror contributions cancel their singular parts before
            // entering the accumulator.
            acc.add(mesh[i].second * (values[i] + values[j]));
        }
    }
    return acc.sum;
}

cplx evaluate_component(const FixedPointComponent& c) {
    validate(c);
    std::vector<cplx> values;
    values.reserve(c.mesh.size());
    for (const MeshSample& s : c.mesh) {
        const GradedForm integrand = assemble_integrand(s.curvature, c.gamma);
        values.push_back(s.density * top_component_scalar(integrand, s.orientation));
    }
    if (!c.pv_poles.empty()) {
        std::vector<std::pair<double, double>> mesh;
        mesh.reserve(c.mesh.size());
        for (const MeshSample& s : c.mesh) mesh.emplace_back(s.coord, s.weight);
        return pv_quadrature(values, mesh, c.pv_poles);
    }
    KahanAccumulator acc;
    for (std::size_t k = 0; k < values.size(); ++k) acc.add(c.mesh[k].weight * values[k]);
    return acc.sum;
}

CharacterReport evaluate_character(const std::vector<FixedPointComponent>& components,
                                   double group_parameter) {
    CharacterReport report;
    report.group_parameter = group_parameter;
    KahanAccumulator acc;
    for (const FixedPointComponent& c : components) {
        const cplx value = evaluate_component(c);
        report.component_names.push_back(c.name);
        report.per_component.push_back(value);
        acc.add(value);
    }
    report.total = acc.sum;
    return report;
}

int orientation_sign(const OrientationTable& table, const std::string& region) {
    auto it = table.region_sign.find(region);
    if (it == table.region_sign.end())
        throw std::invalid_argument("orientation_sign: unknown region label '" + region + "'");
    if (it->second != 1 && it->second != -1)
        throw std::invalid_argument("orientation_sign: table sign must be +1 or -1");
    return it->second;
}

int sign_after_crossings(int sign, int crossings) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("sign_after_crossings: sign must be +1 or -1");
    if (crossings < 0) throw std::invalid_argument("sign_after_crossings: negative count");
    return crossings % 2 == 0 ? sign : -sign;
}

}  // namespace lefschetz

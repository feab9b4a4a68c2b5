#pragma once

#include "lefschetz/characteristic_forms.hpp"

#include <map>
#include <string>

namespace lefschetz {

/** One quadrature node of a fixed-point component: local curvature data,
 *  the transversal density weight (j* tau / |nu|), and the orientation of
 *  the chosen frame relative to the reference orientation.
 */
struct MeshSample {
    double coord = 0.0;
    double weight = 1.0;
    cplx density = 1.0;
    int orientation = 1;
    CurvatureBlockData curvature;
};

/// A simple pole of the density together with its mirror-pairing radius.
struct PvPole {
    double coord = 0.0;
    double radius = 0.0;
};

/** One connected component of the fixed-point set: component dimension n0,
 *  normal rank n1, the group action on the twisting data, and a quadrature
 *  mesh of curvature/density samples. Zero-dimensional components carry a
 *  single sample of weight one.
 */
struct FixedPointComponent {
    std::string name;
    int n0 = 0;
    int n1 = 0;
    GammaActionData gamma;
    std::vector<MeshSample> mesh;
    std::vector<PvPole> pv_poles;
};

void validate(const FixedPointComponent& c);

/** Principal-value quadrature: mesh points inside a pole's pairing radius
 *  are summed as mirror pairs (value at x plus value at 2 p - x) before
 *  accumulation; points away from every pole enter as a plain weighted sum.
 *  Accumulation is compensated and runs in mesh order. Throws
 *  std::runtime_error for a pole sitting on a node or an unpaired mesh.
 */
cplx pv_quadrature(const std::vector<cplx>& values,
                   const std::vector<std::pair<double, double>>& mesh,
                   const std::vector<PvPole>& poles);

/** Weighted sum over the component mesh of
 *  density * orientation * top_component(assemble_integrand(...)); switches
 *  to pv_quadrature when the component declares poles.
 */
cplx evaluate_component(const FixedPointComponent& c);

struct CharacterReport {
    double group_parameter = 0.0;
    cplx total = 0.0;
    std::vector<std::string> component_names;
    std::vector<cplx> per_component;
};

/// Deterministic component-order evaluation with compensated accumulation.
CharacterReport evaluate_character(const std::vector<FixedPointComponent>& components,
                                   double group_parameter);

/** Orientation bookkeeping for the complement regions of a hypersurface
 *  family: each region label maps to +1 (anchor-orientation preserved) or
 *  -1 (reversed). Crossing one hypersurface flips the sign.
 */
struct OrientationTable {
    std::map<std::string, int> region_sign;
};

int orientation_sign(const OrientationTable& table, const std::string& region);

/// Sign after crossing `crossings` hypersurfaces starting from `sign`.
int sign_after_crossings(int sign, int crossings);

}  // namespace lefschetz

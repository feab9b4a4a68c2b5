#pragma once

#include "lefschetz/fixed_point.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lefschetz::scenes {

extern const std::vector<std::string> kKnownScenes;
extern const char* kVersion;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SceneConfig {
    std::string scene;
    double group_angle = 0.0;    // rotation angle for circle actions
    bool reflection = false;     // group element is the point reflection
    bool has_angle = false;
    int twist_k = 0;
    bool has_twist = false;
    std::vector<double> t_grid = {1.0, 0.5, 0.25, 0.125, 0.0625};
    int lattice_cutoff = 0;      // 0: derive from the heat-tail bound
    int mesh_resolution = 2048;  // pv mirror pairs per unit half-interval
    int pv_epsilon_levels = 3;
    int lift_sign = 1;
    std::string output;          // empty: stdout
    std::string format = "json";
};

/// Parse and validate a single-object config document (UTF-8 text).
SceneConfig load_config(const std::string& text);
SceneConfig load_config_file(const std::string& path);

/// Smallest lattice cutoff satisfying exp(-4 pi^2 t K^2) < 1e-14.
int tail_bound_cutoff(double t);

struct CheckRow {
    std::string name;
    double delta = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct RunReport {
    std::string scene;
    bool ok = false;
    std::vector<CheckRow> checks;
    nlohmann::ordered_json body;
};

RunReport run_scene(const SceneConfig& cfg);

/** Serialize with fixed 17-significant-digit float formatting (byte-stable
 *  for identical configs). format: "json" or "csv" (csv flattens the
 *  t-sweeps only).
 */
std::string render_report(const RunReport& report, const std::string& format);

/// FNV-1a of the canonical config echo; stable across platforms.
std::uint64_t fnv1a(const std::string& s);

// Scene geometry builders (shared with the test suite).
std::vector<FixedPointComponent> s2_spin_components(double theta);
std::vector<FixedPointComponent> cp1_twisted_components(int k, double theta);
std::vector<FixedPointComponent> t2_reflection_components(int lift_sign);

struct CriterionResult {
    std::string id;
    bool pass = false;
    std::string detail;
};

/// The seven-point verification suite, in order A1..A7.
std::vector<CriterionResult> run_acceptance();

/** Randomized algebra property suite: associativity, graded commutation,
 *  determinant multiplicativity, supertrace-on-bracket vanishing,
 *  denominator inversion and branch positivity. Returns failure count.
 */
struct PropertySuiteResult {
    int instances = 0;
    int failures = 0;
    std::string first_failure;
};
PropertySuiteResult property_suite(int instances, std::uint64_t seed);

}  // namespace lefschetz::scenes

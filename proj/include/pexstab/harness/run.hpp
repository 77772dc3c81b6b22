#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pexstab/control.hpp"
#include "pexstab/domain.hpp"
#include "pexstab/oracle.hpp"
#include "pexstab/stabilizer.hpp"

namespace pexstab {

inline constexpr int kConfigVersion = 1;

enum class Preset { None, General, Cauchy, Sigma };

/// Parsed form of the JSON experiment config. Construct with parse_config.
struct ExperimentConfig {
    nlohmann::json source;  // echoed into the report
    Preset preset = Preset::None;
    Carrier carrier = Carrier::lattice(1, 1);
    std::vector<Automorphism> generators;
    int r = 1;
    double beta = 1.0;
    nlohmann::json control;
    std::optional<double> lipschitz;
    JensenStrategy strategy = JensenStrategy::Lambda;
    double tol = kDefaultTol;
    int nmax = kDefaultMaxIterations;
    int probe_steps = 10;
    std::uint64_t seed = 0;
    double delta = 0.0;
    double support_radius = 0.0;
    NoiseTargets noise_targets;
    bool noise_zero_at_origin = true;
    nlohmann::json truth;   // {q, j, a, b} or null
    nlohmann::json triple;  // explicit {f, g, h} or null
};

/// Throws Error(Config) on schema problems.
ExperimentConfig parse_config(const nlohmann::json& j);

struct RunReport {
    nlohmann::json report;
    int exit_code = 0;
};

/// Full pipeline: preset expansion, truth construction, perturbation, hypothesis
/// check, stabilization, bound/law verification and uniqueness probe. Never
/// throws; failures land in report["status"] with exit codes 2 (hypothesis),
/// 3 (nonconvergence) or 4 (config).
RunReport run(const nlohmann::json& config);

/// Bases and dimensions of the quadratic and Jensen solution spaces for the
/// config's carrier and group.
nlohmann::json oracle_report(const nlohmann::json& config);

/// Coefficients of ||x||^p in the three power-control bounds, as JSON. With the
/// sigma preset |K| = 2 is enforced.
nlohmann::json coefficients_report(double theta, double p, double beta, int group_order, Preset preset);

Preset preset_from_string(const std::string& s);

}  // namespace pexstab

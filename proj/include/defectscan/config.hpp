#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "defectscan/inversion.hpp"
#include "defectscan/measurement.hpp"
#include "defectscan/model.hpp"

namespace defectscan {

enum class ExperimentKind {
    simulate,
    invert,
    mc_invert,
    sweep_noise,
    sweep_location,
    sweep_size,
    landscape,
    validate,
};

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// Landscape evaluation window; zeros mean "use the natural default"
/// (full index range, objective k bounds).
struct LandscapeRange {
    int j_lo = 2;
    int j_hi = 0;
    double k_lo = 0.0;
    double k_hi = 0.0;
    int k_steps = 401;
};

/// Fully resolved experiment description. Parsed from a flat key-value
/// config file; every key is listed in the README and unknown keys are a
/// hard error.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::validate;
    ChainConfig chain;
    std::optional<DefectHypothesis> defect;
    std::optional<PhysicalUnits> units;
    SGrid grid;
    ObjectiveSpec objective; // objective.grid mirrors grid
    SigmaSmoothSpec smooth;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    int workers = 0; // 0 = default_workers()
    std::string measurement_path;
    std::vector<double> sweep_levels;
    std::vector<int> sweep_j_values;
    std::vector<double> sweep_k_values;
    LandscapeRange land;

    /// Kind-specific completeness checks (throws ConfigError).
    void validate() const;
};

/// Parse `key value` lines ('#' starts a comment). Throws ConfigError with
/// the offending key path on unknown keys or malformed values.
ExperimentSpec parse_config_text(const std::string& text);
ExperimentSpec parse_config_file(const std::string& path);

/// Canonical `key value` echo of a resolved spec, in fixed order with
/// lossless numeric formatting; reports embed this so every artifact can be
/// re-run from its own header.
std::string echo_config(const ExperimentSpec& spec);

} // namespace defectscan

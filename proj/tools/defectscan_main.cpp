// Command-line frontend: subcommands map 1:1 onto experiment kinds, a flat
// key-value config file supplies the full spec, and a few flags override the
// common knobs. Exit codes: 0 success, 1 validation failure, 2 config error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "defectscan/config.hpp"
#include "defectscan/errors.hpp"
#include "defectscan/harness.hpp"

namespace {

defectscan::ExperimentSpec default_spec(defectscan::ExperimentKind kind) {
    defectscan::ExperimentSpec spec;
    spec.kind = kind;
    spec.defect = defectscan::DefectHypothesis{40, 1.3};
    spec.seed = 1;
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"defectscan: locate and size a single stiffness defect in a "
                 "spring-mass chain from endpoint Laplace-domain data"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> workers;
    std::optional<double> level;
    std::optional<int> j_override;
    std::optional<double> k_override;

    const char* kind_names[] = {"simulate",  "invert",         "mc-invert",
                                "sweep-noise", "sweep-location", "sweep-size",
                                "landscape", "validate"};
    for (const char* name : kind_names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "flat key-value experiment config");
        sub->add_option("--seed", seed, "override experiment seed");
        sub->add_option("--out", out_dir, "override output directory");
        sub->add_option("--workers", workers,
                        "worker threads (default: DEFECTSCAN_WORKERS or hardware)");
        sub->add_option("--level", level, "override noise level");
        sub->add_option("--j", j_override, "override true defect index");
        sub->add_option("--k", k_override, "override true defect stiffness");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string kind_name = app.get_subcommands().front()->get_name();

    try {
        const auto kind = defectscan::experiment_kind_from_string(kind_name);
        defectscan::ExperimentSpec spec =
            config_path.empty() ? default_spec(kind)
                                : defectscan::parse_config_file(config_path);
        spec.kind = kind;
        if (seed) spec.seed = *seed;
        if (out_dir) spec.output_dir = *out_dir;
        if (workers) spec.workers = *workers;
        if (level) spec.noise_level = *level;
        if (j_override || k_override) {
            defectscan::DefectHypothesis d =
                spec.defect.value_or(defectscan::DefectHypothesis{40, 1.3});
            if (j_override) d.index = *j_override;
            if (k_override) d.stiffness = *k_override;
            spec.defect = d;
        }
        spec.validate();
        return defectscan::run_experiment(spec, std::cout);
    } catch (const defectscan::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

#include "defectscan/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "defectscan/errors.hpp"

namespace defectscan {

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::simulate: return "simulate";
        case ExperimentKind::invert: return "invert";
        case ExperimentKind::mc_invert: return "mc-invert";
        case ExperimentKind::sweep_noise: return "sweep-noise";
        case ExperimentKind::sweep_location: return "sweep-location";
        case ExperimentKind::sweep_size: return "sweep-size";
        case ExperimentKind::landscape: return "landscape";
        case ExperimentKind::validate: return "validate";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "simulate") return ExperimentKind::simulate;
    if (name == "invert") return ExperimentKind::invert;
    if (name == "mc-invert") return ExperimentKind::mc_invert;
    if (name == "sweep-noise") return ExperimentKind::sweep_noise;
    if (name == "sweep-location") return ExperimentKind::sweep_location;
    if (name == "sweep-size") return ExperimentKind::sweep_size;
    if (name == "landscape") return ExperimentKind::landscape;
    if (name == "validate") return ExperimentKind::validate;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

namespace {

double to_double(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': bad numeric value '" + value + "'");
    }
}

int to_int(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': bad integer value '" + value + "'");
    }
}

std::uint64_t to_u64(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': bad seed value '" + value + "'");
    }
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream in(value);
    while (std::getline(in, token, ',')) {
        if (!token.empty()) out.push_back(token);
    }
    return out;
}

std::vector<double> to_double_list(const std::string& value, const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : split_list(value)) out.push_back(to_double(tok, key));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::vector<int> to_int_list(const std::string& value, const std::string& key) {
    std::vector<int> out;
    for (const auto& tok : split_list(value)) out.push_back(to_int(tok, key));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

struct PartialDefect {
    std::optional<int> index;
    std::optional<double> stiffness;
};

struct PartialUnits {
    std::optional<double> length, density, youngs_modulus, cross_section;
    bool any() const {
        return length || density || youngs_modulus || cross_section;
    }
    bool all() const {
        return length && density && youngs_modulus && cross_section;
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

ExperimentSpec parse_config_text(const std::string& text) {
    ExperimentSpec spec;
    PartialDefect defect;
    PartialUnits units;
    bool have_kind = false;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string key, value, extra;
        if (!(ls >> key)) continue; // blank line
        if (!(ls >> value) || (ls >> extra))
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key value', got '" + line + "'");

        if (key == "kind") {
            spec.kind = experiment_kind_from_string(value);
            have_kind = true;
        } else if (key == "n_masses") {
            spec.chain.n_masses = to_int(value, key);
        } else if (key == "damping") {
            spec.chain.damping = to_double(value, key);
        } else if (key == "impulse") {
            spec.chain.impulse = to_double(value, key);
        } else if (key == "base_stiffness") {
            spec.chain.base_stiffness = to_double(value, key);
        } else if (key == "base_mass") {
            spec.chain.base_mass = to_double(value, key);
        } else if (key == "defect.index") {
            defect.index = to_int(value, key);
        } else if (key == "defect.stiffness") {
            defect.stiffness = to_double(value, key);
        } else if (key == "units.length") {
            units.length = to_double(value, key);
        } else if (key == "units.density") {
            units.density = to_double(value, key);
        } else if (key == "units.youngs_modulus") {
            units.youngs_modulus = to_double(value, key);
        } else if (key == "units.cross_section") {
            units.cross_section = to_double(value, key);
        } else if (key == "grid.s_min") {
            spec.grid.s_min = to_double(value, key);
        } else if (key == "grid.s_max") {
            spec.grid.s_max = to_double(value, key);
        } else if (key == "grid.n_nodes") {
            spec.grid.n_nodes = to_int(value, key);
        } else if (key == "objective.k_lo") {
            spec.objective.k_lo = to_double(value, key);
        } else if (key == "objective.k_hi") {
            spec.objective.k_hi = to_double(value, key);
        } else if (key == "objective.k_tol") {
            spec.objective.k_tol = to_double(value, key);
        } else if (key == "objective.coarse_k_nodes") {
            spec.objective.coarse_k_nodes = to_int(value, key);
        } else if (key == "objective.log_floor") {
            spec.objective.log_floor = to_double(value, key);
        } else if (key == "objective.refine_budget") {
            spec.objective.refine_budget = to_int(value, key);
        } else if (key == "smooth.sigma") {
            spec.smooth.sigma_smooth = to_double(value, key);
        } else if (key == "smooth.n_delta") {
            spec.smooth.n_delta = to_int(value, key);
        } else if (key == "smooth.n_mc") {
            spec.smooth.n_mc = to_int(value, key);
        } else if (key == "noise.level") {
            spec.noise_level = to_double(value, key);
        } else if (key == "seed") {
            spec.seed = to_u64(value, key);
        } else if (key == "output_dir") {
            spec.output_dir = value;
        } else if (key == "workers") {
            spec.workers = to_int(value, key);
        } else if (key == "measurement") {
            spec.measurement_path = value;
        } else if (key == "sweep.levels") {
            spec.sweep_levels = to_double_list(value, key);
        } else if (key == "sweep.j_values") {
            spec.sweep_j_values = to_int_list(value, key);
        } else if (key == "sweep.k_values") {
            spec.sweep_k_values = to_double_list(value, key);
        } else if (key == "landscape.j_lo") {
            spec.land.j_lo = to_int(value, key);
        } else if (key == "landscape.j_hi") {
            spec.land.j_hi = to_int(value, key);
        } else if (key == "landscape.k_lo") {
            spec.land.k_lo = to_double(value, key);
        } else if (key == "landscape.k_hi") {
            spec.land.k_hi = to_double(value, key);
        } else if (key == "landscape.k_steps") {
            spec.land.k_steps = to_int(value, key);
        } else {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
        }
    }

    if (!have_kind) throw ConfigError("config: missing required key 'kind'");
    if (defect.index.has_value() != defect.stiffness.has_value())
        throw ConfigError("config: defect.index and defect.stiffness must appear together");
    if (defect.index)
        spec.defect = DefectHypothesis{*defect.index, *defect.stiffness};
    if (units.any()) {
        if (!units.all())
            throw ConfigError("config: units.* block must set length, density, "
                              "youngs_modulus and cross_section");
        spec.units = PhysicalUnits{*units.length, *units.density, *units.youngs_modulus,
                                   *units.cross_section};
    }
    spec.objective.grid = spec.grid;
    return spec;
}

ExperimentSpec parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void ExperimentSpec::validate() const {
    try {
        chain.validate();
        grid.validate();
        objective.validate();
        smooth.validate();
        if (defect) defect->validate(chain.n_masses);
        if (units) units->validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (noise_level < 0.0) throw ConfigError("config: noise.level must be >= 0");
    if (workers < 0) throw ConfigError("config: workers must be >= 0");
    if (!(grid == objective.grid)) throw ConfigError("config: internal grid mismatch");

    const bool needs_defect = kind == ExperimentKind::simulate ||
                              kind == ExperimentKind::mc_invert ||
                              kind == ExperimentKind::sweep_noise ||
                              kind == ExperimentKind::sweep_location ||
                              kind == ExperimentKind::sweep_size;
    if (needs_defect && !defect)
        throw ConfigError("config: kind '" + std::string(to_string(kind)) +
                          "' requires defect.index and defect.stiffness");
    if ((kind == ExperimentKind::invert || kind == ExperimentKind::landscape) &&
        measurement_path.empty() && !defect)
        throw ConfigError("config: kind '" + std::string(to_string(kind)) +
                          "' needs either 'measurement' or a defect block");
    if (kind == ExperimentKind::sweep_noise && sweep_levels.empty())
        throw ConfigError("config: sweep-noise requires sweep.levels");
    if (kind == ExperimentKind::sweep_location && sweep_j_values.empty())
        throw ConfigError("config: sweep-location requires sweep.j_values");
    if (kind == ExperimentKind::sweep_size && sweep_k_values.empty())
        throw ConfigError("config: sweep-size requires sweep.k_values");
    if (kind == ExperimentKind::landscape) {
        if (land.j_lo < 2 || (land.j_hi != 0 && (land.j_hi > chain.n_masses ||
                                                 land.j_hi < land.j_lo)))
            throw ConfigError("config: landscape.j range invalid");
        if (land.k_steps < 2) throw ConfigError("config: landscape.k_steps must be >= 2");
    }
    for (double lv : sweep_levels)
        if (!(lv > 0.0)) throw ConfigError("config: sweep.levels must be positive");
    for (int jv : sweep_j_values)
        if (jv < 2 || jv > chain.n_masses)
            throw ConfigError("config: sweep.j_values entries must be in [2, N]");
    for (double kv : sweep_k_values)
        if (!(kv > 0.0)) throw ConfigError("config: sweep.k_values must be positive");
}

std::string echo_config(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << "kind " << to_string(spec.kind) << '\n';
    out << "n_masses " << spec.chain.n_masses << '\n';
    out << "damping " << fmt(spec.chain.damping) << '\n';
    out << "impulse " << fmt(spec.chain.impulse) << '\n';
    out << "base_stiffness " << fmt(spec.chain.base_stiffness) << '\n';
    out << "base_mass " << fmt(spec.chain.base_mass) << '\n';
    if (spec.defect) {
        out << "defect.index " << spec.defect->index << '\n';
        out << "defect.stiffness " << fmt(spec.defect->stiffness) << '\n';
    }
    if (spec.units) {
        out << "units.length " << fmt(spec.units->length) << '\n';
        out << "units.density " << fmt(spec.units->density) << '\n';
        out << "units.youngs_modulus " << fmt(spec.units->youngs_modulus) << '\n';
        out << "units.cross_section " << fmt(spec.units->cross_section) << '\n';
    }
    out << "grid.s_min " << fmt(spec.grid.s_min) << '\n';
    out << "grid.s_max " << fmt(spec.grid.s_max) << '\n';
    out << "grid.n_nodes " << spec.grid.n_nodes << '\n';
    out << "objective.k_lo " << fmt(spec.objective.k_lo) << '\n';
    out << "objective.k_hi " << fmt(spec.objective.k_hi) << '\n';
    out << "objective.k_tol " << fmt(spec.objective.k_tol) << '\n';
    out << "objective.coarse_k_nodes " << spec.objective.coarse_k_nodes << '\n';
    out << "objective.log_floor " << fmt(spec.objective.log_floor) << '\n';
    out << "objective.refine_budget " << spec.objective.refine_budget << '\n';
    out << "smooth.sigma " << fmt(spec.smooth.sigma_smooth) << '\n';
    out << "smooth.n_delta " << spec.smooth.n_delta << '\n';
    out << "smooth.n_mc " << spec.smooth.n_mc << '\n';
    out << "noise.level " << fmt(spec.noise_level) << '\n';
    out << "seed " << spec.seed << '\n';
    if (!spec.measurement_path.empty()) out << "measurement " << spec.measurement_path << '\n';
    auto list_out = [&out](const char* key, const auto& vals, auto format) {
        if (vals.empty()) return;
        out << key << ' ';
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) out << ',';
            out << format(vals[i]);
        }
        out << '\n';
    };
    list_out("sweep.levels", spec.sweep_levels, [](double v) { return fmt(v); });
    list_out("sweep.j_values", spec.sweep_j_values,
             [](int v) { return std::to_string(v); });
    list_out("sweep.k_values", spec.sweep_k_values, [](double v) { return fmt(v); });
    if (spec.kind == ExperimentKind::landscape) {
        out << "landscape.j_lo " << spec.land.j_lo << '\n';
        out << "landscape.j_hi " << spec.land.j_hi << '\n';
        out << "landscape.k_lo " << fmt(spec.land.k_lo) << '\n';
        out << "landscape.k_hi " << fmt(spec.land.k_hi) << '\n';
        out << "landscape.k_steps " << spec.land.k_steps << '\n';
    }
    return out.str();
}

} // namespace defectscan

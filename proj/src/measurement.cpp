#include "defectscan/measurement.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "defectscan/errors.hpp"
#include "defectscan/rng.hpp"
#include "defectscan/spectral.hpp"

namespace defectscan {

void SGrid::validate() const {
    if (!(s_min >= 0.0)) throw std::invalid_argument("SGrid: s_min must be >= 0");
    if (!(s_min < s_max)) throw std::invalid_argument("SGrid: s_min must be < s_max");
    if (n_nodes < 11) throw std::invalid_argument("SGrid: n_nodes must be >= 11");
}

std::vector<double> SGrid::nodes() const {
    std::vector<double> out(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) out[static_cast<std::size_t>(i)] = node(i);
    return out;
}

std::vector<double> synthesize(const ChainConfig& chain, const DefectHypothesis& defect,
                               const SGrid& grid) {
    chain.validate();
    defect.validate(chain.n_masses);
    grid.validate();
    std::vector<double> out(static_cast<std::size_t>(grid.n_nodes));
    for (int i = 0; i < grid.n_nodes; ++i)
        out[static_cast<std::size_t>(i)] =
            direct_solve_x1(defect.index, defect.stiffness, grid.node(i), chain);
    return out;
}

std::vector<double> add_noise(const std::vector<double>& values, double noise_level,
                              std::uint64_t seed) {
    if (noise_level < 0.0) throw std::invalid_argument("add_noise: noise_level must be >= 0");
    if (noise_level == 0.0) return values;
    double max_abs = 0.0;
    for (double v : values) max_abs = std::max(max_abs, std::abs(v));
    const double sigma = noise_level * max_abs;
    Rng rng(seed);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = values[i] + sigma * rng.next_gaussian();
    return out;
}

MeasurementSet make_measurement(const ChainConfig& chain, const DefectHypothesis& defect,
                                const SGrid& grid, double noise_level, std::uint64_t seed) {
    MeasurementSet meas;
    meas.chain = chain;
    meas.grid = grid;
    meas.values = add_noise(synthesize(chain, defect, grid), noise_level, seed);
    meas.noise_level = noise_level;
    meas.seed = seed;
    meas.truth = defect;
    return meas;
}

namespace {

constexpr int kFormatVersion = 1;

std::string hexd(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double parse_double(const std::string& tok, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw FileFormatError("measurement file: bad numeric value for '" + key + "': " + tok);
    }
}

} // namespace

void save_measurement(const MeasurementSet& meas, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_measurement: cannot open " + path);
    out << "# defectscan measurement\n";
    out << "version " << kFormatVersion << '\n';
    out << "n_masses " << meas.chain.n_masses << '\n';
    out << "damping " << hexd(meas.chain.damping) << '\n';
    out << "impulse " << hexd(meas.chain.impulse) << '\n';
    out << "base_stiffness " << hexd(meas.chain.base_stiffness) << '\n';
    out << "base_mass " << hexd(meas.chain.base_mass) << '\n';
    out << "grid.s_min " << hexd(meas.grid.s_min) << '\n';
    out << "grid.s_max " << hexd(meas.grid.s_max) << '\n';
    out << "grid.n_nodes " << meas.grid.n_nodes << '\n';
    out << "noise_level " << hexd(meas.noise_level) << '\n';
    out << "seed " << meas.seed << '\n';
    if (meas.truth) {
        out << "truth.index " << meas.truth->index << '\n';
        out << "truth.stiffness " << hexd(meas.truth->stiffness) << '\n';
    }
    out << "data " << meas.values.size() << '\n';
    for (double v : meas.values) out << hexd(v) << '\n';
    if (!out) throw std::runtime_error("save_measurement: write failed for " + path);
}

MeasurementSet load_measurement(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileFormatError("load_measurement: cannot open " + path);

    MeasurementSet meas;
    meas.truth.reset();
    bool have_version = false;
    std::optional<int> truth_index;
    std::optional<double> truth_stiffness;
    long data_count = -1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key, value;
        ls >> key >> value;
        if (key.empty() || value.empty())
            throw FileFormatError("measurement file: malformed line: " + line);
        if (key == "version") {
            if (std::stoi(value) != kFormatVersion)
                throw FileFormatError("measurement file: unsupported version " + value);
            have_version = true;
        } else if (key == "n_masses") {
            meas.chain.n_masses = std::stoi(value);
        } else if (key == "damping") {
            meas.chain.damping = parse_double(value, key);
        } else if (key == "impulse") {
            meas.chain.impulse = parse_double(value, key);
        } else if (key == "base_stiffness") {
            meas.chain.base_stiffness = parse_double(value, key);
        } else if (key == "base_mass") {
            meas.chain.base_mass = parse_double(value, key);
        } else if (key == "grid.s_min") {
            meas.grid.s_min = parse_double(value, key);
        } else if (key == "grid.s_max") {
            meas.grid.s_max = parse_double(value, key);
        } else if (key == "grid.n_nodes") {
            meas.grid.n_nodes = std::stoi(value);
        } else if (key == "noise_level") {
            meas.noise_level = parse_double(value, key);
        } else if (key == "seed") {
            meas.seed = std::stoull(value);
        } else if (key == "truth.index") {
            truth_index = std::stoi(value);
        } else if (key == "truth.stiffness") {
            truth_stiffness = parse_double(value, key);
        } else if (key == "data") {
            data_count = std::stol(value);
            break;
        } else {
            throw FileFormatError("measurement file: unknown key '" + key + "'");
        }
    }
    if (!have_version) throw FileFormatError("measurement file: missing version");
    if (data_count < 0) throw FileFormatError("measurement file: missing data section");

    meas.values.reserve(static_cast<std::size_t>(data_count));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        meas.values.push_back(parse_double(line, "data"));
    }
    if (static_cast<long>(meas.values.size()) != data_count)
        throw FileFormatError("measurement file: expected " + std::to_string(data_count) +
                              " data values, found " + std::to_string(meas.values.size()));
    if (data_count != meas.grid.n_nodes)
        throw FileFormatError("measurement file: data count does not match grid.n_nodes");
    for (double v : meas.values)
        if (!std::isfinite(v)) throw FileFormatError("measurement file: non-finite value");

    if (truth_index.has_value() != truth_stiffness.has_value())
        throw FileFormatError("measurement file: incomplete truth block");
    if (truth_index) meas.truth = DefectHypothesis{*truth_index, *truth_stiffness};

    meas.chain.validate();
    meas.grid.validate();
    if (meas.truth) meas.truth->validate(meas.chain.n_masses);
    return meas;
}

void write_measurement_csv(const MeasurementSet& meas, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_measurement_csv: cannot open " + path);
    std::fprintf(f, "s,x1\n");
    for (int i = 0; i < meas.grid.n_nodes; ++i)
        std::fprintf(f, "%.17g,%.17g\n", meas.grid.node(i),
                     meas.values[static_cast<std::size_t>(i)]);
    std::fclose(f);
}

} // namespace defectscan

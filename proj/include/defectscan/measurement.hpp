#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "defectscan/model.hpp"

namespace defectscan {

/// Uniform Laplace-variable grid the residual is integrated over.
struct SGrid {
    double s_min = 0.0;
    double s_max = 100.0;
    int n_nodes = 2001;

    void validate() const;
    double spacing() const { return (s_max - s_min) / static_cast<double>(n_nodes - 1); }
    double node(int i) const { return s_min + spacing() * static_cast<double>(i); }
    std::vector<double> nodes() const;

    bool operator==(const SGrid&) const = default;
};

/// One synthetic measurement: noisy first-mass Laplace trace on a grid, plus
/// everything needed to reproduce it. `truth` is experiment bookkeeping only;
/// the inversion never reads it.
struct MeasurementSet {
    ChainConfig chain;
    SGrid grid;
    std::vector<double> values;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
    std::optional<DefectHypothesis> truth;
};

/// Noise-free trace values[i] = direct_solve_x1(defect, grid.node(i)).
/// Generated by the direct linear solve, not the kernel formulas the
/// inversion uses, so the pipeline is free of inverse crime.
std::vector<double> synthesize(const ChainConfig& chain, const DefectHypothesis& defect,
                               const SGrid& grid);

/// Add i.i.d. Gaussian noise with std = noise_level * max|values|,
/// deterministically from the seed.
std::vector<double> add_noise(const std::vector<double>& values, double noise_level,
                              std::uint64_t seed);

/// synthesize + add_noise + metadata in one step.
MeasurementSet make_measurement(const ChainConfig& chain, const DefectHypothesis& defect,
                                const SGrid& grid, double noise_level, std::uint64_t seed);

/// Text measurement file: `key value` header lines, then a data section of
/// one hex-float per line (lossless round trip). Keys: version, n_masses,
/// damping, impulse, base_stiffness, base_mass, grid.s_min, grid.s_max,
/// grid.n_nodes, noise_level, seed, truth.index, truth.stiffness (the truth
/// pair is optional), data <count>.
void save_measurement(const MeasurementSet& meas, const std::string& path);
MeasurementSet load_measurement(const std::string& path);

/// Two-column CSV (s, value) for plotting.
void write_measurement_csv(const MeasurementSet& meas, const std::string& path);

} // namespace defectscan

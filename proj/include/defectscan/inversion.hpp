#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "defectscan/measurement.hpp"
#include "defectscan/model.hpp"
#include "defectscan/spectral.hpp"

namespace defectscan {

/// Residual objective configuration. The objective is
///   f(j, k) = log10( max(log_floor, Q) )
/// with Q the composite-Simpson approximation of the squared L2 residual
/// between the kernel-route forward map and the measurement over the grid.
/// Base-10 log so the linear-scale landscape value 10^f recovers Q.
struct ObjectiveSpec {
    SGrid grid;
    double log_floor = 1e-300;
    double k_lo = 0.1;
    double k_hi = 5.0;
    double k_tol = 1e-8;
    int coarse_k_nodes = 41;
    int refine_budget = 200;

    void validate() const;
};

/// Sigma-smooth / Monte Carlo configuration (stiffness perturbations
/// delta_i ~ N(0, sigma_smooth^2), N_delta draws, n_mc independent runs).
struct SigmaSmoothSpec {
    double sigma_smooth = 1e-4;
    int n_delta = 50;
    int n_mc = 100;
    std::uint64_t base_seed = 0;

    void validate() const;
};

struct InversionResult {
    int j_hat = 0;
    double k_hat = 0.0;
    double residual = 0.0;                  // objective at the optimum
    std::vector<double> per_index_residual; // best f for each j in [2, N]
    std::vector<double> per_index_k;        // minimizing k for each j
    long evaluations = 0;
    double wall_time_s = 0.0;
    bool tie = false; // two indices within 1e-12 of the minimum
};

/// Kernel tables for every candidate index j in [2, N] over one grid.
/// Building these dominates a single inversion, and they depend only on
/// (chain, grid), so Monte Carlo drivers build them once and share.
class ChainResponseTable {
public:
    ChainResponseTable(const ChainConfig& chain, const SGrid& grid, int workers = 1);

    const DefectResponseEvaluator& at(int j) const;
    const ChainConfig& chain() const { return chain_; }
    const SGrid& grid() const { return grid_; }

private:
    ChainConfig chain_;
    SGrid grid_;
    std::vector<DefectResponseEvaluator> evaluators_; // index 0 <-> j = 2
};

/// Deterministic objective f(j, k). Propagated NearSingularDeterminant
/// becomes +inf rather than an exception.
double objective(int j, double k, const MeasurementSet& meas, const ObjectiveSpec& spec);

/// Sigma-smooth objective: with delta_i drawn deterministically from
/// draw_seed and frozen for the whole optimization,
///   F(j, k) = (1/N_delta) * sum_i log10( sqrt(max(log_floor, Q(k+delta_i))) )
/// (log of the L2 norm, not its square, so sigma_smooth = 0 reduces to
/// objective/2). k + delta_i is clamped to [k_lo, k_hi] before evaluation.
double sigma_smooth_objective(int j, double k, const MeasurementSet& meas,
                              const ObjectiveSpec& spec, const SigmaSmoothSpec& smooth,
                              std::uint64_t draw_seed);

/// Full per-index inversion: for each j in [2, N], a coarse bound-spanning
/// scan in k followed by golden-section refinement to k_tol; the reported
/// estimate is the (j, k) pair of minimal residual. Ties within 1e-12
/// resolve to the smaller j and set the tie flag.
InversionResult invert(const MeasurementSet& meas, const ObjectiveSpec& spec,
                       int workers = 1);

/// Same search with the sigma-smooth objective (common random numbers:
/// one frozen delta set for all (j, k) evaluations).
InversionResult invert_smooth(const MeasurementSet& meas, const ObjectiveSpec& spec,
                              const SigmaSmoothSpec& smooth, std::uint64_t draw_seed,
                              int workers = 1);

/// Variants over a prebuilt table (grid must match spec.grid).
InversionResult invert(const MeasurementSet& meas, const ObjectiveSpec& spec,
                       const ChainResponseTable& table, int workers);
InversionResult invert_smooth(const MeasurementSet& meas, const ObjectiveSpec& spec,
                              const SigmaSmoothSpec& smooth, std::uint64_t draw_seed,
                              const ChainResponseTable& table, int workers);

/// Monte Carlo aggregate: median location and size over per-run estimates.
struct McInversion {
    double median_j = 0.0;
    double median_k = 0.0;
    std::vector<InversionResult> runs;      // successful runs, in run order
    std::vector<std::uint64_t> noise_seeds; // seed used by each run slot
    int n_runs = 0;
    int n_failed = 0;
};

/// Run smooth.n_mc independent inversions of fresh noisy realizations of the
/// same truth. Run r uses noise seed base_seed + r and its own frozen delta
/// set; runs execute in parallel and are reduced in run order, so the result
/// does not depend on scheduling. Failed runs are excluded from the medians
/// (with a warning to stderr when more than 10% fail). sigma_smooth = 0
/// selects the plain deterministic objective per run.
McInversion mc_invert(const ChainConfig& chain, const DefectHypothesis& truth,
                      const SGrid& grid, double noise_level, const ObjectiveSpec& spec,
                      const SigmaSmoothSpec& smooth, int workers = 1);

/// Dense residual surface M[a][b] = 10^{f(j_a, k_b)} (linear-scale residual)
/// for j in [j_lo, j_hi] and k_steps uniform k values spanning [k_lo, k_hi].
struct Landscape {
    std::vector<int> j_values;
    std::vector<double> k_values;
    std::vector<std::vector<double>> residual; // [j index][k index]
};

Landscape landscape(const MeasurementSet& meas, int j_lo, int j_hi, double k_lo,
                    double k_hi, int k_steps, const ObjectiveSpec& spec, int workers = 1);

/// Median of an unsorted list (mean of the two middle order statistics for
/// even counts). Used for Monte Carlo aggregation everywhere.
double median(std::vector<double> values);

} // namespace defectscan

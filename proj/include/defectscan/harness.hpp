#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "defectscan/config.hpp"
#include "defectscan/inversion.hpp"

namespace defectscan {

/// One swept value with its Monte Carlo aggregate. Relative errors follow
/// the reporting convention |median - truth| / truth for both location and
/// size; frac_location_exact is the fraction of runs that hit the true
/// index exactly.
struct SweepRow {
    double swept_value = 0.0;
    double median_j = 0.0;
    double median_k = 0.0;
    double rel_err_location = 0.0;
    double rel_err_size = 0.0;
    double frac_location_exact = 0.0;
    int n_runs = 0;
    int n_failed = 0;
    std::vector<double> run_j; // per-run estimates, run order
    std::vector<double> run_k;
};

struct SweepReport {
    std::string swept_parameter;
    int true_index = 0;
    double true_stiffness = 0.0;
    std::vector<SweepRow> rows;
};

/// One Monte Carlo-aggregated inversion per noise level. Each level gets an
/// independent seed stream derived from spec.seed and the level position.
SweepReport sweep_noise(const ExperimentSpec& spec);

/// Fixed defect size, varying true location.
SweepReport sweep_location(const ExperimentSpec& spec);

/// Fixed location, varying true defect size.
SweepReport sweep_size(const ExperimentSpec& spec);

void write_sweep_csv(const std::string& path, const SweepReport& report);

/// Outcome of one self-check (validate mode and the acceptance suite share
/// these).
struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Randomized kernel-route vs direct-solve agreement (fixed seed).
CheckResult check_oracle_equivalence(std::uint64_t seed = 20250801);
/// Kernel finiteness at extreme arguments plus symmetry.
CheckResult check_overflow_safety(std::uint64_t seed = 20250802);
/// Time-domain integration + numerical Laplace vs the direct solve at the
/// baseline configuration.
CheckResult check_timedomain_cross();

/// Run an experiment end to end, writing artifacts under spec.output_dir.
/// Returns the process exit code: 0 success, 1 validation failure.
int run_experiment(const ExperimentSpec& spec, std::ostream& log);

} // namespace defectscan

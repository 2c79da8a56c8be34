#include "defectscan/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "defectscan/errors.hpp"
#include "defectscan/parallel.hpp"
#include "defectscan/report.hpp"
#include "defectscan/rng.hpp"
#include "defectscan/spectral.hpp"
#include "defectscan/timedomain.hpp"

namespace defectscan {

namespace {

namespace fs = std::filesystem;

double now_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int resolve_workers(const ExperimentSpec& spec) {
    return spec.workers > 0 ? spec.workers : default_workers();
}

SweepRow aggregate_row(double value, const McInversion& mc, int j_true, double k_true) {
    SweepRow row;
    row.swept_value = value;
    row.median_j = mc.median_j;
    row.median_k = mc.median_k;
    row.n_runs = mc.n_runs;
    row.n_failed = mc.n_failed;
    row.rel_err_location = std::abs(mc.median_j - j_true) / static_cast<double>(j_true);
    row.rel_err_size = std::abs(mc.median_k - k_true) / k_true;
    int exact = 0;
    for (const auto& r : mc.runs) {
        row.run_j.push_back(static_cast<double>(r.j_hat));
        row.run_k.push_back(r.k_hat);
        if (r.j_hat == j_true) ++exact;
    }
    if (!mc.runs.empty())
        row.frac_location_exact = static_cast<double>(exact) /
                                  static_cast<double>(mc.runs.size());
    return row;
}

// Shared driver: one Monte Carlo aggregate per swept value. Per-value seeds
// derive from the experiment seed and the value position so levels have
// independent noise streams and any value can be re-run in isolation.
template <class ValueList, class MakeCase>
SweepReport run_sweep(const ExperimentSpec& spec, const std::string& parameter,
                      const ValueList& values, MakeCase&& make_case) {
    const int workers = resolve_workers(spec);
    SweepReport report;
    report.swept_parameter = parameter;
    report.true_index = spec.defect->index;
    report.true_stiffness = spec.defect->stiffness;
    for (std::size_t i = 0; i < values.size(); ++i) {
        DefectHypothesis truth = *spec.defect;
        double noise = spec.noise_level;
        make_case(values[i], truth, noise);
        SigmaSmoothSpec smooth = spec.smooth;
        smooth.base_seed = derive_seed(spec.seed, seed_tag::sweep_value,
                                       static_cast<std::uint64_t>(i));
        try {
            const McInversion mc = mc_invert(spec.chain, truth, spec.grid, noise,
                                             spec.objective, smooth, workers);
            report.rows.push_back(aggregate_row(static_cast<double>(values[i]), mc,
                                                truth.index, truth.stiffness));
        } catch (const std::exception& e) {
            SweepRow failed;
            failed.swept_value = static_cast<double>(values[i]);
            failed.n_runs = smooth.n_mc;
            failed.n_failed = smooth.n_mc;
            report.rows.push_back(failed);
            std::fprintf(stderr, "sweep %s: value %zu failed: %s\n", parameter.c_str(), i,
                         e.what());
        }
    }
    return report;
}

MeasurementSet obtain_measurement(const ExperimentSpec& spec) {
    if (!spec.measurement_path.empty()) return load_measurement(spec.measurement_path);
    return make_measurement(spec.chain, *spec.defect, spec.grid, spec.noise_level,
                            spec.seed);
}

} // namespace

SweepReport sweep_noise(const ExperimentSpec& spec) {
    spec.validate();
    return run_sweep(spec, "noise_level", spec.sweep_levels,
                     [](double level, DefectHypothesis&, double& noise) { noise = level; });
}

SweepReport sweep_location(const ExperimentSpec& spec) {
    spec.validate();
    return run_sweep(spec, "defect_index", spec.sweep_j_values,
                     [](int j, DefectHypothesis& truth, double&) { truth.index = j; });
}

SweepReport sweep_size(const ExperimentSpec& spec) {
    spec.validate();
    return run_sweep(spec, "defect_stiffness", spec.sweep_k_values,
                     [](double k, DefectHypothesis& truth, double&) { truth.stiffness = k; });
}

void write_sweep_csv(const std::string& path, const SweepReport& report) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("sweep: cannot open " + path);
    std::fprintf(f, "%s,median_j,median_k,rel_err_location,rel_err_size,"
                    "frac_location_exact,n_runs,n_failed\n",
                 report.swept_parameter.c_str());
    for (const auto& row : report.rows)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n", row.swept_value,
                     row.median_j, row.median_k, row.rel_err_location, row.rel_err_size,
                     row.frac_location_exact, row.n_runs, row.n_failed);
    std::fclose(f);
}

CheckResult check_oracle_equivalence(std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult out;
    out.name = "oracle equivalence (analytic vs direct solve)";
    Rng rng(seed);
    const int n_choices[3] = {5, 20, 100};
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        ChainConfig chain;
        chain.n_masses = n_choices[rng.next_u64() % 3];
        const int j = 2 + static_cast<int>(rng.next_u64() %
                                           static_cast<std::uint64_t>(chain.n_masses - 1));
        const double k_star = 0.1 + 4.9 * rng.next_unit();
        const double s = 1e-3 + (100.0 - 1e-3) * rng.next_unit();
        const double a = analytic_x1(j, k_star, s, chain);
        const double d = direct_solve_x1(j, k_star, s, chain);
        const double rel = std::abs(a - d) / std::max(std::abs(d), 1e-30);
        worst = std::max(worst, rel);
    }
    out.pass = worst <= 1e-10;
    std::ostringstream detail;
    detail << "max rel err " << worst << " over 100 draws (tol 1e-10)";
    out.detail = detail.str();
    out.seconds = now_seconds(t0);
    return out;
}

CheckResult check_overflow_safety(std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult out;
    out.name = "overflow safety and kernel symmetry";
    ChainConfig big;
    big.n_masses = 1000;
    bool finite_ok = true;
    const SpectralPoint sp_big = lambda_of_s(100.0, big);
    for (int m = 1; m <= big.n_masses; m += 37)
        for (int p = 1; p <= big.n_masses; p += 41)
            if (!std::isfinite(green_kernel(m, p, sp_big, big.n_masses))) finite_ok = false;
    if (!std::isfinite(direct_solve_x1(500, 1.3, 100.0, big))) finite_ok = false;

    ChainConfig chain;
    Rng rng(seed);
    double worst_sym = 0.0;
    for (int draw = 0; draw < 1000; ++draw) {
        const double s = 100.0 * rng.next_unit();
        const SpectralPoint sp = lambda_of_s(s, chain);
        const int m = 1 + static_cast<int>(rng.next_u64() % 100);
        const int p = 1 + static_cast<int>(rng.next_u64() % 100);
        const double a = green_kernel(m, p, sp, chain.n_masses);
        const double b = green_kernel(p, m, sp, chain.n_masses);
        const double rel = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
        worst_sym = std::max(worst_sym, rel);
    }
    out.pass = finite_ok && worst_sym <= 1e-12;
    std::ostringstream detail;
    detail << (finite_ok ? "kernels finite at N=1000, s=100" : "NON-FINITE kernel found")
           << "; max symmetry defect " << worst_sym << " (tol 1e-12)";
    out.detail = detail.str();
    out.seconds = now_seconds(t0);
    return out;
}

CheckResult check_timedomain_cross() {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult out;
    out.name = "time-domain cross-check (numerical Laplace vs direct solve)";
    ChainConfig chain; // baseline N=100, d=0.1, gamma=1
    const DefectHypothesis defect{40, 1.3};
    const TimeTrace trace = integrate_chain(chain, defect, 1e-3, 400.0);
    const double probes[5] = {0.5, 1.0, 2.0, 5.0, 10.0};
    double worst = 0.0;
    for (double s : probes) {
        const double numeric = numerical_laplace(trace, s, chain.damping / 2.0);
        const double direct = direct_solve_x1(defect.index, defect.stiffness, s, chain);
        worst = std::max(worst, std::abs(numeric - direct) / std::abs(direct));
    }
    out.pass = worst <= 1e-3;
    std::ostringstream detail;
    detail << "max rel err " << worst << " over s in {0.5,1,2,5,10} (tol 1e-3)";
    out.detail = detail.str();
    out.seconds = now_seconds(t0);
    return out;
}

int run_experiment(const ExperimentSpec& spec, std::ostream& log) {
    spec.validate();
    const int workers = resolve_workers(spec);
    const fs::path out_dir(spec.output_dir);
    if (spec.kind != ExperimentKind::validate) fs::create_directories(out_dir);

    switch (spec.kind) {
        case ExperimentKind::simulate: {
            const MeasurementSet meas = make_measurement(spec.chain, *spec.defect,
                                                         spec.grid, spec.noise_level,
                                                         spec.seed);
            save_measurement(meas, (out_dir / "measurement.dat").string());
            write_measurement_csv(meas, (out_dir / "measurement.csv").string());
            log << "wrote " << (out_dir / "measurement.dat").string() << " ("
                << meas.values.size() << " nodes)\n";
            return 0;
        }
        case ExperimentKind::invert: {
            const MeasurementSet meas = obtain_measurement(spec);
            const InversionResult res = invert(meas, spec.objective, workers);
            write_inversion_report((out_dir / "invert_report.txt").string(), spec, res);
            write_per_index_csv((out_dir / "per_index_residual.csv").string(), res);
            log << "j_hat " << res.j_hat << "  k_hat " << res.k_hat << "  residual_log10 "
                << res.residual << "  (" << res.evaluations << " evaluations, "
                << res.wall_time_s << " s)\n";
            return 0;
        }
        case ExperimentKind::mc_invert: {
            const McInversion mc = mc_invert(spec.chain, *spec.defect, spec.grid,
                                             spec.noise_level, spec.objective, spec.smooth,
                                             workers);
            write_mc_report((out_dir / "mc_report.txt").string(), spec, mc);
            write_mc_runs_csv((out_dir / "mc_runs.csv").string(), mc);
            log << "median_j " << mc.median_j << "  median_k " << mc.median_k << "  ("
                << mc.runs.size() << " runs, " << mc.n_failed << " failed)\n";
            return 0;
        }
        case ExperimentKind::sweep_noise:
        case ExperimentKind::sweep_location:
        case ExperimentKind::sweep_size: {
            SweepReport report;
            if (spec.kind == ExperimentKind::sweep_noise) report = sweep_noise(spec);
            else if (spec.kind == ExperimentKind::sweep_location)
                report = sweep_location(spec);
            else report = sweep_size(spec);
            write_sweep_csv((out_dir / "sweep.csv").string(), report);
            log << "swept " << report.swept_parameter << " over " << report.rows.size()
                << " values -> " << (out_dir / "sweep.csv").string() << '\n';
            return 0;
        }
        case ExperimentKind::landscape: {
            const MeasurementSet meas = obtain_measurement(spec);
            const int j_hi = spec.land.j_hi == 0 ? spec.chain.n_masses : spec.land.j_hi;
            const double k_lo = spec.land.k_lo > 0.0 ? spec.land.k_lo : spec.objective.k_lo;
            const double k_hi = spec.land.k_hi > 0.0 ? spec.land.k_hi : spec.objective.k_hi;
            const Landscape ls = landscape(meas, spec.land.j_lo, j_hi, k_lo, k_hi,
                                           spec.land.k_steps, spec.objective, workers);
            write_landscape_csv((out_dir / "landscape.csv").string(), ls);
            std::size_t best_a = 0, best_b = 0;
            for (std::size_t a = 0; a < ls.residual.size(); ++a)
                for (std::size_t b = 0; b < ls.residual[a].size(); ++b)
                    if (ls.residual[a][b] < ls.residual[best_a][best_b]) {
                        best_a = a;
                        best_b = b;
                    }
            log << "landscape minimum at j = " << ls.j_values[best_a] << ", k = "
                << ls.k_values[best_b] << '\n';
            return 0;
        }
        case ExperimentKind::validate: {
            const CheckResult checks[3] = {check_oracle_equivalence(),
                                           check_overflow_safety(),
                                           check_timedomain_cross()};
            bool all_pass = true;
            for (const auto& c : checks) {
                log << (c.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << c.detail
                    << " [" << c.seconds << " s]\n";
                all_pass = all_pass && c.pass;
            }
            return all_pass ? 0 : 1;
        }
    }
    return 2;
}

} // namespace defectscan

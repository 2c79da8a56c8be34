#include "defectscan/inversion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>

#include "defectscan/errors.hpp"
#include "defectscan/parallel.hpp"
#include "defectscan/rng.hpp"

namespace defectscan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-12;
constexpr double kInvPhi = 0.61803398874989484820458683436564; // (sqrt(5)-1)/2

std::vector<double> simpson_weights(const SGrid& grid) {
    const std::size_t n = static_cast<std::size_t>(grid.n_nodes);
    const double h = grid.spacing();
    std::vector<double> w(n, 0.0);
    std::size_t last = n - 1;
    const bool odd_intervals = (last % 2 != 0);
    if (odd_intervals) --last;
    w[0] += h / 3.0;
    w[last] += h / 3.0;
    for (std::size_t i = 1; i < last; i += 2) w[i] += 4.0 * h / 3.0;
    for (std::size_t i = 2; i < last; i += 2) w[i] += 2.0 * h / 3.0;
    if (odd_intervals) {
        w[n - 2] += h / 2.0;
        w[n - 1] += h / 2.0;
    }
    return w;
}

// Quadrature of the squared residual for one candidate index.
double squared_residual(const DefectResponseEvaluator& ev, double k_star,
                        const std::vector<double>& values, const std::vector<double>& w) {
    double acc = 0.0;
    const std::size_t n = values.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = ev.x1(k_star, i) - values[i];
        acc += w[i] * diff * diff;
    }
    return acc;
}

double log10_floor(double q, double floor_value) {
    return std::log10(std::max(floor_value, q));
}

// Deterministic per-index objective f(k); NearSingularDeterminant -> +inf.
struct DetObjective {
    const DefectResponseEvaluator& ev;
    const std::vector<double>& values;
    const std::vector<double>& w;
    double floor_value;

    double operator()(double k) const {
        try {
            return log10_floor(squared_residual(ev, k, values, w), floor_value);
        } catch (const NearSingularDeterminant&) {
            return kInf;
        }
    }
};

// Sigma-smooth per-index objective with a frozen delta set.
struct SmoothObjective {
    const DefectResponseEvaluator& ev;
    const std::vector<double>& values;
    const std::vector<double>& w;
    double floor_value;
    double k_lo;
    double k_hi;
    const std::vector<double>& deltas;

    double operator()(double k) const {
        double acc = 0.0;
        for (double d : deltas) {
            const double kd = std::clamp(k + d, k_lo, k_hi);
            double term;
            try {
                term = log10_floor(
                    std::sqrt(std::max(floor_value, squared_residual(ev, kd, values, w))),
                    floor_value);
            } catch (const NearSingularDeterminant&) {
                term = kInf;
            }
            acc += term;
        }
        return acc / static_cast<double>(deltas.size());
    }
};

std::vector<double> draw_deltas(const SigmaSmoothSpec& smooth, std::uint64_t draw_seed) {
    Rng rng(draw_seed);
    std::vector<double> deltas(static_cast<std::size_t>(smooth.n_delta));
    for (double& d : deltas) d = smooth.sigma_smooth * rng.next_gaussian();
    return deltas;
}

struct ScalarMin {
    double k = 0.0;
    double f = kInf;
    long evals = 0;
};

// Coarse bound-spanning scan followed by golden-section refinement around
// the best coarse node. Reports the best point ever evaluated.
template <class Fn>
ScalarMin minimize_k(const Fn& fn, const ObjectiveSpec& spec) {
    ScalarMin best;
    best.k = spec.k_lo;
    const int nc = spec.coarse_k_nodes;
    const double step = (spec.k_hi - spec.k_lo) / static_cast<double>(nc - 1);
    double best_coarse_k = spec.k_lo;
    for (int i = 0; i < nc; ++i) {
        const double k = (i == nc - 1) ? spec.k_hi : spec.k_lo + step * i;
        const double f = fn(k);
        ++best.evals;
        if (f < best.f) {
            best.f = f;
            best.k = k;
            best_coarse_k = k;
        }
    }

    double lo = std::max(spec.k_lo, best_coarse_k - step);
    double hi = std::min(spec.k_hi, best_coarse_k + step);
    long refine_evals = 0;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = fn(x1);
    double f2 = fn(x2);
    refine_evals += 2;
    auto consider = [&best](double k, double f) {
        if (f < best.f) {
            best.f = f;
            best.k = k;
        }
    };
    consider(x1, f1);
    consider(x2, f2);
    while (hi - lo > spec.k_tol && refine_evals < spec.refine_budget) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = fn(x1);
            consider(x1, f1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = fn(x2);
            consider(x2, f2);
        }
        ++refine_evals;
    }
    best.evals += refine_evals;
    return best;
}

struct PerIndexOutcome {
    double f = kInf;
    double k = 0.0;
    long evals = 0;
};

InversionResult assemble_result(std::vector<PerIndexOutcome> outcomes,
                                std::chrono::steady_clock::time_point t0) {
    InversionResult res;
    const std::size_t m = outcomes.size();
    res.per_index_residual.resize(m);
    res.per_index_k.resize(m);
    std::size_t arg = 0;
    for (std::size_t i = 0; i < m; ++i) {
        res.per_index_residual[i] = outcomes[i].f;
        res.per_index_k[i] = outcomes[i].k;
        res.evaluations += outcomes[i].evals;
        if (outcomes[i].f < outcomes[arg].f) arg = i;
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (i != arg && outcomes[i].f - outcomes[arg].f <= kTieTol) {
            res.tie = true;
            if (i < arg) arg = i; // deterministic: smaller index wins the tie
        }
    }
    res.j_hat = static_cast<int>(arg) + 2;
    res.k_hat = outcomes[arg].k;
    res.residual = outcomes[arg].f;
    res.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

void check_meas(const MeasurementSet& meas, const ObjectiveSpec& spec) {
    spec.validate();
    meas.chain.validate();
    if (!(meas.grid == spec.grid))
        throw std::invalid_argument("inversion: measurement grid differs from objective grid");
    if (meas.values.size() != static_cast<std::size_t>(meas.grid.n_nodes))
        throw std::invalid_argument("inversion: measurement length mismatch");
}

} // namespace

void ObjectiveSpec::validate() const {
    grid.validate();
    if (!(log_floor > 0.0)) throw std::invalid_argument("ObjectiveSpec: log_floor must be > 0");
    if (!(k_lo < k_hi)) throw std::invalid_argument("ObjectiveSpec: k_lo must be < k_hi");
    if (!(k_lo > 0.0)) throw std::invalid_argument("ObjectiveSpec: k_lo must be > 0");
    if (!(k_tol > 0.0)) throw std::invalid_argument("ObjectiveSpec: k_tol must be > 0");
    if (coarse_k_nodes < 3)
        throw std::invalid_argument("ObjectiveSpec: coarse_k_nodes must be >= 3");
    if (refine_budget < 2)
        throw std::invalid_argument("ObjectiveSpec: refine_budget must be >= 2");
}

void SigmaSmoothSpec::validate() const {
    if (sigma_smooth < 0.0)
        throw std::invalid_argument("SigmaSmoothSpec: sigma_smooth must be >= 0");
    if (n_delta < 1) throw std::invalid_argument("SigmaSmoothSpec: n_delta must be >= 1");
    if (n_mc < 1) throw std::invalid_argument("SigmaSmoothSpec: n_mc must be >= 1");
}

ChainResponseTable::ChainResponseTable(const ChainConfig& chain, const SGrid& grid,
                                       int workers)
    : chain_(chain), grid_(grid) {
    chain.validate();
    grid.validate();
    const std::vector<double> s_nodes = grid.nodes();
    const int count = chain.n_masses - 1; // j = 2..N
    evaluators_.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        evaluators_.emplace_back(chain_, i + 2, std::span<const double>{});
    // Placeholder evaluators above are empty; fill real tables in parallel.
    parallel_for(count, workers, [&](int i) {
        evaluators_[static_cast<std::size_t>(i)] =
            DefectResponseEvaluator(chain_, i + 2, s_nodes);
    });
}

const DefectResponseEvaluator& ChainResponseTable::at(int j) const {
    if (j < 2 || j > chain_.n_masses)
        throw std::invalid_argument("ChainResponseTable: index out of range");
    return evaluators_[static_cast<std::size_t>(j - 2)];
}

double objective(int j, double k, const MeasurementSet& meas, const ObjectiveSpec& spec) {
    check_meas(meas, spec);
    if (k < spec.k_lo || k > spec.k_hi)
        throw std::invalid_argument("objective: k outside bounds");
    const DefectResponseEvaluator ev(meas.chain, j, spec.grid.nodes());
    const std::vector<double> w = simpson_weights(spec.grid);
    return DetObjective{ev, meas.values, w, spec.log_floor}(k);
}

double sigma_smooth_objective(int j, double k, const MeasurementSet& meas,
                              const ObjectiveSpec& spec, const SigmaSmoothSpec& smooth,
                              std::uint64_t draw_seed) {
    check_meas(meas, spec);
    smooth.validate();
    if (k < spec.k_lo || k > spec.k_hi)
        throw std::invalid_argument("sigma_smooth_objective: k outside bounds");
    const DefectResponseEvaluator ev(meas.chain, j, spec.grid.nodes());
    const std::vector<double> w = simpson_weights(spec.grid);
    const std::vector<double> deltas = draw_deltas(smooth, draw_seed);
    return SmoothObjective{ev, meas.values, w, spec.log_floor,
                           spec.k_lo, spec.k_hi, deltas}(k);
}

InversionResult invert(const MeasurementSet& meas, const ObjectiveSpec& spec,
                       const ChainResponseTable& table, int workers) {
    const auto t0 = std::chrono::steady_clock::now();
    check_meas(meas, spec);
    if (!(table.grid() == spec.grid))
        throw std::invalid_argument("invert: table grid differs from objective grid");
    const std::vector<double> w = simpson_weights(spec.grid);
    const int count = meas.chain.n_masses - 1;
    std::vector<PerIndexOutcome> outcomes(static_cast<std::size_t>(count));
    parallel_for(count, workers, [&](int i) {
        const DetObjective fn{table.at(i + 2), meas.values, w, spec.log_floor};
        const ScalarMin m = minimize_k(fn, spec);
        outcomes[static_cast<std::size_t>(i)] = {m.f, m.k, m.evals};
    });
    return assemble_result(std::move(outcomes), t0);
}

InversionResult invert(const MeasurementSet& meas, const ObjectiveSpec& spec, int workers) {
    check_meas(meas, spec);
    const ChainResponseTable table(meas.chain, spec.grid, workers);
    return invert(meas, spec, table, workers);
}

InversionResult invert_smooth(const MeasurementSet& meas, const ObjectiveSpec& spec,
                              const SigmaSmoothSpec& smooth, std::uint64_t draw_seed,
                              const ChainResponseTable& table, int workers) {
    const auto t0 = std::chrono::steady_clock::now();
    check_meas(meas, spec);
    smooth.validate();
    if (!(table.grid() == spec.grid))
        throw std::invalid_argument("invert_smooth: table grid differs from objective grid");
    const std::vector<double> w = simpson_weights(spec.grid);
    const std::vector<double> deltas = draw_deltas(smooth, draw_seed);
    const int count = meas.chain.n_masses - 1;
    std::vector<PerIndexOutcome> outcomes(static_cast<std::size_t>(count));
    parallel_for(count, workers, [&](int i) {
        const SmoothObjective fn{table.at(i + 2), meas.values, w, spec.log_floor,
                                 spec.k_lo, spec.k_hi, deltas};
        const ScalarMin m = minimize_k(fn, spec);
        outcomes[static_cast<std::size_t>(i)] = {m.f, m.k, m.evals};
    });
    return assemble_result(std::move(outcomes), t0);
}

InversionResult invert_smooth(const MeasurementSet& meas, const ObjectiveSpec& spec,
                              const SigmaSmoothSpec& smooth, std::uint64_t draw_seed,
                              int workers) {
    check_meas(meas, spec);
    const ChainResponseTable table(meas.chain, spec.grid, workers);
    return invert_smooth(meas, spec, smooth, draw_seed, table, workers);
}

McInversion mc_invert(const ChainConfig& chain, const DefectHypothesis& truth,
                      const SGrid& grid, double noise_level, const ObjectiveSpec& spec,
                      const SigmaSmoothSpec& smooth, int workers) {
    chain.validate();
    truth.validate(chain.n_masses);
    spec.validate();
    smooth.validate();
    if (!(grid == spec.grid))
        throw std::invalid_argument("mc_invert: grid differs from objective grid");

    const ChainResponseTable table(chain, grid, workers);
    const std::vector<double> clean = synthesize(chain, truth, grid);

    McInversion out;
    out.n_runs = smooth.n_mc;
    out.noise_seeds.resize(static_cast<std::size_t>(smooth.n_mc));
    std::vector<std::optional<InversionResult>> slots(
        static_cast<std::size_t>(smooth.n_mc));
    for (int r = 0; r < smooth.n_mc; ++r)
        out.noise_seeds[static_cast<std::size_t>(r)] =
            smooth.base_seed + static_cast<std::uint64_t>(r);

    parallel_for(smooth.n_mc, workers, [&](int r) {
        const std::uint64_t noise_seed = out.noise_seeds[static_cast<std::size_t>(r)];
        MeasurementSet meas;
        meas.chain = chain;
        meas.grid = grid;
        meas.values = add_noise(clean, noise_level, noise_seed);
        meas.noise_level = noise_level;
        meas.seed = noise_seed;
        try {
            if (smooth.sigma_smooth > 0.0) {
                const std::uint64_t draw_seed =
                    derive_seed(smooth.base_seed, seed_tag::smooth_delta,
                                static_cast<std::uint64_t>(r));
                slots[static_cast<std::size_t>(r)] =
                    invert_smooth(meas, spec, smooth, draw_seed, table, 1);
            } else {
                slots[static_cast<std::size_t>(r)] = invert(meas, spec, table, 1);
            }
        } catch (const std::exception& e) {
            std::cerr << "mc_invert: run " << r << " failed: " << e.what() << '\n';
        }
    });

    std::vector<double> js, ks;
    for (auto& slot : slots) {
        if (slot.has_value()) {
            js.push_back(static_cast<double>(slot->j_hat));
            ks.push_back(slot->k_hat);
            out.runs.push_back(std::move(*slot));
        } else {
            ++out.n_failed;
        }
    }
    if (out.n_failed * 10 > smooth.n_mc)
        std::cerr << "mc_invert: warning: " << out.n_failed << " of " << smooth.n_mc
                  << " runs failed; medians use the remainder\n";
    if (!js.empty()) {
        out.median_j = median(js);
        out.median_k = median(ks);
    }
    return out;
}

Landscape landscape(const MeasurementSet& meas, int j_lo, int j_hi, double k_lo,
                    double k_hi, int k_steps, const ObjectiveSpec& spec, int workers) {
    check_meas(meas, spec);
    if (j_lo < 2 || j_hi > meas.chain.n_masses || j_lo > j_hi)
        throw std::invalid_argument("landscape: bad index range");
    if (k_steps < 2 || !(k_lo < k_hi))
        throw std::invalid_argument("landscape: bad stiffness range");

    Landscape ls;
    for (int j = j_lo; j <= j_hi; ++j) ls.j_values.push_back(j);
    ls.k_values.resize(static_cast<std::size_t>(k_steps));
    const double dk = (k_hi - k_lo) / static_cast<double>(k_steps - 1);
    for (int b = 0; b < k_steps; ++b)
        ls.k_values[static_cast<std::size_t>(b)] = (b == k_steps - 1) ? k_hi : k_lo + dk * b;

    const std::vector<double> w = simpson_weights(spec.grid);
    const std::vector<double> s_nodes = spec.grid.nodes();
    ls.residual.assign(ls.j_values.size(),
                       std::vector<double>(ls.k_values.size(), 0.0));
    parallel_for(static_cast<int>(ls.j_values.size()), workers, [&](int a) {
        const DefectResponseEvaluator ev(meas.chain, ls.j_values[static_cast<std::size_t>(a)],
                                         s_nodes);
        const DetObjective fn{ev, meas.values, w, spec.log_floor};
        for (std::size_t b = 0; b < ls.k_values.size(); ++b)
            ls.residual[static_cast<std::size_t>(a)][b] =
                std::pow(10.0, fn(ls.k_values[b]));
    });
    return ls;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace defectscan

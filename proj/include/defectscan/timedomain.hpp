#pragma once

#include <string>
#include <vector>

#include "defectscan/model.hpp"

namespace defectscan {

/// First-mass displacement history x1(t_i) on a uniform grid t_i = i*dt.
/// x1(0) = 0 always: the impulse enters as a velocity jump, not a
/// displacement.
struct TimeTrace {
    double dt = 0.0;
    std::vector<double> samples;

    double duration() const { return dt * static_cast<double>(samples.size() - 1); }
};

/// Integrate the defective chain ODEs (fixed ends, impulse realized as the
/// initial velocity v1(0) = gamma/m, everything else at rest) with classical
/// RK4 at fixed step dt up to t_end.
///
/// Preconditions: dt <= 0.05 * (2*pi/omega_max) with omega_max =
/// 2*sqrt(max(k, k_star)/m), and t_end > 0. Throws UnstableStep if any
/// displacement exceeds 1e6*|gamma|.
///
/// If energy_samples is non-null it receives the total mechanical energy
/// (kinetic + spring potential, defect spring at k_star) at every sample
/// time.
TimeTrace integrate_chain(const ChainConfig& chain, const DefectHypothesis& defect,
                          double dt, double t_end,
                          std::vector<double>* energy_samples = nullptr);

/// Truncated Laplace transform of the trace by composite Simpson quadrature:
///   integral_0^T e^{-s t} x1(t) dt.
///
/// decay_rate is the known exponential decay of the signal itself (d/2 for
/// chain traces); the truncation tail is bounded by
/// e^{-(s + decay_rate)*T} * max|x1| and TailTooLarge is thrown when that
/// bound exceeds tail_tol (T too small for this s).
double numerical_laplace(const TimeTrace& trace, double s, double decay_rate = 0.0,
                         double tail_tol = 1e-9);

/// Two-column CSV (t, x1).
void write_trace_csv(const TimeTrace& trace, const std::string& path);

} // namespace defectscan

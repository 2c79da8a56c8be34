#include "defectscan/timedomain.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "defectscan/errors.hpp"

namespace defectscan {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Right-hand side of the chain ODEs, x'' = f(x, v). Row j follows the
// Laplace-domain system matrix exactly: its coupling to mass j-1 is k_star
// while row j-1 keeps the baseline coupling to mass j.
struct ChainForce {
    int n;
    int j;       // defect spring index (couples masses j-1, j), 1-based
    double k;
    double k_star;
    double d;
    double inv_m;

    void accel(const std::vector<double>& x, const std::vector<double>& v,
               std::vector<double>& a) const {
        for (int i = 0; i < n; ++i) {
            const double xl = (i > 0) ? x[i - 1] : 0.0;
            const double xr = (i + 1 < n) ? x[i + 1] : 0.0;
            double force;
            if (i == j - 2) {
                force = k * xl - (k + k_star) * x[i] + k * xr;
            } else if (i == j - 1) {
                force = k_star * xl - (k + k_star) * x[i] + k * xr;
            } else {
                force = k * (xl + xr - 2.0 * x[i]);
            }
            a[i] = (force - d * v[i]) * inv_m;
        }
    }
};

double chain_energy(const std::vector<double>& x, const std::vector<double>& v, int j,
                    double k, double k_star, double m) {
    const int n = static_cast<int>(x.size());
    double e = 0.0;
    for (int i = 0; i < n; ++i) e += 0.5 * m * v[i] * v[i];
    for (int s = 1; s <= n + 1; ++s) {
        const double xl = (s >= 2) ? x[s - 2] : 0.0;
        const double xr = (s <= n) ? x[s - 1] : 0.0;
        const double ks = (s == j) ? k_star : k;
        const double stretch = xr - xl;
        e += 0.5 * ks * stretch * stretch;
    }
    return e;
}

} // namespace

TimeTrace integrate_chain(const ChainConfig& chain, const DefectHypothesis& defect,
                          double dt, double t_end, std::vector<double>* energy_samples) {
    // n_masses >= 2 here (not the experiment-level >= 3): the two-mass chain
    // is the closed-form oracle for this integrator
    if (chain.n_masses < 2)
        throw std::invalid_argument("integrate_chain: n_masses must be >= 2");
    if (!(chain.damping >= 0.0) || !(chain.base_stiffness > 0.0) ||
        !(chain.base_mass > 0.0))
        throw std::invalid_argument("integrate_chain: invalid chain parameters");
    defect.validate(chain.n_masses);
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("integrate_chain: dt and t_end must be > 0");

    const double k_max = std::max(chain.base_stiffness, defect.stiffness);
    const double omega_max = 2.0 * std::sqrt(k_max / chain.base_mass);
    const double dt_limit = 0.05 * (kTwoPi / omega_max);
    if (dt > dt_limit)
        throw std::invalid_argument("integrate_chain: dt = " + std::to_string(dt) +
                                    " exceeds stability bound " + std::to_string(dt_limit));

    const int n = chain.n_masses;
    const ChainForce force{n, defect.index, chain.base_stiffness, defect.stiffness,
                           chain.damping, 1.0 / chain.base_mass};
    const double blowup = 1e6 * std::abs(chain.impulse);

    std::vector<double> x(n, 0.0), v(n, 0.0);
    v[0] = chain.impulse / chain.base_mass;

    const long n_steps = std::lround(t_end / dt);
    TimeTrace trace;
    trace.dt = dt;
    trace.samples.reserve(static_cast<std::size_t>(n_steps) + 1);
    trace.samples.push_back(0.0);
    if (energy_samples) {
        energy_samples->clear();
        energy_samples->reserve(static_cast<std::size_t>(n_steps) + 1);
        energy_samples->push_back(chain_energy(x, v, defect.index, chain.base_stiffness,
                                               defect.stiffness, chain.base_mass));
    }

    std::vector<double> ax(n), kx1(n), kv1(n), kx2(n), kv2(n), kx3(n), kv3(n), kx4(n),
        kv4(n), xt(n), vt(n);

    for (long step = 0; step < n_steps; ++step) {
        // k1
        force.accel(x, v, ax);
        for (int i = 0; i < n; ++i) {
            kx1[i] = v[i];
            kv1[i] = ax[i];
        }
        // k2
        for (int i = 0; i < n; ++i) {
            xt[i] = x[i] + 0.5 * dt * kx1[i];
            vt[i] = v[i] + 0.5 * dt * kv1[i];
        }
        force.accel(xt, vt, ax);
        for (int i = 0; i < n; ++i) {
            kx2[i] = vt[i];
            kv2[i] = ax[i];
        }
        // k3
        for (int i = 0; i < n; ++i) {
            xt[i] = x[i] + 0.5 * dt * kx2[i];
            vt[i] = v[i] + 0.5 * dt * kv2[i];
        }
        force.accel(xt, vt, ax);
        for (int i = 0; i < n; ++i) {
            kx3[i] = vt[i];
            kv3[i] = ax[i];
        }
        // k4
        for (int i = 0; i < n; ++i) {
            xt[i] = x[i] + dt * kx3[i];
            vt[i] = v[i] + dt * kv3[i];
        }
        force.accel(xt, vt, ax);
        for (int i = 0; i < n; ++i) {
            kx4[i] = vt[i];
            kv4[i] = ax[i];
        }
        const double w = dt / 6.0;
        for (int i = 0; i < n; ++i) {
            x[i] += w * (kx1[i] + 2.0 * kx2[i] + 2.0 * kx3[i] + kx4[i]);
            v[i] += w * (kv1[i] + 2.0 * kv2[i] + 2.0 * kv3[i] + kv4[i]);
        }
        if (std::abs(x[0]) > blowup)
            throw UnstableStep("integrate_chain: |x1| exceeded " + std::to_string(blowup) +
                               " at t = " + std::to_string((step + 1) * dt));
        trace.samples.push_back(x[0]);
        if (energy_samples)
            energy_samples->push_back(chain_energy(x, v, defect.index, chain.base_stiffness,
                                                   defect.stiffness, chain.base_mass));
    }
    return trace;
}

double numerical_laplace(const TimeTrace& trace, double s, double decay_rate,
                         double tail_tol) {
    if (!(s > 0.0)) throw std::invalid_argument("numerical_laplace: s must be > 0");
    if (trace.samples.size() < 3 || !(trace.dt > 0.0))
        throw std::invalid_argument("numerical_laplace: trace too short");

    double max_abs = 0.0;
    for (double xv : trace.samples) max_abs = std::max(max_abs, std::abs(xv));
    const double tail = std::exp(-(s + decay_rate) * trace.duration()) * max_abs;
    if (tail > tail_tol)
        throw TailTooLarge("numerical_laplace: truncation bound " + std::to_string(tail) +
                           " exceeds tolerance at s = " + std::to_string(s));

    const std::size_t n = trace.samples.size();
    const double dt = trace.dt;
    auto g = [&](std::size_t i) {
        return std::exp(-s * dt * static_cast<double>(i)) * trace.samples[i];
    };

    // Composite Simpson; a trailing trapezoid picks up the odd interval.
    std::size_t last = n - 1;
    const bool odd_intervals = (last % 2 != 0);
    if (odd_intervals) --last;
    double acc = g(0) + g(last);
    for (std::size_t i = 1; i < last; i += 2) acc += 4.0 * g(i);
    for (std::size_t i = 2; i < last; i += 2) acc += 2.0 * g(i);
    double integral = acc * dt / 3.0;
    if (odd_intervals) integral += 0.5 * dt * (g(n - 2) + g(n - 1));
    return integral;
}

void write_trace_csv(const TimeTrace& trace, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_trace_csv: cannot open " + path);
    std::fprintf(f, "t,x1\n");
    for (std::size_t i = 0; i < trace.samples.size(); ++i)
        std::fprintf(f, "%.17g,%.17g\n", trace.dt * static_cast<double>(i),
                     trace.samples[i]);
    std::fclose(f);
}

} // namespace defectscan

#pragma once

#include <optional>
#include <vector>

namespace defectscan {

/// Nondimensional spring-mass chain: N equal masses on springs of stiffness
/// k with per-mass damping d, clamped at both ends (x_0 = x_{N+1} = 0),
/// driven by an impulse of amplitude gamma on mass 1. All inversion math
/// runs on this nondimensional description; physical units are a separate,
/// optional decoration (PhysicalUnits).
struct ChainConfig {
    int n_masses = 100;
    double damping = 0.1;
    double impulse = 1.0;
    double base_stiffness = 1.0;
    double base_mass = 1.0;

    /// Throws std::invalid_argument unless N >= 3, d >= 0, k > 0, m > 0.
    void validate() const;
};

/// Candidate defect: spring `index` couples masses index-1 and index and has
/// stiffness `stiffness` instead of the baseline. Valid indices are 2..N.
struct DefectHypothesis {
    int index = 2;
    double stiffness = 1.0;

    void validate(int n_masses) const;
};

/// Physical bar the nondimensional chain stands for. Only used by the unit
/// conversions below, never inside the inversion.
struct PhysicalUnits {
    double length = 1.0;         // L [m]
    double density = 1.0;        // rho [kg/m^3]
    double youngs_modulus = 1.0; // E0 [Pa]
    double cross_section = 1.0;  // A [m^2]

    void validate() const;

    /// Physical cell length L/N [m].
    double cell_length(int n_masses) const;
};

/// Per-element lumped chain parameters obtained from sampled bar profiles.
struct ElementProperties {
    std::vector<double> mass;      // m_i = rho_i * dx
    std::vector<double> stiffness; // k_i = E_i / dx
    std::vector<double> damping;   // d_i = mu_i * dx
};

/// Sampled continuum profiles of a bar (or string: tension instead of E).
struct BarProfiles {
    std::vector<double> density;
    std::vector<double> modulus;
    std::vector<double> damping;
};

/// Lump sampled bar profiles into chain elements:
///   m_i = rho_i * dx,  k_i = E_i / dx,  d_i = mu_i * dx.
/// Throws on length mismatch or nonpositive density/modulus samples.
ElementProperties identify_from_bar(const std::vector<double>& density_profile,
                                    const std::vector<double>& modulus_profile,
                                    const std::vector<double>& damping_profile,
                                    double dx);

/// Exact inverse of identify_from_bar.
BarProfiles bar_from_elements(const ElementProperties& elements, double dx);

/// Longitudinal wave speed c = sqrt(E0/rho) [m/s].
double wave_speed(const PhysicalUnits& units);

/// Convert nondimensional time to seconds:
///   t_phys = t * sqrt(m_ref/k_ref),  m_ref = rho*A*dx,  k_ref = E0*A/dx,
/// which equals t * dx / c: one nondimensional time unit is the travel time
/// across one cell.
double physical_time(double t_nondim, const PhysicalUnits& units, const ChainConfig& chain);

/// Convert nondimensional angular frequency to rad/s (inverse scale of
/// physical_time, so physical_frequency(w)*physical_time(t) == w*t).
double physical_frequency(double omega_nondim, const PhysicalUnits& units,
                          const ChainConfig& chain);

/// Highest reliably resolved frequency of the discretization [Hz]:
///   f_max = c*N/(4*L)
/// (factor 4 is a conservative dispersion margin; at N=100, L=1, c=1 this
/// resolves about 50 modes).
double max_resolved_frequency(const PhysicalUnits& units, const ChainConfig& chain);

} // namespace defectscan

#include "defectscan/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace defectscan {

void ChainConfig::validate() const {
    if (n_masses < 3) throw std::invalid_argument("ChainConfig: n_masses must be >= 3");
    if (!(damping >= 0.0)) throw std::invalid_argument("ChainConfig: damping must be >= 0");
    if (!(impulse == impulse)) throw std::invalid_argument("ChainConfig: impulse is NaN");
    if (!(base_stiffness > 0.0))
        throw std::invalid_argument("ChainConfig: base_stiffness must be > 0");
    if (!(base_mass > 0.0)) throw std::invalid_argument("ChainConfig: base_mass must be > 0");
}

void DefectHypothesis::validate(int n_masses) const {
    if (index < 2 || index > n_masses)
        throw std::invalid_argument("DefectHypothesis: index must be in [2, N], got " +
                                    std::to_string(index));
    if (!(stiffness > 0.0))
        throw std::invalid_argument("DefectHypothesis: stiffness must be > 0");
}

void PhysicalUnits::validate() const {
    if (!(length > 0.0) || !(density > 0.0) || !(youngs_modulus > 0.0) ||
        !(cross_section > 0.0))
        throw std::invalid_argument("PhysicalUnits: all fields must be > 0");
}

double PhysicalUnits::cell_length(int n_masses) const {
    return length / static_cast<double>(n_masses);
}

ElementProperties identify_from_bar(const std::vector<double>& density_profile,
                                    const std::vector<double>& modulus_profile,
                                    const std::vector<double>& damping_profile,
                                    double dx) {
    const std::size_t n = density_profile.size();
    if (modulus_profile.size() != n || damping_profile.size() != n)
        throw std::invalid_argument("identify_from_bar: profile lengths differ");
    if (!(dx > 0.0)) throw std::invalid_argument("identify_from_bar: dx must be > 0");

    ElementProperties out;
    out.mass.resize(n);
    out.stiffness.resize(n);
    out.damping.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(density_profile[i] > 0.0))
            throw std::invalid_argument("identify_from_bar: density must be > 0 at sample " +
                                        std::to_string(i));
        if (!(modulus_profile[i] > 0.0))
            throw std::invalid_argument("identify_from_bar: modulus must be > 0 at sample " +
                                        std::to_string(i));
        if (damping_profile[i] < 0.0)
            throw std::invalid_argument("identify_from_bar: damping must be >= 0 at sample " +
                                        std::to_string(i));
        out.mass[i] = density_profile[i] * dx;
        out.stiffness[i] = modulus_profile[i] / dx;
        out.damping[i] = damping_profile[i] * dx;
    }
    return out;
}

BarProfiles bar_from_elements(const ElementProperties& elements, double dx) {
    if (!(dx > 0.0)) throw std::invalid_argument("bar_from_elements: dx must be > 0");
    const std::size_t n = elements.mass.size();
    if (elements.stiffness.size() != n || elements.damping.size() != n)
        throw std::invalid_argument("bar_from_elements: element array lengths differ");

    BarProfiles out;
    out.density.resize(n);
    out.modulus.resize(n);
    out.damping.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.density[i] = elements.mass[i] / dx;
        out.modulus[i] = elements.stiffness[i] * dx;
        out.damping[i] = elements.damping[i] / dx;
    }
    return out;
}

double wave_speed(const PhysicalUnits& units) {
    units.validate();
    return std::sqrt(units.youngs_modulus / units.density);
}

double physical_time(double t_nondim, const PhysicalUnits& units, const ChainConfig& chain) {
    units.validate();
    chain.validate();
    const double dx = units.cell_length(chain.n_masses);
    const double m_ref = units.density * units.cross_section * dx;
    const double k_ref = units.youngs_modulus * units.cross_section / dx;
    return t_nondim * std::sqrt(m_ref / k_ref);
}

double physical_frequency(double omega_nondim, const PhysicalUnits& units,
                          const ChainConfig& chain) {
    units.validate();
    chain.validate();
    const double dx = units.cell_length(chain.n_masses);
    const double m_ref = units.density * units.cross_section * dx;
    const double k_ref = units.youngs_modulus * units.cross_section / dx;
    return omega_nondim * std::sqrt(k_ref / m_ref);
}

double max_resolved_frequency(const PhysicalUnits& units, const ChainConfig& chain) {
    units.validate();
    chain.validate();
    return wave_speed(units) * static_cast<double>(chain.n_masses) / (4.0 * units.length);
}

} // namespace defectscan

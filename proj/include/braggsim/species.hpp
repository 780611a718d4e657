#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace braggsim {

// Immutable physical constants of the atom and the driving light.
// All frequencies are angular [rad/s]; wavenumber is the single-beam
// angular wavenumber [rad/m].
struct AtomSpecies {
    std::string name;
    double mass = 0.0;                  // kg
    double wavenumber = 0.0;            // rad/m
    double linewidth = 0.0;             // rad/s
    double hyperfine_splitting = 0.0;   // rad/s
    double saturation_intensity = 0.0;  // W/m^2
};

// Throws std::invalid_argument naming the offending field.
void validate(const AtomSpecies& s);

// Built-in 87Rb entry. The saturation intensity is calibrated so the
// first-order design intensity at 1 GHz detuning comes out at
// 18.0 mW/cm^2 (between the sigma+- and isotropic D2 line values).
AtomSpecies rb87();

// omega_r = hbar k^2 / (2 M)  [rad/s]
double recoil_frequency(const AtomSpecies& s);

// delta_B = 4 omega_r = 2 hbar k^2 / M  [rad/s]
double bragg_bandwidth(const AtomSpecies& s);

// Chirp rate of the beam frequency difference that nulls the gravity
// phase, alpha0 = k g / pi, in ordinary frequency [Hz/s].
double resonant_chirp_rate(const AtomSpecies& s, double g);

// Key-value source with keys: name, mass_kg, wavelength_nm,
// linewidth_hz, hyperfine_ghz, isat_mw_cm2. Missing keys fall back to
// the built-in 87Rb values.
AtomSpecies species_from_keyvalues(const std::map<std::string, std::string>& kv);
AtomSpecies load_species(const std::string& path);
AtomSpecies load_species_stream(std::istream& in, const std::string& label);

}  // namespace braggsim

#include "braggsim/species.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "braggsim/constants.hpp"
#include "braggsim/textio.hpp"

namespace braggsim {

namespace {

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("species field '") + field +
                                    "' must be a positive finite number");
}

}  // namespace

void validate(const AtomSpecies& s) {
    if (s.name.empty()) throw std::invalid_argument("species field 'name' must be non-empty");
    require_positive(s.mass, "mass");
    require_positive(s.wavenumber, "wavenumber");
    require_positive(s.linewidth, "linewidth");
    require_positive(s.hyperfine_splitting, "hyperfine_splitting");
    require_positive(s.saturation_intensity, "saturation_intensity");
}

AtomSpecies rb87() {
    AtomSpecies s;
    s.name = "Rb87";
    s.mass = 1.443e-25;
    s.wavenumber = consts::two_pi / 780.0e-9;
    s.linewidth = consts::two_pi * 6.06e6;
    s.hyperfine_splitting = consts::two_pi * 6.8e9;
    s.saturation_intensity = 26.762520619023817;
    return s;
}

double recoil_frequency(const AtomSpecies& s) {
    return consts::hbar * s.wavenumber * s.wavenumber / (2.0 * s.mass);
}

double bragg_bandwidth(const AtomSpecies& s) {
    return 4.0 * recoil_frequency(s);
}

double resonant_chirp_rate(const AtomSpecies& s, double g) {
    if (!(g >= 0.0)) throw std::invalid_argument("resonant_chirp_rate: g must be >= 0");
    return s.wavenumber * g / consts::pi;
}

AtomSpecies species_from_keyvalues(const std::map<std::string, std::string>& kv) {
    AtomSpecies s = rb87();
    for (const auto& [key, value] : kv) {
        if (key == "name") {
            s.name = value;
        } else if (key == "mass_kg") {
            s.mass = textio::to_double(key, value);
        } else if (key == "wavelength_nm") {
            double lambda = textio::to_double(key, value) * 1e-9;
            if (!(lambda > 0.0))
                throw std::invalid_argument("species field 'wavelength_nm' must be positive");
            s.wavenumber = consts::two_pi / lambda;
        } else if (key == "linewidth_hz") {
            s.linewidth = consts::two_pi * textio::to_double(key, value);
        } else if (key == "hyperfine_ghz") {
            s.hyperfine_splitting = consts::two_pi * 1e9 * textio::to_double(key, value);
        } else if (key == "isat_mw_cm2") {
            s.saturation_intensity = 10.0 * textio::to_double(key, value);
        } else {
            throw std::invalid_argument("unknown species key '" + key + "'");
        }
    }
    validate(s);
    return s;
}

AtomSpecies load_species_stream(std::istream& in, const std::string& label) {
    try {
        return species_from_keyvalues(textio::parse_keyvalues(in));
    } catch (const std::exception& e) {
        throw std::runtime_error("species config " + label + ": " + e.what());
    }
}

AtomSpecies load_species(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open species file: " + path);
    return load_species_stream(f, path);
}

}  // namespace braggsim

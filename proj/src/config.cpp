#include "braggsim/config.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

#include "braggsim/constants.hpp"
#include "braggsim/textio.hpp"

namespace braggsim {

ApparatusConfig default_apparatus(AtomSpecies species) {
    ApparatusConfig cfg;
    cfg.species = std::move(species);
    cfg.cloud.initial_radius = 1.5e-3;
    cfg.cloud.transverse_temperature = 5.0e-6;
    cfg.cloud.longitudinal_temperature = 30.0e-9;
    cfg.order = 1;
    cfg.interrogation_time = 50.0e-3;
    cfg.first_pulse_time = 20.0e-3;
    cfg.detuning = consts::two_pi * 1.0e9;
    cfg.beam_diameter = 6.5e-3;
    cfg.curvature = 50.0e3;
    cfg.target_accuracy = consts::ugal_g;
    cfg.loss_budget = 0.01;
    cfg.gravity = 9.8;
    return cfg;
}

ApparatusConfig apparatus_from_keyvalues(const std::map<std::string, std::string>& kv,
                                         AtomSpecies species) {
    ApparatusConfig cfg = default_apparatus(std::move(species));
    bool target_si_seen = false;
    for (const auto& [key, value] : kv) {
        if (key == "order") {
            cfg.order = static_cast<int>(textio::to_long(key, value));
        } else if (key == "interrogation_ms") {
            cfg.interrogation_time = 1e-3 * textio::to_double(key, value);
        } else if (key == "first_pulse_ms") {
            cfg.first_pulse_time = 1e-3 * textio::to_double(key, value);
        } else if (key == "detuning_ghz") {
            cfg.detuning = consts::two_pi * 1e9 * textio::to_double(key, value);
        } else if (key == "beam_diameter_mm") {
            cfg.beam_diameter = 1e-3 * textio::to_double(key, value);
        } else if (key == "curvature_km") {
            cfg.curvature = 1e3 * textio::to_double(key, value);
        } else if (key == "radius_mm") {
            cfg.cloud.initial_radius = 1e-3 * textio::to_double(key, value);
        } else if (key == "transverse_temperature_uk") {
            cfg.cloud.transverse_temperature = 1e-6 * textio::to_double(key, value);
        } else if (key == "longitudinal_temperature_uk") {
            cfg.cloud.longitudinal_temperature = 1e-6 * textio::to_double(key, value);
        } else if (key == "target_ugal") {
            if (!target_si_seen)
                cfg.target_accuracy = consts::ugal_g * textio::to_double(key, value);
        } else if (key == "target_ms2") {
            cfg.target_accuracy = textio::to_double(key, value);
            target_si_seen = true;
        } else if (key == "loss_budget") {
            cfg.loss_budget = textio::to_double(key, value);
        } else if (key == "gravity_ms2") {
            cfg.gravity = textio::to_double(key, value);
        } else {
            throw std::invalid_argument("unknown apparatus key '" + key + "'");
        }
    }
    validate(cfg);
    return cfg;
}

std::string canonical_config_text(const ApparatusConfig& cfg) {
    std::ostringstream out;
    auto put = [&](const char* key, double v) {
        out << key << '=' << textio::format_double(v) << '\n';
    };
    out << "species=" << cfg.species.name << '\n';
    put("mass", cfg.species.mass);
    put("wavenumber", cfg.species.wavenumber);
    put("linewidth", cfg.species.linewidth);
    put("hyperfine_splitting", cfg.species.hyperfine_splitting);
    put("saturation_intensity", cfg.species.saturation_intensity);
    put("initial_radius", cfg.cloud.initial_radius);
    put("transverse_temperature", cfg.cloud.transverse_temperature);
    put("longitudinal_temperature", cfg.cloud.longitudinal_temperature);
    out << "order=" << cfg.order << '\n';
    put("interrogation_time", cfg.interrogation_time);
    put("first_pulse_time", cfg.first_pulse_time);
    put("detuning", cfg.detuning);
    put("beam_diameter", cfg.beam_diameter);
    put("curvature", cfg.curvature);
    put("target_accuracy", cfg.target_accuracy);
    put("loss_budget", cfg.loss_budget);
    put("gravity", cfg.gravity);
    return out.str();
}

std::uint64_t config_hash(const ApparatusConfig& cfg) {
    return textio::fnv1a(canonical_config_text(cfg));
}

}  // namespace braggsim

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "braggsim/requirements.hpp"

namespace braggsim {

// Default apparatus: first-order pulses on the built-in species with a
// thermal cloud and geometry that satisfies every design requirement.
ApparatusConfig default_apparatus(AtomSpecies species);

// Applies apparatus keys over the defaults. Keys: order,
// interrogation_ms, first_pulse_ms, detuning_ghz, beam_diameter_mm,
// curvature_km, radius_mm, transverse_temperature_uk,
// longitudinal_temperature_uk, target_ugal, target_ms2, loss_budget,
// gravity_ms2. Unknown keys raise an error; target_ms2 wins over
// target_ugal when both appear.
ApparatusConfig apparatus_from_keyvalues(const std::map<std::string, std::string>& kv,
                                         AtomSpecies species);

// Canonical text form of every resolved field, and its FNV-1a hash used
// to stamp emitted files.
std::string canonical_config_text(const ApparatusConfig& cfg);
std::uint64_t config_hash(const ApparatusConfig& cfg);

}  // namespace braggsim

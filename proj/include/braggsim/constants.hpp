#pragma once

#include <numbers>

namespace braggsim::consts {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.0546e-34;     // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J/K

// Micro-Gal expressed as 1e-9 of standard gravity.
inline constexpr double ugal_g = 9.8e-9;       // m/s^2
inline constexpr double ugal_si = 1.0e-8;      // m/s^2

}  // namespace braggsim::consts
